"""limhodge command line.

Exit codes: 0 when the requested verdict was computed, 1 when the instance
fails to load or validate, 2 when a verdict is not decidable.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import frames, instances, period, steenbrink
from .errors import (
    NotDecidable,
    ParseError,
    SchemaError,
    ShapeError,
    UnsupportedDiamond,
    ValidationError,
)
from .period import DistanceClass, PeriodGerm

REPORT_SCHEMA = 1
EXIT_OK, EXIT_INVALID, EXIT_UNDECIDED = 0, 1, 2


def _load(ref: str):
    obj = instances.resolve(ref)
    if isinstance(obj, steenbrink.SncInstance):
        problems = steenbrink.validate_instance(obj)
        if problems:
            raise SchemaError(problems)
    return obj


# ---------------------------------------------------------------- analyses


def e1_summary(inst, m: int) -> dict:
    dims = steenbrink.graded_dims(inst, m)
    return {
        "degree": m,
        "e1": [[row["r"], row["weight"], row["term"], row["dim"]] for row in steenbrink.e1_page(inst, m).table() if row["dim"]],
        "gr": {str(w): d for w, d in sorted(dims.items())},
        "betti": sum(dims.values()),
        "op": "steenbrink.graded_dims",
    }


def germ_distance(g: PeriodGerm, polarization_ok: bool | None) -> dict:
    d = period.distance_index(g.a0, g.n_op.matrix)
    cls = period.classify_distance(g, polarization_ok)
    out = {"d": d, "classification": cls.value, "op": "period.classify_distance"}
    pa = period.potential_asymptote(g)
    out["potential"] = str(pa.as_scalar())
    out["metric"] = str(period.metric_asymptote(g))
    out["witness"] = period.length_witness(g, cls)
    return out


def distance_of(obj) -> dict:
    if isinstance(obj, PeriodGerm):
        return germ_distance(obj, None)
    germ = frames.instance_germ(obj)
    positive = steenbrink.gr3_polarization_verdict(obj) and steenbrink.gr4_polarization_verdict(obj)
    out = germ_distance(germ, positive)
    out["graded_polarization"] = positive
    return out


def ddbar_of(inst) -> dict:
    spec = frames.instance_spec(inst)
    res = frames.ddbar_wedge_verdict(frames.frame_for(spec))
    return {
        "ddbar": res.verdict.value,
        "leading": res.leading,
        "expected": str(res.expected),
        "shape": spec.shape.value,
        "h": spec.h,
        "m": spec.m,
        "op": "frames.ddbar_wedge_verdict",
    }


def polarization_of(inst) -> dict:
    spec = frames.instance_spec(inst)
    return {
        "polarized": frames.polarization_verdict(frames.frame_for(spec)),
        "a_infinity_pd": frames.a_infinity_positive(spec),
        "q_pd": frames.q_positive(spec),
        "op": "frames.polarization_verdict",
    }


def pairing_log(inst, limit: int = 4) -> list:
    """Pair a few boundary columns with every representative of the dual piece."""
    out = []
    for w, fn, dual in ((3, steenbrink.pairing_gr33_untwisted, 3), (2, steenbrink.pairing_gr24_untwisted, 4)):
        g = steenbrink.graded_piece(inst, 3, w)
        other = steenbrink.graded_piece(inst, 3, dual)
        checked = 0
        bad = 0
        for j in range(min(limit, g.boundaries.ncols)):
            b = g.boundaries.select_columns([j])
            for k in range(other.dim):
                rep = other.reps.select_columns([k])
                val = fn(inst, rep, b, check=False) if w == 2 else fn(inst, b, rep, check=False)
                checked += 1
                bad += bool(val)
        out.append({"pairing": fn.__name__, "weight": w, "checked": checked, "nonzero": bad})
    return out


def build_report(ref: str) -> dict:
    obj = _load(ref)
    rep: dict = {"schema": REPORT_SCHEMA, "source": ref}
    if isinstance(obj, PeriodGerm):
        rep["instance"] = ref
        rep["distance"] = distance_of(obj)
        return rep
    inst = obj
    rep["instance"] = inst.name
    rep["degrees"] = [e1_summary(inst, m) for m in range(2 * inst.fiber_dim + 1)]
    rep["b2"] = steenbrink.betti(inst, 2)
    rep["n_iso"] = {
        str(m): {str(k): v for k, v in sorted(steenbrink.n_iso(inst, m).items())}
        for m in range(2 * inst.fiber_dim + 1)
    }
    rep["graded_polarization"] = {
        "gr3": steenbrink.gr3_polarization_verdict(inst),
        "gr4": steenbrink.gr4_polarization_verdict(inst),
        "op": "steenbrink.gr3_polarization_verdict, steenbrink.gr4_polarization_verdict",
    }
    rep["pairing_checks"] = pairing_log(inst)
    rep["pairing_convention"] = {
        "untwisted": "-sum over shared strata of int u v",
        "residual_twist": steenbrink.RESIDUAL_TWIST,
        "op": "steenbrink.pairing_gr33, steenbrink.pairing_gr24",
    }
    for key, fn in (("distance", distance_of), ("ddbar", ddbar_of), ("polarization", polarization_of)):
        try:
            rep[key] = fn(inst)
        except (UnsupportedDiamond, ShapeError) as exc:
            rep[key] = {"status": "not-applicable", "reason": str(exc)}
        except NotDecidable as exc:
            rep[key] = {"status": "undecided", "reason": str(exc)}
    return rep


def report_markdown(rep: dict) -> str:
    lines = [f"# {rep['instance']}", "", f"report schema {rep['schema']}, source `{rep['source']}`", ""]
    for deg in rep.get("degrees", []):
        lines.append(f"## H^{deg['degree']}")
        lines.append("")
        lines.append("| r | weight | E1 term | dim |")
        lines.append("|---|---|---|---|")
        lines += [f"| {r} | {w} | {label} | {d} |" for r, w, label, d in deg["e1"]]
        lines.append("")
        gr = ", ".join(f"Gr_{w} = {d}" for w, d in deg["gr"].items()) or "0"
        lines.append(f"{gr}; b = {deg['betti']}")
        lines.append("")
    if "b2" in rep:
        lines.append(f"b2 = {rep['b2']}")
        lines.append("")
    if "n_iso" in rep:
        lines.append("## N-isomorphism")
        lines.append("")
        for m, checks in rep["n_iso"].items():
            m = int(m)
            if not checks:
                lines.append(f"- H^{m}: nothing to check")
            lines += [f"- H^{m}, N^{k}: Gr_{m + int(k)} -> Gr_{m - int(k)}: {v}" for k, v in checks.items()]
        lines.append("")
    if "graded_polarization" in rep:
        gp = rep["graded_polarization"]
        lines.append(f"graded polarization: Gr3 {gp['gr3']}, Gr4 {gp['gr4']}")
        lines.append("")
    for key in ("distance", "ddbar", "polarization"):
        if key not in rep:
            continue
        lines.append(f"## {key}")
        lines.append("")
        lines += [f"- {k}: {_fmt(v)}" for k, v in sorted(rep[key].items())]
        lines.append("")
    if "pairing_checks" in rep:
        lines.append("## pairing checks")
        lines.append("")
        pc = rep["pairing_convention"]
        lines.append(f"convention: {pc['untwisted']}, residual twist {pc['residual_twist']}")
        lines.append("")
        lines += [f"- {p['pairing']} on im(d1) in weight {p['weight']}: {p['nonzero']} of {p['checked']} nonzero" for p in rep["pairing_checks"]]
        lines.append("")
    return "\n".join(lines)


def _fmt(v) -> str:
    return json.dumps(v, sort_keys=True, ensure_ascii=False) if isinstance(v, (dict, list)) else str(v)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> int:
    obj = _load(args.instance)
    name = obj.name if isinstance(obj, steenbrink.SncInstance) else args.instance
    _emit(args, {"instance": name, "valid": True, "op": "steenbrink.validate_instance"}, f"{name}: valid")
    return EXIT_OK


def cmd_e1(args) -> int:
    inst = _snc(args.instance)
    s = e1_summary(inst, args.m)
    text = "\n".join([f"r={r} weight={w} {label}: {d}" for r, w, label, d in s["e1"]] + [f"Gr: {s['gr']}", f"b{args.m} = {s['betti']}"])
    _emit(args, s, text)
    return EXIT_OK


def cmd_distance(args) -> int:
    d = distance_of(_load(args.instance))
    _emit(args, d, f"d = {d['d']}, distance {d['classification']}")
    return EXIT_OK if d["classification"] != DistanceClass.FINITE_CONDITIONAL.value else EXIT_UNDECIDED


def cmd_ddbar(args) -> int:
    d = ddbar_of(_snc(args.instance))
    _emit(args, d, f"ddbar: {d['ddbar']} (leading {d['leading']})")
    return EXIT_UNDECIDED if d["ddbar"] == frames.WedgeVerdict.INDETERMINATE.value else EXIT_OK


def cmd_polarization(args) -> int:
    d = polarization_of(_snc(args.instance))
    _emit(args, d, f"polarized: {str(d['polarized']).lower()}")
    return EXIT_OK


def cmd_report(args) -> int:
    rep = build_report(args.instance)
    text = dumps(rep) if args.format == "json" else report_markdown(rep) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    undecided = any(isinstance(v, dict) and v.get("status") == "undecided" for v in rep.values())
    return EXIT_UNDECIDED if undecided else EXIT_OK


def _snc(ref: str):
    obj = _load(ref)
    if not isinstance(obj, steenbrink.SncInstance):
        raise ParseError(f"{ref} is not an SNC instance")
    return obj


def _emit(args, data: dict, text: str) -> None:
    sys.stdout.write(dumps(data) if args.json else text + "\n")


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="limhodge", description="Limiting mixed Hodge structures of SNC degenerations.")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, helptext in (
        ("validate", cmd_validate, "check an instance file or builtin: URI"),
        ("e1", cmd_e1, "E1 page and graded dimensions in one degree"),
        ("distance", cmd_distance, "distance index d and classification"),
        ("ddbar", cmd_ddbar, "top-wedge verdict for the ddbar-lemma"),
        ("polarization", cmd_polarization, "eventual polarization of the period matrix"),
        ("report", cmd_report, "full report"),
    ):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("instance")
        sp.set_defaults(func=fn)
        if name == "e1":
            sp.add_argument("--m", type=int, default=3)
        if name == "report":
            sp.add_argument("--out")
            sp.add_argument("--format", choices=("json", "md"), default="json")
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    try:
        return args.func(args)
    except (SchemaError, ValidationError) as exc:
        problems = getattr(exc, "problems", None) or [str(exc)]
        for line in problems:
            print(f"invalid: {line}", file=sys.stderr)
        return EXIT_INVALID
    except ParseError as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NotDecidable as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except (UnsupportedDiamond, ShapeError) as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
