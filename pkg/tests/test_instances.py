import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from limhodge import instances
from limhodge.errors import FriedmanConditionFailure, ParseError, SchemaError
from limhodge.exactlinalg import QI, ExactMatrix
from limhodge.period import PeriodGerm
from limhodge.steenbrink import betti, graded_dims, validate_instance


def test_matrix_json_forms():
    dense = ExactMatrix.from_rows([[1, 2], [3, QI(0, 1)]])
    sparse = ExactMatrix.diag([1] + [0] * 9)
    for m in (dense, sparse):
        assert instances.matrix_from_json(instances.matrix_to_json(m)) == m
    assert "entries" in instances.matrix_to_json(sparse)
    assert instances.matrix_from_json([["1", "0"], ["0", "1"]]) == ExactMatrix.identity(2)


@pytest.mark.parametrize("make", [instances.toy_instance, instances.conifold_instance])
def test_instance_json_roundtrip(make, tmp_path):
    inst = make()
    path = tmp_path / "inst.json"
    instances.save_instance(inst, path)
    back = instances.load_instance(path)
    assert instances.instance_to_json(back) == instances.instance_to_json(inst)
    assert graded_dims(back, 3) == graded_dims(inst, 3)


def test_load_errors(tmp_path):
    with pytest.raises(ParseError):
        instances.load_instance(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        instances.load_instance(bad)
    bad.write_text(json.dumps({"schema": 1}))
    with pytest.raises(SchemaError) as err:
        instances.load_instance(bad)
    assert err.value.problems


def test_corrupted_restriction_rejected():
    data = json.loads(instances.TOY_JSON)
    # a restriction with the wrong shape
    data["restrictions"][0]["matrix"] = [["1", "0", "0", "0", "0"]]
    with pytest.raises(SchemaError):
        instances.instance_from_json(data)


def test_cup_map_and_triple_products():
    assert instances.cup_map_matrix() == ExactMatrix.from_rows([[0, 2, 2], [2, 0, 2], [2, 2, 0]])
    assert instances.ns_gram_from_triple_products() == ExactMatrix.from_rows(instances.NS_GRAM)
    assert instances.triple_intersection(0, 1, 2) == 1
    assert instances.triple_intersection(0, 0, 1) == 0


@pytest.mark.parametrize("a", [1, 2, 3])
def test_iota_isometry(a):
    g = ExactMatrix.from_rows(instances.NS_GRAM)
    iota = instances.iota_matrix(a)
    assert iota.T @ g @ iota == g
    assert iota.det().coeff == QI(1)


def test_displayed_iota_is_not_an_isometry():
    g = ExactMatrix.from_rows(instances.NS_GRAM)
    disp = instances.displayed_iota_matrix(1)
    assert disp == ExactMatrix.from_rows([[1, 2, 4], [0, -1, -2], [0, 2, 3]])
    assert disp.T @ g @ disp != g


@pytest.mark.parametrize("a", [1, 2, 3])
def test_hs_curve(a):
    c = instances.hs_curve_class(a)
    g = ExactMatrix.from_rows(instances.NS_GRAM)
    v = ExactMatrix.column_vector(c)
    # adjunction on the K3: 2g - 2 = C.C
    assert (v.T @ g @ v).entry(0, 0) == QI(2 * instances.hs_genus(a) - 2)


def test_k3_lattice():
    g = instances.K3Model222.h2_gram()
    assert g.shape == (22, 22)
    assert not g.det().is_zero()


def test_hs_instance_valid(hs1):
    assert validate_instance(hs1) == []
    assert betti(hs1, 2) == 4


def test_conifold_friedman_condition():
    with pytest.raises(FriedmanConditionFailure):
        instances.conifold_instance(relations=((1, 1),), curve_classes=((1,), (1,)))
    with pytest.raises(FriedmanConditionFailure):
        instances.conifold_instance(relations=((1, 0),), curve_classes=((1,), (0,)))
    assert instances.relation_rank(((1,), (1,))) == 1


def test_builtin_uris():
    assert instances.builtin("builtin:hashimoto-sano?a=2").name.startswith("hashimoto-sano")
    assert isinstance(instances.builtin("builtin:jordan-block?d=2"), PeriodGerm)
    assert instances.resolve("builtin:toy").name == "toy"
    with pytest.raises(ParseError):
        instances.builtin("builtin:nothing")
    with pytest.raises(ParseError):
        instances.builtin("builtin:hashimoto-sano?a=x")


@given(st.integers(0, 10**6))
@settings(max_examples=25, deadline=None)
def test_random_instances_are_valid(seed):
    inst = instances.random_snc_instance(random.Random(seed))
    assert validate_instance(inst) == []
