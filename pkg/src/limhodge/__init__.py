"""Exact limiting mixed Hodge structures of semistable degenerations of
threefolds, and the asymptotic checks built on them."""

from .errors import LimHodgeError
from .exactlinalg import QI, ExactMatrix, ExactScalar
from .instances import builtin, conifold_instance, hashimoto_sano_instance, load_instance, resolve
from .steenbrink import SncInstance, graded_dims, validate_instance

__all__ = [
    "ExactMatrix",
    "ExactScalar",
    "LimHodgeError",
    "QI",
    "SncInstance",
    "builtin",
    "conifold_instance",
    "graded_dims",
    "hashimoto_sano_instance",
    "load_instance",
    "resolve",
    "validate_instance",
]

__version__ = "0.1.0"
