"""Exact symbolic algebra for abelian groups given by block data:
inertial endomorphism verdicts, canonical ring decompositions, and a
brute-force subgroup-index oracle for cross-validation.
"""

from .exactnum import INF, OMEGA, JElement, Residue, UsageError
from .groupkit import (
    Cyclic,
    Element,
    GroupDesc,
    HElement,
    Prufer,
    TorsionFree,
    h_add,
    h_descriptor,
    h_equal,
    h_mul,
    h_zero,
    invariants,
    nm_type,
    truncate,
)
from .endokit import (
    Endo,
    add,
    apply,
    classify,
    close,
    compose,
    equal,
    fm_split,
    identity_endo,
    is_finitary,
    is_multiplication,
    mini_endo,
    multiplication_endo,
    negate,
    semi_endo,
    semi_multiplication,
    sub,
    validate,
    zero_endo,
)
from .inertia import (
    Decomposition,
    InertialCertificate,
    Violation,
    bounded_split,
    decompose,
    is_inertial,
    is_uniform,
    ui_class_in_H,
)
from .oracle import (
    FGSubgroup,
    enumerate_subgroups,
    fs_profile,
    index_in_sum,
    inertness_profile,
    sample_subgroups,
    truncate_endo,
    witness_search,
)
from .linmap import ExactMatrix, growth_bound_check, max_inert_codim, scalar_defect

__version__ = "0.1.0"

__all__ = [
    "INF", "OMEGA", "JElement", "Residue", "UsageError",
    "Cyclic", "Prufer", "TorsionFree", "GroupDesc", "Element", "HElement",
    "invariants", "nm_type", "h_descriptor", "h_zero", "h_equal", "h_add",
    "h_mul", "truncate",
    "Endo", "validate", "apply", "add", "negate", "sub", "compose", "equal",
    "close", "classify", "fm_split", "is_finitary", "is_multiplication",
    "zero_endo", "identity_endo", "multiplication_endo", "semi_multiplication",
    "mini_endo", "semi_endo",
    "Violation", "InertialCertificate", "Decomposition", "is_inertial",
    "decompose", "is_uniform", "ui_class_in_H", "bounded_split",
    "FGSubgroup", "index_in_sum", "enumerate_subgroups", "sample_subgroups",
    "truncate_endo", "inertness_profile", "fs_profile", "witness_search",
    "ExactMatrix", "scalar_defect", "max_inert_codim", "growth_bound_check",
    "__version__",
]
