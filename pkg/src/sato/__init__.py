"""Exact formal pseudo-differential operators, Laurent series and Schur pairs."""

from .errors import ALL_CATEGORIES, SatoError
from .ring import (
    QQ,
    DiffPolynomialRing,
    Poly,
    PolynomialRing,
    XSeries,
    XSeriesRing,
    qq,
)
from .series import TruncLaurent, compose, invert as invert_series, nth_root, order_of, revert
from .pdo import PseudoOp, act, commutator, invert, left_normal_form, multiply, sigma
from .normalize import (
    admissible_root,
    admissible_structure,
    conjugator_to_power,
    gauge_first_order,
    is_admissible,
)
from .schur import (
    BigCellBasis,
    EmbeddedSchurPair,
    PureRankAlgebra,
    index_of,
    is_strongly_semistable,
    mu_forward,
    mu_inverse,
    sato_forward,
    sato_inverse,
    validate_pair,
)
from .curvelab import (
    constant_conjugate_test,
    eigen_check,
    elliptic_family,
    gap_genus,
    kdv_residual,
    kdv_system,
    singular_cubic,
)
from .parser import parse

__all__ = [
    "QQ",
    "DiffPolynomialRing",
    "Poly",
    "PolynomialRing",
    "XSeries",
    "XSeriesRing",
    "qq",
    "admissible_root",
    "admissible_structure",
    "conjugator_to_power",
    "gauge_first_order",
    "is_admissible",
    "BigCellBasis",
    "EmbeddedSchurPair",
    "PureRankAlgebra",
    "index_of",
    "is_strongly_semistable",
    "mu_forward",
    "mu_inverse",
    "sato_forward",
    "sato_inverse",
    "validate_pair",
    "constant_conjugate_test",
    "eigen_check",
    "elliptic_family",
    "gap_genus",
    "kdv_residual",
    "kdv_system",
    "singular_cubic",
    "ALL_CATEGORIES",
    "SatoError",
    "TruncLaurent",
    "compose",
    "invert_series",
    "nth_root",
    "order_of",
    "revert",
    "PseudoOp",
    "act",
    "commutator",
    "invert",
    "left_normal_form",
    "multiply",
    "sigma",
    "parse",
]
