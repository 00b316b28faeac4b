"""Formal group laws of order two, total squares and Dyer-Lashof operations
over GF(2), with the polynomial-functor calculus of finite coverings."""

from .coverings import FiniteCovering, IntPolynomial, euler_char
from .dring import TotalSquare, bo_dring, derive_generalized_adem, dring_validate, nstar_total_square, thom_reduction
from .fgl import FormalGroupLaw, additive_fgl, fgl_validate, iterated_quotient, lazard_ring, lubin_quotient
from .qring import QMonomial, QPolynomial, adem_expand, normal_form, priddy_action
from .series import CoefficientRing, TruncatedSeries, invariant_rewrite, series_mul, series_substitute

__all__ = [
    "CoefficientRing",
    "FiniteCovering",
    "FormalGroupLaw",
    "IntPolynomial",
    "QMonomial",
    "QPolynomial",
    "TotalSquare",
    "TruncatedSeries",
    "additive_fgl",
    "adem_expand",
    "bo_dring",
    "derive_generalized_adem",
    "dring_validate",
    "euler_char",
    "fgl_validate",
    "invariant_rewrite",
    "iterated_quotient",
    "lazard_ring",
    "lubin_quotient",
    "normal_form",
    "nstar_total_square",
    "priddy_action",
    "series_mul",
    "series_substitute",
    "thom_reduction",
]
