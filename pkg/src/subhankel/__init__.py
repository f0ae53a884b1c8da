"""Exact symbolic toolkit for sub-Hankel determinants and their dual invariants.

The package is layered:

* :mod:`~subhankel.poly`, :mod:`~subhankel.parsing`, :mod:`~subhankel.matrix` --
  rationals, sparse polynomials, polynomial matrices and determinants;
* :mod:`~subhankel.space` -- the sub-Hankel space, its Lie algebra, group
  action and the relative invariants ``P1, P2, Q1, Q2``;
* :mod:`~subhankel.legendre` -- gradient-of-log maps and multiplicative
  Legendre transform checks;
* :mod:`~subhankel.weyl` -- differential operators on formal powers,
  b-functions and polarizations;
* :mod:`~subhankel.orthopoly` -- recurrence families and their (sub-)Hankel
  determinants;
* :mod:`~subhankel.cli` -- the ``subhankel`` command.
"""
from .errors import (ContextError, DivisionByZero, NotBIdentity, NotDivisible, ParseError,
                     ShapeError, SingularPointError, SizeError, SubHankelError, Unsupported)
from .legendre import WeightPair, inv_map, verify_ml_closed_form, verify_ml_pointwise
from .matrix import PolyMatrix, cofactor_determinant, determinant
from .orthopoly import hankel_det, subhankel_det, term, verify_identity
from .parsing import parse_poly
from .poly import Context, Poly, exact_divide, rational
from .space import (CharacterWeight, GroupElement, LieElement, group_element, invariants,
                    verify_determinant_characters, verify_group_invariance,
                    verify_infinitesimal_invariance, verify_structure_constants)
from .weyl import (FormalElement, PowerProduct, b_function_check, polarized_b_function_check,
                   euler_check, ml_polarization, polarize)

__all__ = [
    "CharacterWeight", "Context", "ContextError", "DivisionByZero", "FormalElement",
    "GroupElement", "LieElement", "NotBIdentity", "NotDivisible", "ParseError", "Poly",
    "PolyMatrix", "PowerProduct", "ShapeError", "SingularPointError", "SizeError",
    "SubHankelError", "Unsupported", "WeightPair", "cofactor_determinant",
    "b_function_check", "polarized_b_function_check", "determinant", "euler_check", "exact_divide",
    "group_element", "hankel_det", "inv_map", "invariants", "ml_polarization", "parse_poly",
    "polarize", "rational", "subhankel_det", "term", "verify_determinant_characters",
    "verify_group_invariance", "verify_identity", "verify_infinitesimal_invariance",
    "verify_structure_constants", "verify_ml_closed_form", "verify_ml_pointwise",
]
