"""Gradient-of-log map and multiplicative Legendre transform checks.

For a weight ``us = (s1, s2)`` the function on the y-side is
``phi_us = P1**s1 * P2**(s2 - (r-1)*s1)`` and its dual candidate is
``psi_us = Q2**(s1 - (r-1)*s2) * Q1**s2``.  The transform of ``phi`` is
``z -> 1 / phi(y)`` where ``z = grad log phi(y)``, so ``ML(phi) = c * psi``
holds exactly when ``c * psi(grad log phi(y)) * phi(y) == 1`` for all ``y``.
"""
import random
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import NotDivisible, SingularPointError
from .poly import Poly, exact_divide, rational
from .report import FAIL, to_json_value
from .space import DEFAULT_SEED, SpaceConfig, ell2, invariants, random_point

EXACT_PASS = "exact-pass"
PASS_UP_TO_SIGN = "pass-up-to-sign"


@dataclass(frozen=True)
class WeightPair:
    s1: object
    s2: object

    def __post_init__(self):
        object.__setattr__(self, "s1", rational(self.s1))
        object.__setattr__(self, "s2", rational(self.s2))

    @property
    def bijective(self):
        return bool(self.s1) and bool(self.s2)

    def is_integral(self):
        return self.s1.denominator == 1 and self.s2.denominator == 1

    def phi_exponents(self, r):
        """Exponents of ``(P1, P2)`` in ``phi_us``."""
        return self.s1, self.s2 - (r - 1) * self.s1

    def psi_exponents(self, r):
        """Exponents of ``(Q1, Q2)`` in ``psi_us``."""
        return self.s2, self.s1 - (r - 1) * self.s2


@dataclass
class MLReport:
    status: str
    constant: object = None
    expected_constant: object = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status in (EXACT_PASS, PASS_UP_TO_SIGN)

    def to_dict(self):
        return {
            "status": self.status,
            "constant": to_json_value(self.constant),
            "expected_constant": to_json_value(self.expected_constant),
            "details": to_json_value(self.details),
        }


def expected_ml_constant(r):
    """The constant claimed for ``ML(P1)`` against ``Q1**(r-1) * Q2**(2r - r**2)``."""
    return mpq(1, (2 ** (ell2(r) + r - 1) * (r - 1)) ** (r - 1))


def _classify(constant, expected):
    if constant == expected:
        return EXACT_PASS
    if constant == -expected:
        return PASS_UP_TO_SIGN
    return FAIL


def inv_map(us, y, r=None):
    """``grad log phi_us`` at the point ``y`` (a sequence of ``r+1`` rationals)."""
    us = us if isinstance(us, WeightPair) else WeightPair(*us)
    r = len(y) - 1 if r is None else r
    inv = invariants(r)
    cfg = SpaceConfig(r)
    point = dict(zip(cfg.y_names, (rational(v) for v in y)))
    p1 = inv.P1.evaluate(point)
    p2 = inv.P2.evaluate(point)
    if not p1 or not p2:
        raise SingularPointError(f"P1*P2 vanishes at {list(y)}")
    e1, e2 = us.phi_exponents(r)
    out = []
    for name in cfg.y_names:
        d1 = inv.P1.derivative(name).evaluate(point)
        d2 = inv.P2.derivative(name).evaluate(point)
        out.append(e1 * d1 / p1 + e2 * d2 / p2)
    return out


def _proportionality(lhs, rhs):
    """``c`` with ``lhs == c * rhs``, or ``None`` plus a witness monomial."""
    if rhs.is_zero():
        return (mpq(0), None) if lhs.is_zero() else (None, str(lhs.leading_term()))
    mono, coeff = rhs.leading_term()
    lhs = lhs.embed(lhs.ctx.merge(rhs.ctx))
    rhs = rhs.embed(lhs.ctx)
    mono, coeff = rhs.leading_term()
    c = lhs.coeffs.get(mono, mpq(0)) / coeff
    diff = lhs - rhs.scale(c)
    if diff.is_zero():
        return c, None
    m, v = diff.leading_term()
    return None, str(Poly._raw(diff.ctx, {m: v}))


def verify_ml_closed_form(r, direction="P-to-Q", direct=False):
    """Measure ``c`` in ``ML(F) = c * G**(r-1) * L**(2r - r**2)`` by polynomial identity.

    For ``P-to-Q``: ``F = P1``, ``G = Q1``, ``L = Q2`` and the identity checked is
    ``c * Q1(grad P1)**(r-1) == P1**(r-1) * (dP1/dy1)**(r**2 - 2r)``.  ``Q-to-P``
    swaps the roles, with ``L = P2`` read off the last gradient component.

    By default the identity is reduced first: ``F`` is divided out of
    ``G(grad F)`` and the quotient's power is compared, which avoids expanding
    polynomials of degree ``r(r-1)**2``.  ``direct=True`` expands both sides.
    """
    inv = invariants(r)
    cfg = SpaceConfig(r)
    if direction == "P-to-Q":
        F, G, src, dst, lin_index = inv.P1, inv.Q1, cfg.y_names, cfg.z_names, 0
    elif direction == "Q-to-P":
        F, G, src, dst, lin_index = inv.Q1, inv.P1, cfg.z_names, cfg.y_names, r
    else:
        raise ValueError(f"unknown direction {direction!r}")
    grad = F.gradient(src)
    A = G.substitute(dict(zip(dst, grad)))
    D = grad[lin_index]
    e = r * r - 2 * r
    expected = expected_ml_constant(r)
    details = {"r": r, "direction": direction, "degree_each_side": r * (r - 1) ** 2}

    lhs_degree = A.degree() * (r - 1)
    rhs_degree = F.degree() * (r - 1) + D.degree() * e
    if lhs_degree != rhs_degree or not A.is_homogeneous() or not D.is_homogeneous():
        details["witness"] = f"degree mismatch {lhs_degree} vs {rhs_degree}"
        return MLReport(FAIL, None, expected, details)

    if direct:
        c, witness = _proportionality(F ** (r - 1) * D ** e, A ** (r - 1))
    else:
        try:
            B = exact_divide(A, F)
        except NotDivisible:
            c, witness = _proportionality(F ** (r - 1) * D ** e, A ** (r - 1))
        else:
            details["gradient_substitution_over_F"] = B
            c, witness = _proportionality(D ** e, B ** (r - 1))
    if c is None:
        details["witness"] = witness
        return MLReport(FAIL, None, expected, details)
    return MLReport(_classify(c, expected), c, expected, details)


def verify_ml_pointwise(r, us, samples=10, seed=DEFAULT_SEED):
    """Check that ``psi_us(Inv_us(y)) * phi_us(y)`` is one constant over samples.

    The reported ``constant`` is ``c`` in ``ML(phi_us) = c * psi_us``, i.e. the
    reciprocal of the common product.
    """
    us = us if isinstance(us, WeightPair) else WeightPair(*us)
    if not us.is_integral():
        raise ValueError("pointwise checks need integer weights for exact powers")
    details = {"r": r, "us": [us.s1, us.s2], "samples": samples}
    if not us.bijective:
        details["degenerate"] = "gradient map is not bijective unless s1*s2 != 0"
        return MLReport(FAIL, None, None, details)
    inv = invariants(r)
    cfg = SpaceConfig(r)
    rng = random.Random(seed)
    p1e, p2e = (int(x) for x in us.phi_exponents(r))
    q1e, q2e = (int(x) for x in us.psi_exponents(r))
    products = []
    for _ in range(samples):
        y = random_point([inv.P1, inv.P2], rng)
        z = inv_map(us, y, r)
        ypt = dict(zip(cfg.y_names, y))
        zpt = dict(zip(cfg.z_names, z))
        q1, q2 = inv.Q1.evaluate(zpt), inv.Q2.evaluate(zpt)
        if not q1 or not q2:
            details["witness"] = {"y": y, "reason": "gradient image is singular"}
            return MLReport(FAIL, None, None, details)
        phi = inv.P1.evaluate(ypt) ** p1e * inv.P2.evaluate(ypt) ** p2e
        psi = q1 ** q1e * q2 ** q2e
        products.append((y, phi * psi))
    first = products[0][1]
    for y, value in products[1:]:
        if value != first:
            details["witness"] = {"y_a": products[0][0], "value_a": first,
                                  "y_b": y, "value_b": value}
            return MLReport(FAIL, None, None, details)
    return MLReport(EXACT_PASS, 1 / first, None, details)
