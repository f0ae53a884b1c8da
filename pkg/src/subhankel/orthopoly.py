"""Two-term recurrence families and their (sub-)Hankel determinants.

Every family here satisfies ``a_n = p*a_{n-1} + q*a_{n-2}`` (Chebyshev V
included), with polynomial ``p``, ``q`` and initial values ``a_0``, ``a_1``.
For such a sequence the sub-Hankel determinant of size ``r`` has the closed
form

    SH_r(n) = (-1)**(r(r+1)/2) * (-q)**n * D * a_{n+r+1}**(r-2),
    D = a_1**2 - p*a_0*a_1 - q*a_0**2,

which :func:`recurrence_closed_form` evaluates and the tests use as an
independent oracle.  :func:`verify_identity` compares the determinant with
the closed form predicted for each named family and reports the exact ratio.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from gmpy2 import mpq

from .errors import NotDivisible, SizeError
from .matrix import PolyMatrix, determinant
from .poly import Context, Poly, exact_divide
from .report import to_json_value

EQUAL = "equal"
CONSTANT_RATIO = "constant-ratio"
MISMATCH = "mismatch"

_ST = Context(("s", "t"))
_X = Context(("x",))
_XY = Context(("x", "y"))


def _v(ctx, name):
    return Poly.var(ctx, name)


def _c(ctx, value):
    return Poly.constant(ctx, value)


def sign_of_size(r):
    """``(-1)**(r(r+1)/2)``."""
    return -1 if (r * (r + 1) // 2) % 2 else 1


@dataclass(frozen=True)
class Recurrence:
    ctx: Context
    a0: Poly
    a1: Poly
    p: Poly
    q: Poly


def _recurrences():
    s, t = _v(_ST, "s"), _v(_ST, "t")
    x = _v(_X, "x")
    u, w = _v(_XY, "x"), _v(_XY, "y")
    one, two = _c(_X, 1), _c(_X, 2)
    return {
        "GFib": Recurrence(_ST, _c(_ST, 0), _c(_ST, 1), s, t),
        "GLuc": Recurrence(_ST, _c(_ST, 2), s, s, t),
        "NGLuc": Recurrence(_ST, _c(_ST, 1), s, s, t.scale(2)),
        "ChebT": Recurrence(_X, one, x, x.scale(2), -one),
        "ChebU": Recurrence(_X, one, x.scale(2), x.scale(2), -one),
        "ChebV": Recurrence(_X, one, x.scale(2) - 1, x.scale(2), -one),
        "Fib": Recurrence(_X, one, one, x, one),
        "Fib0": Recurrence(_X, _c(_X, 0), one, x, one),
        "Luc": Recurrence(_X, two, x, x, one),
        "QuotForm": Recurrence(_XY, _c(_XY, 0), _c(_XY, 1), u + w, -(u * w)),
        "SumForm": Recurrence(_XY, _c(_XY, 2), u + w, u + w, -(u * w)),
    }


RECURRENCES = _recurrences()
FAMILIES = tuple(RECURRENCES)
_ALIASES = {name.lower(): name for name in FAMILIES}


def family_name(name):
    """Canonical family name; matching is case-insensitive."""
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}") from None


class PolySequence:
    """Memoized terms of one family."""

    _cache: dict = {}

    def __new__(cls, family):
        family = family_name(family)
        seq = cls._cache.get(family)
        if seq is None:
            seq = super().__new__(cls)
            seq.family = family
            seq.recurrence = RECURRENCES[family]
            seq.terms = [seq.recurrence.a0, seq.recurrence.a1]
            cls._cache[family] = seq
        return seq

    @property
    def ctx(self):
        return self.recurrence.ctx

    def __getitem__(self, n):
        if n < 0:
            raise IndexError("terms are indexed from 0")
        rec = self.recurrence
        while len(self.terms) <= n:
            self.terms.append(rec.p * self.terms[-1] + rec.q * self.terms[-2])
        return self.terms[n]


def term(family, n):
    return PolySequence(family)[n]


def _check_size(r, n):
    if r < 2:
        raise SizeError(f"determinant size r={r} must be at least 2")
    if n < 0:
        raise SizeError(f"shift n={n} must be non-negative")


def hankel_matrix(family, r, n, zeroed=False):
    """``(a_{n+i+j})`` for ``0 <= i, j < r``; ``zeroed`` drops entries with ``i+j > r``."""
    _check_size(r, n)
    seq = PolySequence(family)
    rows = [[seq[n + i + j] if not zeroed or i + j <= r else _c(seq.ctx, 0)
             for j in range(r)] for i in range(r)]
    return PolyMatrix.from_rows(rows, seq.ctx)


def hankel_det(family, r, n):
    return determinant(hankel_matrix(family, r, n))


def subhankel_det(family, r, n):
    return determinant(hankel_matrix(family, r, n, zeroed=True))


def recurrence_closed_form(family, r, n):
    """The sub-Hankel determinant predicted from the recurrence data alone."""
    _check_size(r, n)
    rec = RECURRENCES[family_name(family)]
    D = rec.a1 * rec.a1 - rec.p * rec.a0 * rec.a1 - rec.q * rec.a0 * rec.a0
    return (-rec.q) ** n * D * term(family, n + r + 1) ** (r - 2) * sign_of_size(r)


# predicted closed forms, one per identity ------------------------------------

def _pm(e):
    return -1 if e % 2 else 1


def _predicted(identity, r, n):
    head = sign_of_size(r)
    a = term(identity.family, n + r + 1) ** (r - 2)
    s, t = _v(_ST, "s"), _v(_ST, "t")
    x = _v(_X, "x")
    u, w = _v(_XY, "x"), _v(_XY, "y")
    key = identity.key
    if key == "GFib":
        return (-t) ** n * a * head
    if key == "GLuc":
        return (s * s + t.scale(4)) * a * -head
    if key == "NGLuc":
        return t ** (n + 1) * (s - t + 2) * a * (2 ** n * -head * _pm(n))
    if key == "ChebT":
        return (1 - x * x) * a
    if key == "ChebU":
        return a
    if key == "ChebV":
        return (x - 1) * a * -2
    if key in ("Fib", "Fib0"):
        return a * (-head * _pm(n))
    if key == "Luc":
        return (x * x + 4) * a * (-head * _pm(n))
    if key == "QuotForm":
        return (u * w) ** n * a * head
    if key == "SumForm":
        return (u * w) ** n * (u - w) ** 2 * a * -head
    if key == "SumForm[literal]":
        lit = (u ** (n + r + 1) * w ** (n + r + 1)) ** (r - 2)
        return (u * w) ** n * (u - w) ** 2 * lit * -head
    raise KeyError(key)


@dataclass(frozen=True)
class Identity:
    """A named closed-form claim for the sub-Hankel determinant of a family."""

    key: str
    family: str
    formula: str


IDENTITIES = {i.key: i for i in (
    Identity("GFib", "GFib", "(-1)^(r(r+1)/2) (-t)^n GFib_{n+r+1}^(r-2)"),
    Identity("GLuc", "GLuc", "(-1)^(r(r+1)/2+1) (s^2+4t) GLuc_{n+r+1}^(r-2)"),
    Identity("NGLuc", "NGLuc", "(-1)^(n+1+r(r+1)/2) t^(n+1) 2^n (s-t+2) NGLuc_{n+r+1}^(r-2)"),
    Identity("ChebT", "ChebT", "(1-x^2) T_{n+r+1}^(r-2)"),
    Identity("ChebU", "ChebU", "U_{n+r+1}^(r-2)"),
    Identity("ChebV", "ChebV", "-2(x-1) V_{n+r+1}^(r-2)"),
    Identity("Fib", "Fib", "(-1)^(n+r(r+1)/2+1) F_{n+r+1}^(r-2), F_0 = F_1 = 1"),
    Identity("Fib0", "Fib0", "(-1)^(n+r(r+1)/2+1) F_{n+r+1}^(r-2), F_0 = 0, F_1 = 1"),
    Identity("Luc", "Luc", "(-1)^(n+r(r+1)/2+1) (x^2+4) L_{n+r+1}^(r-2)"),
    Identity("QuotForm", "QuotForm", "(-1)^(r(r+1)/2) (xy)^n ((x^(n+r+1)-y^(n+r+1))/(x-y))^(r-2)"),
    Identity("SumForm", "SumForm", "(-1)^(r(r+1)/2+1) (xy)^n (x-y)^2 (x^(n+r+1)+y^(n+r+1))^(r-2)"),
    Identity("SumForm[literal]", "SumForm",
             "(-1)^(r(r+1)/2+1) (xy)^n (x-y)^2 (x^(n+r+1) y^(n+r+1))^(r-2)"),
)}

SPECIALIZED_IDENTITIES = ("ChebT", "ChebU", "ChebV", "Fib", "Fib0", "Luc", "QuotForm",
                        "SumForm", "SumForm[literal]")


def identity_key(name):
    for key in IDENTITIES:
        if key.lower() == name.lower():
            return key
    return family_name(name)


@dataclass
class SHIdentityReport:
    """``lhs`` is the determinant, ``rhs`` the predicted form; ``lhs = ratio * rhs`` when not a mismatch."""

    identity: str
    r: int
    n: int
    lhs: Poly
    rhs: Poly
    status: str
    ratio: object = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self):
        return self.status == EQUAL or (self.status == CONSTANT_RATIO and abs(self.ratio) == 1)

    def row(self):
        """The flat table row ``{family, r, n, status, ratio}``."""
        return {"family": self.identity, "r": self.r, "n": self.n, "status": self.status,
                "ratio": to_json_value(self.ratio)}

    def to_dict(self):
        out = self.row()
        out.update({"lhs": str(self.lhs), "rhs": str(self.rhs),
                    "details": to_json_value(self.details)})
        return out


def compare(lhs, rhs):
    """``(status, ratio, details)`` for ``lhs`` against ``rhs``."""
    if lhs == rhs:
        return EQUAL, mpq(1), {}
    if rhs.is_zero():
        return MISMATCH, None, {"witness": str(lhs.leading_term()[0]), "reason": "rhs is zero"}
    try:
        quotient = exact_divide(lhs, rhs)
    except NotDivisible:
        quotient = None
    if quotient is not None and quotient.is_constant():
        return CONSTANT_RATIO, quotient.constant_value(), {}
    mono, coeff = rhs.leading_term()
    c = lhs.embed(rhs.ctx).coeffs.get(mono, 0) / coeff
    diff = lhs - rhs.scale(c)
    details = {"witness": _monomial_text(diff) if diff else _monomial_text(lhs)}
    if quotient is not None:
        details["quotient"] = quotient
    return MISMATCH, None, details


def _monomial_text(p):
    mono, coeff = p.leading_term()
    return str(Poly._raw(p.ctx, {mono: coeff}))


def verify_identity(identity, r, n, check_hankel=True):
    key = identity_key(identity)
    ident = IDENTITIES[key]
    lhs = subhankel_det(ident.family, r, n)
    rhs = _predicted(ident, r, n)
    status, ratio, details = compare(lhs, rhs)
    details["formula"] = ident.formula
    if check_hankel and r >= 3:
        details["hankel_vanishes"] = hankel_det(ident.family, r, n).is_zero()
    return SHIdentityReport(key, r, n, lhs, rhs, status, ratio, details)


def _row(args):
    return verify_identity(*args).row()


def ratio_table(identities=None, r_values=range(2, 6), n_values=range(0, 4), jobs=1):
    """Rows ``{family, r, n, status, ratio}`` over the grid, in grid order."""
    identities = [identity_key(i) for i in (identities or IDENTITIES)]
    grid = [(i, r, n, False) for i in identities for r in r_values for n in n_values]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_row, grid))
    return [_row(g) for g in grid]


def constant_in_n(rows):
    """Group rows by ``(family, r)``: True when every ``n`` gave the same exact ratio."""
    groups = {}
    for row in rows:
        groups.setdefault((row["family"], row["r"]), []).append(row)
    out = {}
    for key, rs in groups.items():
        ratios = {row["ratio"] for row in rs}
        out[key] = all(row["status"] != MISMATCH for row in rs) and len(ratios) == 1
    return out
