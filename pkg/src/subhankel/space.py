"""The prehomogeneous vector space of sub-Hankel matrices of size ``r``.

Coordinates: a sub-Hankel matrix is ``sum(y_l * Y_l)`` for ``l = 1..r+1`` and
a dual vector is ``sum(z_l * Y*_l)``.  Points are tuples indexed from 0, so
``y[0]`` is ``y_1``.

The acting Lie algebra is spanned by ``H1, H2, T_1, ..., T_{r-1}``; elements
are written as :class:`LieElement` with coordinates ``(h1, h2, t_1..t_{r-1})``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from math import factorial

import gmpy2
from gmpy2 import mpq

from .errors import SingularPointError, SizeError
from .matrix import (PolyMatrix, determinant, mat_add, mat_commutator, mat_identity,
                     mat_inverse_upper, mat_is_zero, mat_mul, mat_scale, mat_sub,
                     mat_transpose, mat_zero)
from .poly import Context, Poly, rational
from .report import IdentityReport

DEFAULT_SEED = 1729


def ell2(r):
    """2-adic valuation of ``r!``."""
    total, power = 0, 2
    while power <= r:
        total += r // power
        power *= 2
    return total


def _check_size(r):
    if not isinstance(r, int) or r < 2:
        raise SizeError(f"size r must be an integer >= 2, got {r!r}")


@dataclass(frozen=True)
class SpaceConfig:
    r: int
    yctx: Context = field(init=False)
    zctx: Context = field(init=False)

    def __post_init__(self):
        _check_size(self.r)
        object.__setattr__(self, "yctx", Context(f"y{i}" for i in range(1, self.r + 2)))
        object.__setattr__(self, "zctx", Context(f"z{i}" for i in range(1, self.r + 2)))

    @property
    def dim(self):
        return self.r + 1

    @property
    def y_names(self):
        return self.yctx.names

    @property
    def z_names(self):
        return self.zctx.names

    def y_vars(self):
        return [Poly.var(self.yctx, n) for n in self.y_names]

    def z_vars(self):
        return [Poly.var(self.zctx, n) for n in self.z_names]


@dataclass(frozen=True)
class CharacterWeight:
    """The character ``a -> a1**s1 * a2**s2`` of the group."""

    s1: object
    s2: object

    def __post_init__(self):
        object.__setattr__(self, "s1", rational(self.s1))
        object.__setattr__(self, "s2", rational(self.s2))

    def differential(self, x):
        return self.s1 * x.h1 + self.s2 * x.h2

    def on_diagonal(self, a1, a2):
        return rational_power(a1, self.s1) * rational_power(a2, self.s2)

    def __str__(self):
        return f"({self.s1}, {self.s2})"


@dataclass(frozen=True)
class LieElement:
    """``h1*H1 + h2*H2 + sum(t[k-1] * T_k)``."""

    h1: object = 0
    h2: object = 0
    t: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "h1", rational(self.h1))
        object.__setattr__(self, "h2", rational(self.h2))
        object.__setattr__(self, "t", tuple(rational(x) for x in self.t))

    def coefficient(self, k):
        return self.t[k - 1] if 1 <= k <= len(self.t) else mpq(0)

    def matrix(self, r):
        gens = generators(r)
        m = mat_add(mat_scale(self.h1, gens.H1), mat_scale(self.h2, gens.H2))
        for k, c in enumerate(self.t, start=1):
            if k >= r:
                raise SizeError(f"T_{k} does not exist for r={r}")
            if c:
                m = mat_add(m, mat_scale(c, gens.T[k]))
        return m


def basis_elements(r):
    """``[(label, LieElement)]`` for H1, H2, T_1..T_{r-1}."""
    zeros = (0,) * (r - 1)
    out = [("H1", LieElement(1, 0, zeros)), ("H2", LieElement(0, 1, zeros))]
    for k in range(1, r):
        t = [0] * (r - 1)
        t[k - 1] = 1
        out.append((f"T{k}", LieElement(0, 0, tuple(t))))
    return out


def diag_shift(r, k, values):
    """``diag^{(k)}``: ``values[i]`` at position ``(i, i+k)``."""
    m = mat_zero(r)
    for i, v in enumerate(values):
        m[i][i + k] = rational(v)
    return m


@dataclass(frozen=True)
class GeneratorSet:
    r: int
    Y: tuple            # Y[l-1] is Y_l
    T: dict             # T[k] for k = 0..r-1
    H1: list
    H2: list
    # bases entering the determinant that defines Q1
    g_prime_basis: tuple = ()
    w_basis: tuple = ()


@lru_cache(maxsize=None)
def generators(r):
    _check_size(r)
    Y = []
    for ell in range(1, r + 2):
        Y.append([[mpq(1 if i + j == ell + 1 else 0) for j in range(1, r + 1)]
                  for i in range(1, r + 1)])
    T = {k: diag_shift(r, k, range(r - k, 0, -1)) for k in range(r)}
    eye = mat_identity(r)
    H1 = mat_sub(mat_scale(mpq(1, r), T[0]), mat_scale(mpq(1, 2), eye))
    H2 = mat_sub(eye, mat_scale(mpq(1, r), T[0]))
    g_prime = tuple([f"T{k}" for k in range(r - 1, 0, -1)] + [f"{r}*H2"])
    w = tuple(f"-Y*{l}" for l in range(2, r + 2))
    return GeneratorSet(r, tuple(Y), T, H1, H2, g_prime, w)


def build_subhankel_matrix(r):
    """The generic sub-Hankel matrix with entries ``y_{i+j-1}`` for ``i+j <= r+2``."""
    cfg = SpaceConfig(r)
    ys = cfg.y_vars()
    zero = Poly.zero(cfg.yctx)
    rows = [[ys[i + j - 2] if i + j <= r + 2 else zero for j in range(1, r + 1)]
            for i in range(1, r + 1)]
    return PolyMatrix.from_rows(rows, cfg.yctx)


def sh_coordinates(m):
    """Coordinates ``(y_1..y_{r+1})`` of a rational matrix in the sub-Hankel space.

    Raises ``ValueError`` if ``m`` is not of sub-Hankel shape.
    """
    r = len(m)
    y = [m[0][j] for j in range(r)] + [m[1][r - 1] if r > 1 else mpq(0)]
    for i in range(r):
        for j in range(r):
            s = i + j  # 0-indexed anti-diagonal
            expect = y[s] if s <= r else 0
            if m[i][j] != expect:
                raise ValueError(f"matrix is not sub-Hankel at ({i + 1},{j + 1})")
    return y


def _drho_of_matrix(x, r):
    gens = generators(r)
    cols = []
    for Yl in gens.Y:
        img = mat_add(mat_mul(x, Yl), mat_mul(Yl, mat_transpose(x)))
        cols.append(sh_coordinates(img))
    return [[cols[c][row] for c in range(r + 1)] for row in range(r + 1)]


def drho_matrix(x, r):
    """Matrix of ``drho(X)`` on y-coordinates (columns are images of ``Y_l``)."""
    return _drho_of_matrix(x.matrix(r), r)


def drho_dual_matrix(x, r):
    """Matrix of the contragredient ``drho*(X) = -drho(X)^T`` on z-coordinates."""
    return mat_scale(-1, mat_transpose(drho_matrix(x, r)))


def _apply(matrix, coords):
    out = []
    for row in matrix:
        acc = None
        for a, c in zip(row, coords):
            if a:
                term = c * a
                acc = term if acc is None else acc + term
        if acc is None:
            zero = next((c for c in coords if isinstance(c, Poly)), None)
            acc = Poly.zero(zero.ctx) if zero is not None else mpq(0)
        out.append(acc)
    return out


def drho(x, y, r=None):
    """Apply ``drho(X)`` to y-coordinates (rationals or polynomials)."""
    r = len(y) - 1 if r is None else r
    return _apply(drho_matrix(x, r), y)


def drho_dual(x, z, r=None):
    r = len(z) - 1 if r is None else r
    return _apply(drho_dual_matrix(x, r), z)


def lie_decompose(m, r):
    """Write a rational matrix as a :class:`LieElement`; ``ValueError`` if outside."""
    h1 = 2 * m[0][0]
    h2 = r * (m[1][1] - h1 * (mpq(1, 2) - mpq(1, r))) if r > 1 else mpq(0)
    t = tuple(m[0][k] / (r - k) for k in range(1, r))
    x = LieElement(h1, h2, t)
    if not mat_is_zero(mat_sub(x.matrix(r), m)):
        raise ValueError("matrix does not lie in the Lie algebra")
    return x


def verify_structure_constants(r):
    """Check the bracket relations and the action of ``T_k``, ``H1``, ``H2`` on ``Y_l``."""
    gens = generators(r)
    rep = IdentityReport(f"lie-structure r={r}")
    T, Y = gens.T, gens.Y

    def act(x, y):
        return mat_add(mat_mul(x, y), mat_mul(y, mat_transpose(x)))

    for k in range(r):
        for k2 in range(r):
            lhs = mat_commutator(T[k], T[k2])
            rhs = mat_scale(k2 - k, T[k + k2]) if k + k2 <= r - 1 else mat_zero(r)
            rep.record(lhs == rhs, f"[T{k},T{k2}]")
    for k in range(r):
        for ell in range(1, r + 2):
            lhs = act(T[k], Y[ell - 1])
            if ell - k >= 1:
                rhs = mat_scale(2 * r + 1 - k - ell, Y[ell - k - 1])
            else:
                rhs = mat_zero(r)
            rep.record(lhs == rhs, f"T{k} Y{ell} + Y{ell} T{k}^t")
    for k in range(1, r):
        rep.record(mat_commutator(gens.H1, T[k]) == mat_scale(mpq(k, r), T[k]), f"[H1,T{k}]")
        rep.record(mat_commutator(gens.H2, T[k]) == mat_scale(mpq(-k, r), T[k]), f"[H2,T{k}]")
    for ell in range(1, r + 2):
        Yl = Y[ell - 1]
        rep.record(act(gens.H1, Yl) == mat_scale(mpq(r + 1 - ell, r), Yl), f"H1 on Y{ell}")
        rep.record(act(gens.H2, Yl) == mat_scale(mpq(ell - 1, r), Yl), f"H2 on Y{ell}")
    return rep


# group ---------------------------------------------------------------------

def rational_power(x, e):
    """Exact ``x**e`` for rational ``e``; ``ValueError`` if the root is irrational."""
    x, e = rational(x), rational(e)
    if e.denominator == 1:
        return x ** int(e.numerator)
    if x <= 0:
        raise ValueError("fractional power of a non-positive rational")
    q = int(e.denominator)
    num, exact_n = gmpy2.iroot(gmpy2.mpz(x.numerator), q)
    den, exact_d = gmpy2.iroot(gmpy2.mpz(x.denominator), q)
    if not (exact_n and exact_d):
        raise ValueError(f"{x}**(1/{q}) is not rational")
    return mpq(num, den) ** int(e.numerator)


@dataclass(frozen=True)
class GroupElement:
    """An element ``n * a`` with ``n`` unipotent and ``a`` diagonal."""

    matrix: tuple
    a: tuple = None  # (a1, a2) when the element is diagonal

    @property
    def r(self):
        return len(self.matrix)

    def rows(self):
        return [list(row) for row in self.matrix]

    def diagonal_parameters(self):
        """``(a1, a2)`` recovered from the diagonal entries."""
        d1, d2 = self.matrix[0][0], self.matrix[1][1]
        a1 = d1 * d1
        return a1, a1 * (d2 / d1) ** self.r

    def character(self, weight):
        a1, a2 = self.diagonal_parameters()
        return weight.on_diagonal(a1, a2)


def nilpotent_exp(n):
    """``exp`` of a strictly upper triangular rational matrix (finite series)."""
    size = len(n)
    result = mat_identity(size)
    term = mat_identity(size)
    for k in range(1, size):
        term = mat_scale(mpq(1, k), mat_mul(term, n))
        if mat_is_zero(term):
            break
        result = mat_add(result, term)
    return result


def _freeze(m):
    return tuple(tuple(row) for row in m)


def diagonal_element(a1, a2, r):
    """The diagonal group element with character values ``(a1, a2)``."""
    a1, a2 = rational(a1), rational(a2)
    diag = [rational_power(a1, mpq(1, 2) - mpq(i, r)) * rational_power(a2, mpq(i, r))
            for i in range(r)]
    m = mat_zero(r)
    for i, d in enumerate(diag):
        m[i][i] = d
    return GroupElement(_freeze(m), (a1, a2))


def group_element(p, q, t, r=None):
    """``exp(sum t_k T_k) * a`` with ``a1 = q**(2r)`` and ``a2 = p**r``."""
    p, q = rational(p), rational(q)
    if p <= 0 or q <= 0:
        raise ValueError("p and q must be positive")
    r = len(t) + 1 if r is None else r
    if len(t) != r - 1:
        raise SizeError(f"expected {r - 1} nilpotent parameters, got {len(t)}")
    m = mat_zero(r)
    for i in range(r):
        m[i][i] = q ** (r - 2 * i) * p ** i
    a = GroupElement(_freeze(m), (q ** (2 * r), p ** r))
    if not any(t):
        return a
    n = LieElement(0, 0, t).matrix(r)
    return GroupElement(_freeze(mat_mul(nilpotent_exp(n), m)))


def rho_matrix(g):
    """Matrix of ``rho(g): y -> g y g^T`` on y-coordinates."""
    r = g.r
    gm = g.rows()
    gt = mat_transpose(gm)
    cols = [sh_coordinates(mat_mul(mat_mul(gm, Yl), gt)) for Yl in generators(r).Y]
    return [[cols[c][row] for c in range(r + 1)] for row in range(r + 1)]


def rho_dual_matrix(g):
    """Contragredient: the transpose of ``rho(g^{-1})``."""
    inv = GroupElement(_freeze(mat_inverse_upper(g.rows())))
    return mat_transpose(rho_matrix(inv))


def act(g, y):
    return _apply(rho_matrix(g), y)


def act_dual(g, z):
    return _apply(rho_dual_matrix(g), z)


# invariants -----------------------------------------------------------------

@dataclass(frozen=True)
class InvariantSet:
    r: int
    P1: Poly
    P2: Poly
    Q1: Poly
    Q2: Poly
    weights: dict
    q1_norm: object
    R: PolyMatrix

    def side(self, name):
        return "y" if name.startswith("P") else "z"

    def items(self):
        return [("P1", self.P1), ("P2", self.P2), ("Q1", self.Q1), ("Q2", self.Q2)]


def r_matrix(r):
    """The matrix of ``R(z)`` in the bases ``(T_{r-1},..,T_1, r H2)`` and ``(-Y*_2,..)``."""
    cfg = SpaceConfig(r)
    z = cfg.z_vars()
    zero_t = [0] * (r - 1)
    cols = []
    for k in range(r - 1, 0, -1):
        t = list(zero_t)
        t[k - 1] = 1
        cols.append(LieElement(0, 0, tuple(t)))
    cols.append(LieElement(0, r, tuple(zero_t)))
    images = [drho_dual(x, z, r) for x in cols]
    rows = [[-images[c][m] for c in range(r)] for m in range(1, r + 1)]
    return PolyMatrix.from_rows(rows, cfg.zctx)


def q1_normalization(r):
    return mpq((-1) ** (r + 1) * 2 ** ell2(r), factorial(r))


@lru_cache(maxsize=None)
def invariants(r):
    cfg = SpaceConfig(r)
    P1 = determinant(build_subhankel_matrix(r))
    P2 = Poly.var(cfg.yctx, f"y{r + 1}")
    R = r_matrix(r)
    norm = q1_normalization(r)
    Q1 = determinant(R).scale(norm)
    Q2 = Poly.var(cfg.zctx, "z1")
    weights = {
        "P1": CharacterWeight(1, r - 1),
        "P2": CharacterWeight(0, 1),
        "Q1": CharacterWeight(-r + 1, -1),
        # contragredient action scales z1 by 1/a1
        "Q2": CharacterWeight(-1, 0),
    }
    return InvariantSet(r, P1, P2, Q1, Q2, weights, norm, R)


def verify_infinitesimal_invariance(P, weight, side, r):
    """Check ``<grad P, drho(X) coords> == dnu(X) * P`` for every basis element."""
    cfg = SpaceConfig(r)
    if side == "y":
        names, coords, action = cfg.y_names, cfg.y_vars(), drho
        P = P.embed(cfg.yctx)
    elif side == "z":
        names, coords, action = cfg.z_names, cfg.z_vars(), drho_dual
        P = P.embed(cfg.zctx)
    else:
        raise ValueError(f"side must be 'y' or 'z', not {side!r}")
    grad = P.gradient(names)
    rep = IdentityReport(f"infinitesimal invariance r={r} side={side} weight={weight}")
    for label, x in basis_elements(r):
        field_ = action(x, coords, r)
        lhs = Poly.zero(P.ctx)
        for g, f in zip(grad, field_):
            if g and f:
                lhs = lhs + g * f
        rhs = P.scale(weight.differential(x))
        rep.record(lhs == rhs, f"{label}: {lhs} != {rhs}")
    return rep


def verify_determinant_characters(r):
    """Trace forms of the two determinant characters used to weight ``Q1``."""
    rep = IdentityReport(f"determinant characters r={r}")
    gens_gp = [x for label, x in basis_elements(r) if label != "H1"]
    rep.details["trace_W"] = {}
    rep.details["trace_ad_gprime"] = {}
    for label, x in basis_elements(r):
        dual = drho_dual_matrix(x, r)
        leaks = any(dual[0][c] for c in range(1, r + 1))
        rep.record(not leaks, f"{label}: drho* does not preserve W")
        trace_w = sum((dual[i][i] for i in range(1, r + 1)), mpq(0))
        want_w = -mpq(r - 1, 2) * x.h1 - mpq(r + 1, 2) * x.h2
        rep.record(trace_w == want_w, f"{label}: tr drho*|W = {trace_w}, want {want_w}")
        xm = x.matrix(r)
        trace_ad = mpq(0)
        for j, b in enumerate(gens_gp):
            img = lie_decompose(mat_commutator(xm, b.matrix(r)), r)
            if img.h1:
                rep.record(False, f"{label}: ad maps g' outside g'")
            # coordinate of the j-th basis vector of g' = (H2, T1, ...)
            trace_ad += img.h2 if j == 0 else img.coefficient(j)
        want_ad = mpq(r - 1, 2) * x.h1 - mpq(r - 1, 2) * x.h2
        rep.record(trace_ad == want_ad, f"{label}: tr ad|g' = {trace_ad}, want {want_ad}")
        rep.details["trace_W"][label] = trace_w
        rep.details["trace_ad_gprime"][label] = trace_ad
    return rep


# sampling ------------------------------------------------------------------

def random_rational(rng, bound=9):
    num = rng.randint(-bound, bound)
    den = rng.randint(1, bound)
    return mpq(num, den)


def random_point(poly_list, rng, bound=9, max_tries=1000):
    """Random rational point where every polynomial in ``poly_list`` is nonzero."""
    names = poly_list[0].ctx.names
    for _ in range(max_tries):
        point = {n: random_rational(rng, bound) for n in names}
        if all(p.evaluate(point) for p in poly_list):
            return [point[n] for n in names]
    raise SingularPointError("could not sample a non-singular point")


def random_group_element(r, rng, bound=4):
    p = mpq(rng.randint(1, bound), rng.randint(1, bound))
    q = mpq(rng.randint(1, bound), rng.randint(1, bound))
    t = tuple(random_rational(rng, bound) for _ in range(r - 1))
    return group_element(p, q, t, r)


def verify_group_invariance(r, samples=100, seed=DEFAULT_SEED, weights=None):
    """Check ``P(g.y) == nu(g) P(y)`` for the four invariants at random exact samples.

    ``weights`` overrides the characters by invariant name (for probing
    alternative weight claims); the default is ``invariants(r).weights``.
    """
    rng = random.Random(seed)
    inv = invariants(r)
    weights = {**inv.weights, **(weights or {})}
    cfg = SpaceConfig(r)
    rep = IdentityReport(f"group invariance r={r}")
    for i in range(samples):
        g = random_group_element(r, rng)
        y = random_point([inv.P1, inv.P2], rng)
        z = random_point([inv.Q1, inv.Q2], rng)
        gy = act(g, y)
        gz = act_dual(g, z)
        ypt, gypt = dict(zip(cfg.y_names, y)), dict(zip(cfg.y_names, gy))
        zpt, gzpt = dict(zip(cfg.z_names, z)), dict(zip(cfg.z_names, gz))
        for name, P in inv.items():
            before, after = (ypt, gypt) if name.startswith("P") else (zpt, gzpt)
            nu = g.character(weights[name])
            lhs, rhs = P.evaluate(after), nu * P.evaluate(before)
            rep.record(lhs == rhs, f"sample {i} {name}: {lhs} != {rhs}")
    return rep
