"""Constant-coefficient differential operators acting on formal powers.

A :class:`FormalElement` stands for

    numerator / prod(B_i ** m_i) * prod(B_i ** E_i)

where the ``B_i`` are polynomial bases, ``m_i`` non-negative integers and
``E_i = b_i + a_i*s`` exponents linear in a formal parameter ``s``.  The
numerator is an ordinary polynomial in the base variables and ``s``.
Differentiation uses

    d(N * prod B**E) = (dN + N * sum(E_i * dB_i / B_i)) * prod B**E

and only ever divides by declared bases, so no polynomial gcd is needed.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import reduce
from math import lcm

from gmpy2 import mpq

from .errors import ContextError, NotBIdentity, NotDivisible, Unsupported
from .legendre import verify_ml_closed_form
from .poly import Context, Poly, exact_divide, rational
from .report import FAIL, PASS, PASS_UP_TO_SIGN, CONSTANT_RATIO, IdentityReport
from .space import DEFAULT_SEED, SpaceConfig, ell2, invariants, random_rational

S = "s"
S_CTX = Context((S,))


@dataclass(frozen=True)
class LinExpS:
    """The exponent ``const + coef*s``."""

    const: object = 0
    coef: object = 0

    def __post_init__(self):
        object.__setattr__(self, "const", rational(self.const))
        object.__setattr__(self, "coef", rational(self.coef))

    def __add__(self, other):
        if isinstance(other, LinExpS):
            return LinExpS(self.const + other.const, self.coef + other.coef)
        return LinExpS(self.const + rational(other), self.coef)

    def __sub__(self, other):
        if isinstance(other, LinExpS):
            return LinExpS(self.const - other.const, self.coef - other.coef)
        return LinExpS(self.const - rational(other), self.coef)

    def __mul__(self, c):
        c = rational(c)
        return LinExpS(self.const * c, self.coef * c)

    __rmul__ = __mul__

    def is_constant(self):
        return not self.coef

    def is_zero(self):
        return not self.const and not self.coef

    def to_poly(self, ctx):
        return Poly.var(ctx, S).scale(self.coef) + self.const

    def __str__(self):
        if not self.coef:
            return str(self.const)
        head = "s" if self.coef == 1 else f"{self.coef}*s"
        if not self.const:
            return head
        sign = "-" if self.const < 0 else "+"
        return f"{head} {sign} {abs(self.const)}"


SHIFT = LinExpS(1, 1)  # s + 1


class PowerProduct:
    """``coefficient * prod(base ** exponent)`` with pairwise distinct, non-constant bases."""

    def __init__(self, factors, coefficient=1):
        bases = []
        exps = []
        ctx = None
        for base, e in factors:
            if not isinstance(e, LinExpS):
                e = LinExpS(e)
            if e.is_zero():
                continue
            if base.is_constant():
                raise ValueError(f"constant base {base} in a power product")
            if base in bases:
                raise ValueError(f"repeated base {base}")
            bases.append(base)
            exps.append(e)
            ctx = base.ctx if ctx is None else ctx.merge(base.ctx)
        self.ctx = ctx if ctx is not None else Context(())
        self.bases = tuple(b.embed(self.ctx) for b in bases)
        self.exponents = tuple(exps)
        self.coefficient = rational(coefficient)

    @property
    def factors(self):
        return list(zip(self.bases, self.exponents))

    def __eq__(self, other):
        return (isinstance(other, PowerProduct) and self.coefficient == other.coefficient
                and sorted(map(str, self.bases)) == sorted(map(str, other.bases))
                and dict(zip(map(str, self.bases), self.exponents))
                == dict(zip(map(str, other.bases), other.exponents)))

    def integer_exponents(self):
        out = []
        for e in self.exponents:
            if not e.is_constant() or e.const.denominator != 1:
                raise ValueError(f"exponent {e} is not an integer")
            out.append(int(e.const))
        return out

    def formal_power(self, shift=SHIFT):
        """Factors of ``(prod B**e) ** shift`` (the coefficient is left out)."""
        return tuple((b, shift * e) for b, e in zip(self.bases, self.integer_exponents()))

    def evaluate(self, point):
        value = self.coefficient
        for b, e in zip(self.bases, self.integer_exponents()):
            v = b.evaluate(point)
            if not v and e < 0:
                raise ZeroDivisionError(f"base {b} vanishes")
            value *= v ** e
        return value

    def degree(self):
        return sum(b.degree() * e for b, e in zip(self.bases, self.integer_exponents()))

    def __repr__(self):
        parts = [f"({b})^({e})" for b, e in self.factors]
        return f"PowerProduct({self.coefficient} * {' * '.join(parts)})"


class FormalElement:
    """``numerator / prod(B_i**m_i) * prod(B_i**E_i)``; see the module docstring."""

    __slots__ = ("numerator", "denominator", "bases", "exponents", "ctx")

    def __init__(self, numerator, denominator, factors):
        bases = tuple(b for b, _ in factors)
        ctx = numerator.ctx
        for b in bases:
            ctx = ctx.merge(b.ctx)
        if S not in ctx:
            ctx = ctx.extend((S,))
        self.ctx = ctx
        self.numerator = numerator.embed(ctx)
        self.bases = tuple(b.embed(ctx) for b in bases)
        self.exponents = tuple(e for _, e in factors)
        self.denominator = tuple(denominator)
        if len(self.denominator) != len(self.bases) or min(self.denominator, default=0) < 0:
            raise ValueError("denominator multiplicities must match the bases")

    @classmethod
    def power(cls, factors, numerator=None):
        """The bare formal power ``prod(B_i**E_i)`` (times ``numerator``)."""
        ctx = factors[0][0].ctx if factors else S_CTX
        for b, _ in factors:
            ctx = ctx.merge(b.ctx)
        ctx = ctx.extend((S,)) if S not in ctx else ctx
        num = Poly.constant(ctx, 1) if numerator is None else numerator
        return cls(num, (0,) * len(factors), factors)

    @property
    def factors(self):
        return tuple(zip(self.bases, self.exponents))

    def same_frame(self, other):
        return (self.exponents == other.exponents
                and all(a == b for a, b in zip(self.bases, other.bases))
                and len(self.bases) == len(other.bases))

    def __add__(self, other):
        if not self.same_frame(other):
            raise ValueError("formal elements attached to different powers")
        top = [max(a, b) for a, b in zip(self.denominator, other.denominator)]
        left = self.numerator
        right = other.numerator.embed(self.ctx)
        for b, t, ma, mb in zip(self.bases, top, self.denominator, other.denominator):
            if t > ma:
                left = left * b ** (t - ma)
            if t > mb:
                right = right * b ** (t - mb)
        return FormalElement(left + right, top, self.factors)

    def scale(self, c):
        return FormalElement(self.numerator.scale(c), self.denominator, self.factors)

    def mul_poly(self, p):
        return FormalElement(self.numerator * p, self.denominator, self.factors)

    def is_zero(self):
        return self.numerator.is_zero()

    def reduced(self, order=None):
        """Cancel base factors between numerator and denominator.

        ``order`` permutes the sequence in which bases are tried; the result is
        the same for pairwise coprime bases.
        """
        num = self.numerator
        den = list(self.denominator)
        if num.is_zero():
            return FormalElement(num, [0] * len(den), self.factors)
        for i in (order if order is not None else range(len(den))):
            while den[i]:
                try:
                    num = exact_divide(num, self.bases[i])
                except NotDivisible:
                    break
                den[i] -= 1
        return FormalElement(num, den, self.factors)

    def key(self):
        return (str(self.numerator), self.denominator, tuple(map(str, self.bases)),
                tuple(map(str, self.exponents)))

    def __eq__(self, other):
        if not isinstance(other, FormalElement) or not self.same_frame(other):
            return NotImplemented
        # cross-multiply so unreduced representatives compare equal
        a, b = self, other
        top = [max(x, y) for x, y in zip(a.denominator, b.denominator)]
        left, right = a.numerator, b.numerator
        for base, t, ma, mb in zip(a.bases, top, a.denominator, b.denominator):
            if t > ma:
                left = left * base ** (t - ma)
            if t > mb:
                right = right * base ** (t - mb)
        return left == right

    __hash__ = None

    def __repr__(self):
        den = " * ".join(f"({b})^{m}" for b, m in zip(self.bases, self.denominator) if m)
        att = " * ".join(f"({b})^({e})" for b, e in self.factors)
        return f"FormalElement(({self.numerator}) / [{den or '1'}] * {att})"


def differentiate(e, var, reduce_result=True):
    """Partial derivative of a formal element with respect to ``var``."""
    if var not in e.ctx or var == S:
        raise ContextError(f"cannot differentiate with respect to {var!r}")
    ctx = e.ctx
    partials = [b.derivative(var) for b in e.bases]
    active = [i for i, d in enumerate(partials) if not d.is_zero()]
    num = e.numerator
    dnum = num.derivative(var)
    if not active:
        out = FormalElement(dnum, e.denominator, e.factors)
        return out.reduced() if reduce_result else out
    prod_all = reduce(lambda a, b: a * b, (e.bases[i] for i in active))
    total = dnum * prod_all
    for i in active:
        others = Poly.constant(ctx, 1)
        for j in active:
            if j != i:
                others = others * e.bases[j]
        weight = (e.exponents[i] - e.denominator[i]).to_poly(ctx)
        total = total + num * weight * partials[i] * others
    den = list(e.denominator)
    for i in active:
        den[i] += 1
    out = FormalElement(total, den, e.factors)
    return out.reduced() if reduce_result else out


@dataclass
class BFunctionProblem:
    """``operator(d) base**(s+1) == predicted(s) * base**s``.

    The operator is written in the base's own variable names, each variable
    standing for the partial derivative with respect to it.
    """

    operator: Poly
    base: PowerProduct
    predicted: Poly = None

    def __post_init__(self):
        unknown = [v for v in self.operator.variables() if v not in self.base.ctx]
        if unknown:
            raise ContextError(f"operator variables {unknown} are not base variables")


def apply_operator(problem, shift=SHIFT):
    """Apply ``problem.operator(d)`` to ``base**shift`` (default ``s+1``)."""
    base = problem.base
    start = FormalElement.power(base.formal_power(shift))
    op = problem.operator
    names = op.ctx.names
    cache = {(0,) * len(names): start}

    def derived(alpha):
        got = cache.get(alpha)
        if got is not None:
            return got
        i = max(k for k, a in enumerate(alpha) if a)
        prev = alpha[:i] + (alpha[i] - 1,) + alpha[i + 1:]
        got = differentiate(derived(prev), names[i], reduce_result=False)
        cache[alpha] = got
        return got

    total = None
    for alpha, c in op.terms():
        piece = derived(alpha).scale(c)
        total = piece if total is None else total + piece
    if total is None:
        return FormalElement(Poly.zero(start.ctx), start.denominator, start.factors)
    return total.reduced()


def extract_b(result, base, shift=SHIFT):
    """Return ``b(s)`` with ``result == b(s) * base**(shift - 1)``.

    Raises :class:`NotBIdentity` when the quotient is not a polynomial in ``s``
    alone.  ``base.coefficient`` is folded in, so ``b`` refers to the power
    product including its constant.
    """
    expected = base.formal_power(shift)
    frame = FormalElement.power(expected)
    if not result.same_frame(frame):
        raise NotBIdentity("result is not attached to the expected power")
    exps = base.integer_exponents()
    num = result.numerator
    rest = Poly.constant(result.ctx, 1)
    for b, e, m in zip(result.bases, exps, result.denominator):
        d = e - m
        if d > 0:
            num = num * b ** d
        elif d < 0:
            rest = rest * b ** (-d)
    try:
        q = exact_divide(num, rest)
    except NotDivisible:
        raise NotBIdentity("quotient is not a polynomial", witness=str(rest)) from None
    base_vars = [v for v in q.ctx.names if v != S]
    if not q.free_of(base_vars):
        bad = next(m for m, _ in q.terms() if any(m[q.ctx.index[v]] for v in base_vars))
        witness = Poly._raw(q.ctx, {bad: q.coeffs[bad]})
        raise NotBIdentity("quotient depends on the base variables", witness=str(witness))
    b = q.embed(S_CTX) if q.variables() else Poly.constant(S_CTX, q.constant_value() if q else 0)
    return b.scale(base.coefficient)


# b-polynomial helpers ----------------------------------------------------------

def linear_product(roots, lead=1):
    """``lead * prod(s + a)`` as a polynomial in ``s``."""
    out = Poly.constant(S_CTX, lead)
    s = Poly.var(S_CTX, S)
    for a in roots:
        out = out * (s + rational(a))
    return out


def clear_denominators(p):
    den = lcm(*(int(c.denominator) for c in p.coeffs.values())) if p.coeffs else 1
    return p.scale(den)


def _divisors(n):
    n = abs(int(n))
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def factor_linear(p):
    """Split ``p(s)`` as ``lead * prod(s + a_i) * rest`` over rational roots.

    Returns ``(lead, [a_i ...], rest)`` with ``rest`` monic without rational roots.
    """
    p = p.embed(S_CTX) if p.variables() else Poly.constant(S_CTX, p.constant_value() if p else 0)
    if p.is_zero():
        return mpq(0), [], Poly.zero(S_CTX)
    lead = p.leading_term()[1]
    work = p.scale(1 / lead)
    shifts = []
    s = Poly.var(S_CTX, S)
    while work.degree() > 0:
        ints = clear_denominators(work)
        coeffs = {m[0]: c for m, c in ints.coeffs.items()}
        low = min(coeffs)
        if low > 0:
            shifts.append(mpq(0))
            work = exact_divide(work, s)
            continue
        found = None
        for num in _divisors(coeffs[0]):
            for den in _divisors(coeffs[max(coeffs)]):
                for root in (mpq(num, den), mpq(-num, den)):
                    if not work.evaluate({S: root}):
                        found = root
                        break
                if found is not None:
                    break
            if found is not None:
                break
        if found is None:
            break
        shifts.append(-found)
        work = exact_divide(work, s - found)
    return lead, sorted(shifts), work


def format_b(p):
    """Render ``b(s)`` as a product of monic linear factors, e.g. ``(s + 1)(s + 3/2)``."""
    lead, shifts, rest = factor_linear(p)
    if lead == 0:
        return "0"
    parts = []
    for a in shifts:
        if a == 0:
            parts.append("s")
        else:
            parts.append(f"(s {'-' if a < 0 else '+'} {abs(a)})")
    if rest.degree() > 0:
        parts.append(f"({rest})")
    body = "".join(parts) or "1"
    if lead == 1:
        return body
    if lead == -1:
        return "-" + body
    return f"{lead}*{body}"


def compare_b(measured, predicted):
    """``(status, ratio)`` comparing two b-polynomials with cleared denominators."""
    a = clear_denominators(predicted)
    scale = a.leading_term()[1] / predicted.leading_term()[1]
    m = measured.scale(scale)
    if m == a:
        return PASS, mpq(1)
    if m == -a:
        return PASS_UP_TO_SIGN, mpq(-1)
    if m.degree() == a.degree() and not m.is_zero():
        ratio = m.leading_term()[1] / a.leading_term()[1]
        if m == a.scale(ratio):
            return CONSTANT_RATIO, ratio
    return FAIL, None


# b-function of K --------------------------------------------------------------

def predicted_b_function(r):
    roots = [mpq(k, r - 1) for k in range(1, r)] + [mpq(r + 1, 2)]
    return linear_product(roots)


def normalized_q1_operator(r):
    """``Q1`` rescaled by ``(-1)**(r-1) / (2**(ell2(r)+r-1) * (r-1)**(r-1))``, in y-names."""
    inv = invariants(r)
    cfg = SpaceConfig(r)
    c = mpq((-1) ** (r - 1), 2 ** (ell2(r) + r - 1) * (r - 1) ** (r - 1))
    return inv.Q1.scale(c).rename(dict(zip(cfg.z_names, cfg.y_names)), cfg.yctx)


def k_power_product(r):
    """``K = P1**(r-1) * P2**(2r - r**2)``."""
    inv = invariants(r)
    return PowerProduct([(inv.P1, r - 1), (inv.P2, 2 * r - r * r)])


def b_function_problem(r):
    return BFunctionProblem(normalized_q1_operator(r), k_power_product(r),
                            predicted_b_function(r))


def _b_report(name, problem):
    rep = IdentityReport(name)
    result = apply_operator(problem)
    try:
        b = extract_b(result, problem.base)
    except NotBIdentity as exc:
        rep.record(False, str(exc))
        rep.details["witness"] = exc.witness
        return rep
    status, ratio = compare_b(b, problem.predicted)
    rep.checked += 1
    rep.status = status
    if status not in (PASS, PASS_UP_TO_SIGN):
        rep.failures.append(f"b(s) = {format_b(b)}, predicted {format_b(problem.predicted)}")
    rep.details.update({
        "b": b,
        "b_factored": format_b(b),
        "predicted": problem.predicted,
        "predicted_factored": format_b(problem.predicted),
        "ratio": ratio,
    })
    return rep


def b_function_check(r):
    """Compute ``b(s)`` for ``Q1~(d) K**(s+1) = b(s) K**s`` and compare with the prediction."""
    rep = _b_report(f"b-function r={r}", b_function_problem(r))
    rep.details["r"] = r
    return rep


def euler_check(r):
    """``sum(y_l * d/dy_l) K**(s+1) == r*(s+1) * K**(s+1)``."""
    cfg = SpaceConfig(r)
    K = k_power_product(r)
    start = FormalElement.power(K.formal_power())
    total = None
    for name in cfg.y_names:
        piece = differentiate(start, name, reduce_result=False).mul_poly(Poly.var(start.ctx, name))
        total = piece if total is None else total + piece
    total = total.reduced()
    want = FormalElement.power(K.formal_power(), SHIFT.to_poly(start.ctx).scale(K.degree()))
    rep = IdentityReport(f"euler r={r}")
    rep.record(total == want and not any(total.denominator), f"euler operator gave {total}")
    return rep


# polarization ----------------------------------------------------------------

_PREFIXES = "uvwpqabcdefghjkmnot"


def _fresh_prefix(ctx):
    for p in _PREFIXES:
        if not any(n.startswith(p) for n in ctx.names):
            return p
    raise ContextError("no free variable prefix left")


def polarize(f, prefix=None):
    """``F(x, u) = sum(df/dx_i * u_i) + f(x)`` over a fresh block ``u``."""
    prefix = prefix or _fresh_prefix(f.ctx)
    old = f.ctx.names
    new = tuple(f"{prefix}{i}" for i in range(1, len(old) + 1))
    ctx = f.ctx.extend(new)
    out = f.embed(ctx)
    for x, u in zip(old, new):
        d = f.derivative(x)
        if d:
            out = out + d.embed(ctx) * Poly.var(ctx, u)
    return out


def ml_polarization(f_star, d, eta_names, xi_names=None, variant="corrected"):
    """Transform of the polarization ``F(x, u)``, built from the transform of ``f``.

    ``f_star = c * prod(B_i ** e_i)`` lives on the ``xi`` variables, dual to
    ``x``; ``eta_names`` name the duals of the new block ``u``.  The default
    variant returns

        (d-1)**(1-d) * (grad f_star(eta) . xi - f_star(eta))**(d-1) * f_star(eta)**(2-d)

    as a power product whose first base is the expanded bracket numerator.
    ``variant="quoted"`` evaluates ``(grad f_star(xi) . eta - f_star(eta))**(d-1)
    * f_star(xi)**(2-d)`` instead; that form is only correct for ``d <= 2``.
    """
    xi_names = tuple(xi_names or f_star.ctx.names)
    eta_names = tuple(eta_names)
    if len(xi_names) != len(eta_names):
        raise ContextError("xi and eta blocks must have the same size")
    if variant == "quoted":
        return _ml_polarization_quoted(f_star, d, xi_names, eta_names)
    if variant != "corrected":
        raise ValueError(f"unknown variant {variant!r}")
    ctx = Context(xi_names + eta_names)
    to_eta = dict(zip(xi_names, eta_names))
    exps = f_star.integer_exponents()
    be = [b.rename(to_eta, ctx) for b in f_star.bases]
    xi = [Poly.var(ctx, n) for n in xi_names]

    # bracket = f_star(eta) * N / prod B_i(eta) with
    # N = sum(e_i * (grad B_i(eta) . xi) * prod_{j != i} B_j(eta)) - prod B_j(eta)
    prod_all = Poly.constant(ctx, 1)
    for b in be:
        prod_all = prod_all * b
    N = -prod_all
    for i, (b, e) in enumerate(zip(be, exps)):
        D = Poly.zero(ctx)
        for w, x in zip(eta_names, xi):
            db = b.derivative(w)
            if db:
                D = D + db * x
        term = D.scale(e)
        for j, other in enumerate(be):
            if j != i:
                term = term * other
        N = N + term
    n_exp = d - 1
    eta_exp = [e - n_exp for e in exps]
    for i, b in enumerate(be):
        while n_exp and not N.is_constant():
            try:
                N = exact_divide(N, b)
            except NotDivisible:
                break
            eta_exp[i] += n_exp
    coeff = f_star.coefficient * (mpq(d - 1) ** (1 - d) if d != 1 else 1)
    return _assemble(coeff, N, n_exp, list(zip(be, eta_exp)))


def _assemble(coeff, N, n_exp, rest):
    if not n_exp:
        factors = []
    elif N.is_constant():
        coeff *= N.constant_value() ** n_exp
        factors = []
    else:
        lead = N.leading_term()[1]
        coeff *= lead ** n_exp
        factors = [(N.scale(1 / lead), n_exp)]
    return PowerProduct(factors + rest, coeff)


def _ml_polarization_quoted(f_star, d, xi_names, eta_names):
    ctx = Context(xi_names + eta_names)
    to_eta = dict(zip(xi_names, eta_names))
    exps = f_star.integer_exponents()
    bx = [b.embed(ctx) for b in f_star.bases]
    be = [b.rename(to_eta, ctx) for b in f_star.bases]
    eta = [Poly.var(ctx, n) for n in eta_names]
    one = Poly.constant(ctx, 1)

    # grad f_star(xi) . eta = f_star(xi) * sum(e_i * D_i / B_i)
    S_sum = Poly.zero(ctx)
    for i, (b, e) in enumerate(zip(bx, exps)):
        D = Poly.zero(ctx)
        for x, w in zip(xi_names, eta):
            db = b.derivative(x)
            if db:
                D = D + db * w
        term = D.scale(e)
        for j, other in enumerate(bx):
            if j != i:
                term = term * other
        S_sum = S_sum + term
    # bracket / c = S_sum * prod B(xi)**(e-1) - prod B(eta)**e
    num_xi = den_xi = num_eta = den_eta = one
    for b, e in zip(bx, exps):
        if e - 1 > 0:
            num_xi = num_xi * b ** (e - 1)
        elif e - 1 < 0:
            den_xi = den_xi * b ** (1 - e)
    for b, e in zip(be, exps):
        if e > 0:
            num_eta = num_eta * b ** e
        elif e < 0:
            den_eta = den_eta * b ** (-e)
    N = S_sum * num_xi * den_eta - num_eta * den_xi
    n_exp = d - 1
    xi_exp = [e * (2 - d) - (n_exp * (1 - e) if e < 1 else 0) for e in exps]
    eta_exp = [-(n_exp * -e) if e < 0 else 0 for e in exps]
    coeff = f_star.coefficient * (mpq(d - 1) ** (1 - d) if d != 1 else 1)
    return _assemble(coeff, N, n_exp, list(zip(bx, xi_exp)) + list(zip(be, eta_exp)))


def ml_pointwise_check(F, F_star, pairing, samples=10, seed=None, bound=9):
    """Check ``F(x) * F_star(grad log F(x)) == const`` at random points.

    ``pairing`` maps each variable of ``F`` to its dual variable in ``F_star``.
    Returns ``(ok, constant, values)``.
    """
    rng = random.Random(DEFAULT_SEED if seed is None else seed)
    names = F.ctx.names
    grads = {n: F.derivative(n) for n in names}
    values = []
    tries = 0
    while len(values) < samples:
        tries += 1
        if tries > 50 * samples:
            raise Unsupported("could not sample admissible points")
        point = {n: random_rational(rng, bound) for n in names}
        fv = F.evaluate(point)
        if not fv:
            continue
        dual = {pairing[n]: grads[n].evaluate(point) / fv for n in names}
        try:
            gv = F_star.evaluate(dual)
        except ZeroDivisionError:
            continue
        values.append(fv * gv)
    return all(v == values[0] for v in values), values[0], values


# polarized b-function ---------------------------------------------------------

def predicted_polarized_b_function(r, k):
    roots = [mpq(i, r - 1) for i in range(1, r)] + [mpq((r + 1) * 2 ** k, 2)]
    return linear_product(roots)


def ml_of_p1(r):
    """``ML(P1) = c * Q1**(r-1) * Q2**(2r - r**2)`` with the measured constant."""
    inv = invariants(r)
    ml = verify_ml_closed_form(r, "P-to-Q")
    if ml.constant is None:
        raise Unsupported("ML(P1) is not proportional to the expected power product")
    return PowerProduct([(inv.Q1, r - 1), (inv.Q2, 2 * r - r * r)], ml.constant)


def polarization_tower(r, k):
    """``(F_k, H_k, pairing)`` after ``k`` polarizations of ``P1``.

    ``pairing`` maps each variable of ``F_k`` to its dual variable in ``H_k``.
    """
    inv = invariants(r)
    cfg = SpaceConfig(r)
    F = inv.P1
    H = ml_of_p1(r)
    pairing = dict(zip(cfg.y_names, cfg.z_names))
    for _ in range(k):
        prefix = _fresh_prefix(F.ctx)
        old = F.ctx.names
        F = polarize(F, prefix)
        new = F.ctx.names[len(old):]
        eta = tuple("d" + n for n in new)
        H = ml_polarization(H, r, eta, xi_names=tuple(pairing[n] for n in old))
        pairing.update(zip(new, eta))
    return F, H, pairing


def polarized_b_function_problem(r, k):
    F, H, pairing = polarization_tower(r, k)
    op = F.rename(pairing, H.ctx)
    return BFunctionProblem(op, H, predicted_polarized_b_function(r, k))


def polarized_b_function_check(r, k, max_base_terms=5000):
    """b-function of the ``k``-fold polarization of ``P1`` against its transform.

    ``F_k`` acts as the differential operator on ``H_k**(s+1)``.  Problems whose
    compound base is too large for desk-scale computation are reported as
    unsupported with a diagnostic instead of being attempted.
    """
    if k == 0:
        rep = b_function_check(r)
        rep.name = f"polarized b-function r={r} k=0"
        return rep
    problem = polarized_b_function_problem(r, k)
    sizes = [len(b) for b in problem.base.bases]
    rep = IdentityReport(f"polarized b-function r={r} k={k}")
    rep.details.update({"r": r, "k": k, "base_terms": sizes,
                        "operator_terms": len(problem.operator),
                        "predicted": problem.predicted,
                        "predicted_factored": format_b(problem.predicted)})
    if max(sizes) > max_base_terms:
        rep.status = "unsupported"
        rep.details["diagnostic"] = {
            "reason": "compound base too large for exact formal differentiation",
            "largest_base_terms": max(sizes), "limit": max_base_terms}
        return rep
    inner = _b_report(rep.name, problem)
    inner.details.update(rep.details)
    return inner
