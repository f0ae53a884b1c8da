"""Sparse multivariate polynomials with exact rational coefficients.

A :class:`Poly` is a map from exponent tuples to nonzero rationals, tied to a
:class:`Context` that fixes the variable order.  Coefficients are stored as
``gmpy2.mpq``; they compare and hash equal to ``int`` and ``Fraction``.

Terms are kept in graded lexicographic order (total degree first, then the
exponent vector compared in context order), which is the order used for
printing and for the leading term in :func:`exact_divide`.
"""
from __future__ import annotations

import heapq
import re
from fractions import Fraction
from operator import add

from gmpy2 import mpq, mpz

from .errors import ContextError, DivisionByZero, NotDivisible

NAME_RE = re.compile(r"[a-z][a-z0-9_]*\Z")

_RATIONAL_TYPES = (int, Fraction, type(mpz(0)), type(mpq(0)))


def rational(value):
    """Coerce ``value`` to an exact rational (``mpq``).  Floats are refused."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, _RATIONAL_TYPES):
        return mpq(value)
    if isinstance(value, str):
        return mpq(value.strip())
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def natural_key(name):
    """Sort key placing ``y2`` before ``y10``."""
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


class Context:
    """An ordered tuple of distinct variable names.

    Contexts are interned: building the same name tuple twice returns the same
    object, so the common case of operands sharing a context is an identity
    check.
    """

    __slots__ = ("names", "index")
    _interned: dict = {}

    def __new__(cls, names):
        names = tuple(names)
        ctx = cls._interned.get(names)
        if ctx is not None:
            return ctx
        for n in names:
            if not isinstance(n, str) or not NAME_RE.match(n):
                raise ContextError(f"invalid variable name {n!r}")
        if len(set(names)) != len(names):
            raise ContextError(f"duplicate variable names in {names}")
        ctx = super().__new__(cls)
        ctx.names = names
        ctx.index = {n: i for i, n in enumerate(names)}
        cls._interned[names] = ctx
        return ctx

    def __len__(self):
        return len(self.names)

    def __iter__(self):
        return iter(self.names)

    def __contains__(self, name):
        return name in self.index

    def __repr__(self):
        return f"Context({', '.join(self.names)})"

    def __reduce__(self):
        return (Context, (self.names,))

    def merge(self, other):
        """Union by name: our names first, then the other's new names.

        Shared names must appear in the same relative order in both contexts.
        """
        if other is self:
            return self
        ours = [n for n in self.names if n in other.index]
        theirs = [n for n in other.names if n in self.index]
        if ours != theirs:
            raise ContextError(
                f"contexts order shared variables differently: {ours} vs {theirs}")
        extra = tuple(n for n in other.names if n not in self.index)
        return Context(self.names + extra) if extra else self

    def extend(self, names):
        return self.merge(Context(names))


def _term_key(mono):
    return (sum(mono), mono)


class Poly:
    """Immutable sparse polynomial over the rationals."""

    __slots__ = ("ctx", "coeffs", "_hash")

    def __init__(self, ctx, coeffs=None):
        if not isinstance(ctx, Context):
            ctx = Context(ctx)
        self.ctx = ctx
        self.coeffs = {}
        self._hash = None
        if coeffs:
            n = len(ctx)
            for mono, c in coeffs.items():
                mono = tuple(mono)
                if len(mono) != n or any(e < 0 for e in mono):
                    raise ContextError(f"bad exponent vector {mono} for {ctx}")
                c = rational(c)
                if c:
                    self.coeffs[mono] = c

    @classmethod
    def _raw(cls, ctx, coeffs):
        # coeffs already clean: right-length tuples, nonzero mpq values
        p = object.__new__(cls)
        p.ctx = ctx
        p.coeffs = coeffs
        p._hash = None
        return p

    # construction helpers -------------------------------------------------

    @classmethod
    def zero(cls, ctx):
        return cls._raw(Context(ctx) if not isinstance(ctx, Context) else ctx, {})

    @classmethod
    def constant(cls, ctx, value):
        ctx = ctx if isinstance(ctx, Context) else Context(ctx)
        c = rational(value)
        return cls._raw(ctx, {(0,) * len(ctx): c} if c else {})

    @classmethod
    def var(cls, ctx, name, power=1):
        ctx = ctx if isinstance(ctx, Context) else Context(ctx)
        if name not in ctx:
            raise ContextError(f"unknown variable {name!r} in {ctx}")
        mono = [0] * len(ctx)
        mono[ctx.index[name]] = power
        return cls._raw(ctx, {tuple(mono): mpq(1)})

    @classmethod
    def monomial(cls, ctx, exponents, coeff=1):
        """``coeff * prod(v**e)`` from a name -> exponent mapping."""
        ctx = ctx if isinstance(ctx, Context) else Context(ctx)
        mono = [0] * len(ctx)
        for name, e in exponents.items():
            if name not in ctx:
                raise ContextError(f"unknown variable {name!r} in {ctx}")
            mono[ctx.index[name]] = e
        return cls(ctx, {tuple(mono): coeff})

    # basic queries ---------------------------------------------------------

    def __bool__(self):
        return bool(self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def is_constant(self):
        return not self.coeffs or (len(self.coeffs) == 1 and not any(next(iter(self.coeffs))))

    def constant_value(self):
        """Return the value of a constant polynomial."""
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return next(iter(self.coeffs.values()), mpq(0))

    def is_monomial(self):
        return len(self.coeffs) == 1

    def terms(self):
        """``(exponents, coeff)`` pairs in canonical (descending grlex) order."""
        return sorted(self.coeffs.items(), key=lambda t: _term_key(t[0]), reverse=True)

    def leading_term(self):
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading term")
        mono = max(self.coeffs, key=_term_key)
        return mono, self.coeffs[mono]

    def degree(self, name=None):
        if not self.coeffs:
            return -1
        if name is None:
            return max(sum(m) for m in self.coeffs)
        if name not in self.ctx:
            return 0
        i = self.ctx.index[name]
        return max(m[i] for m in self.coeffs)

    def is_homogeneous(self):
        return len({sum(m) for m in self.coeffs}) <= 1

    def variables(self):
        """Names that actually occur, in context order."""
        used = [False] * len(self.ctx)
        for m in self.coeffs:
            for i, e in enumerate(m):
                if e:
                    used[i] = True
        return tuple(n for n, u in zip(self.ctx.names, used) if u)

    def free_of(self, names):
        idx = [self.ctx.index[n] for n in names if n in self.ctx]
        return all(not m[i] for m in self.coeffs for i in idx)

    def named_terms(self):
        """Context-independent view: ``{((name, exp), ...): coeff}``."""
        names = self.ctx.names
        return {tuple(sorted((names[i], e) for i, e in enumerate(m) if e)): c
                for m, c in self.coeffs.items()}

    # context handling ------------------------------------------------------

    def embed(self, ctx):
        """Re-express in ``ctx``, which must contain every variable in use."""
        if not isinstance(ctx, Context):
            ctx = Context(ctx)
        if ctx is self.ctx:
            return self
        src = self.ctx.names
        positions = []
        for i, n in enumerate(src):
            positions.append(ctx.index.get(n, -1))
        n_out = len(ctx)
        out = {}
        for m, c in self.coeffs.items():
            new = [0] * n_out
            for i, e in enumerate(m):
                if e:
                    j = positions[i]
                    if j < 0:
                        raise ContextError(f"variable {src[i]!r} missing from {ctx}")
                    new[j] = e
            out[tuple(new)] = c
        return Poly._raw(ctx, out)

    def rename(self, mapping, ctx=None):
        """Rename variables; unmapped names keep their name."""
        new_names = [mapping.get(n, n) for n in self.ctx.names]
        moved = Poly._raw(Context(new_names), self.coeffs)
        return moved.embed(ctx) if ctx is not None else moved

    def _coerce(self, other):
        if isinstance(other, Poly):
            if other.ctx is self.ctx:
                return self, other
            ctx = self.ctx.merge(other.ctx)
            return self.embed(ctx), other.embed(ctx)
        return self, Poly.constant(self.ctx, other)

    # arithmetic --------------------------------------------------------------

    def __add__(self, other):
        a, b = self._coerce(other)
        out = dict(a.coeffs)
        for m, c in b.coeffs.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v:
                    out[m] = v
                else:
                    del out[m]
        return Poly._raw(a.ctx, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.ctx, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        a, b = self._coerce(other)
        return a + (-b)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = rational(c)
        if not c:
            return Poly._raw(self.ctx, {})
        return Poly._raw(self.ctx, {m: v * c for m, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        a, b = self._coerce(other)
        if len(a.coeffs) < len(b.coeffs):
            a, b = b, a
        out = {}
        get = out.get
        bitems = list(b.coeffs.items())
        for ma, ca in a.coeffs.items():
            for mb, cb in bitems:
                m = tuple(map(add, ma, mb))
                v = get(m)
                out[m] = ca * cb if v is None else v + ca * cb
        return Poly._raw(a.ctx, {m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Poly):
            return exact_divide(self, other)
        c = rational(other)
        if not c:
            raise DivisionByZero("division by zero")
        return self.scale(1 / c)

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Poly.constant(self.ctx, 1)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            if other.ctx is self.ctx:
                return self.coeffs == other.coeffs
            return self.named_terms() == other.named_terms()
        try:
            c = rational(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_value() == c

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.named_terms().items()))
        return self._hash

    # calculus and evaluation ---------------------------------------------

    def derivative(self, name):
        if name not in self.ctx:
            raise ContextError(f"unknown variable {name!r} in {self.ctx}")
        i = self.ctx.index[name]
        out = {}
        for m, c in self.coeffs.items():
            e = m[i]
            if e:
                out[m[:i] + (e - 1,) + m[i + 1:]] = c * e
        return Poly._raw(self.ctx, out)

    def gradient(self, names=None):
        return [self.derivative(n) for n in (names or self.ctx.names)]

    def substitute(self, bindings):
        """Simultaneously replace variables by polynomials or rationals."""
        for name in bindings:
            if name not in self.ctx:
                raise ContextError(f"unknown variable {name!r} in {self.ctx}")
        ctx = self.ctx
        for v in bindings.values():
            if isinstance(v, Poly):
                ctx = ctx.merge(v.ctx)
        bound = {}
        for name, v in bindings.items():
            bound[self.ctx.index[name]] = (
                v.embed(ctx) if isinstance(v, Poly) else Poly.constant(ctx, v))
        keep_ctx_positions = [ctx.index[n] for n in self.ctx.names]
        powers = {i: [Poly.constant(ctx, 1)] for i in bound}

        def power(i, e):
            cache = powers[i]
            while len(cache) <= e:
                cache.append(cache[-1] * bound[i])
            return cache[e]

        out = {}
        n_out = len(ctx)
        for m, c in self.coeffs.items():
            free = [0] * n_out
            factor = None
            for i, e in enumerate(m):
                if not e:
                    continue
                if i in bound:
                    f = power(i, e)
                    factor = f if factor is None else factor * f
                else:
                    free[keep_ctx_positions[i]] = e
            free = tuple(free)
            if factor is None:
                out[free] = out.get(free, 0) + c
                continue
            for fm, fc in factor.coeffs.items():
                nm = tuple(map(add, fm, free))
                out[nm] = out.get(nm, 0) + c * fc
        return Poly._raw(ctx, {m: mpq(c) for m, c in out.items() if c})

    def evaluate(self, point):
        """Evaluate at a full assignment ``{name: rational}``."""
        idx = self.ctx.index
        values = {}
        for name, v in point.items():
            if name in idx:
                values[idx[name]] = rational(v)
        total = mpq(0)
        cache = {}
        for m, c in self.coeffs.items():
            term = c
            for i, e in enumerate(m):
                if e:
                    if i not in values:
                        raise ContextError(f"variable {self.ctx.names[i]!r} is unbound")
                    key = (i, e)
                    p = cache.get(key)
                    if p is None:
                        p = cache[key] = values[i] ** e
                    term = term * p
            total += term
        return total

    # printing ------------------------------------------------------------

    def __str__(self):
        if not self.coeffs:
            return "0"
        names = self.ctx.names
        parts = []
        for k, (m, c) in enumerate(self.terms()):
            factors = []
            for i, e in enumerate(m):
                if e == 1:
                    factors.append(names[i])
                elif e:
                    factors.append(f"{names[i]}^{e}")
            mag = abs(c)
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if k == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"Poly({str(self)!r})"


def exact_divide(p, q):
    """Return ``h`` with ``p == q * h``; raise :class:`NotDivisible` otherwise."""
    if not isinstance(q, Poly):
        q = Poly.constant(p.ctx, q)
    if q.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    p, q = p._coerce(q)
    ctx = p.ctx
    if q.is_constant():
        return p.scale(1 / q.constant_value())
    if len(q.coeffs) == 1:
        (qm, qc), = q.coeffs.items()
        out = {}
        for m, c in p.coeffs.items():
            d = tuple(a - b for a, b in zip(m, qm))
            if min(d) < 0:
                raise NotDivisible(f"monomial {q} does not divide {p}")
            out[d] = c / qc
        return Poly._raw(ctx, out)

    lq_m, lq_c = q.leading_term()
    rest = [(m, c) for m, c in q.coeffs.items() if m != lq_m]
    rem = dict(p.coeffs)
    heap = [((-sum(m), tuple(-e for e in m)), m) for m in rem]
    heapq.heapify(heap)
    quot = {}
    lq_deg = sum(lq_m)
    while heap:
        _, m = heapq.heappop(heap)
        c = rem.pop(m, None)
        if c is None:
            continue
        if sum(m) < lq_deg:
            raise NotDivisible(f"{q} does not divide the dividend")
        qm = tuple(a - b for a, b in zip(m, lq_m))
        if min(qm) < 0:
            raise NotDivisible(f"{q} does not divide the dividend")
        qc = c / lq_c
        quot[qm] = qc
        for om, oc in rest:
            nm = tuple(map(add, qm, om))
            v = rem.get(nm)
            if v is None:
                rem[nm] = -qc * oc
                heapq.heappush(heap, ((-sum(nm), tuple(-e for e in nm)), nm))
            else:
                v = v - qc * oc
                if v:
                    rem[nm] = v
                else:
                    del rem[nm]
    return Poly._raw(ctx, quot)


def divides(q, p):
    try:
        exact_divide(p, q)
    except NotDivisible:
        return False
    return True


def variables(ctx):
    """Return the generators of ``ctx`` as polynomials, in order."""
    ctx = ctx if isinstance(ctx, Context) else Context(ctx)
    return [Poly.var(ctx, n) for n in ctx.names]
