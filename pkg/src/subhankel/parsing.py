"""Text form of polynomials: ``3/2*y1^2*y3 - y2 + 4``.

The printer lives in :meth:`Poly.__str__`; ``parse_poly(str(p)) == p`` holds
for every polynomial.
"""
import re

from gmpy2 import mpq

from .errors import ContextError, ParseError
from .poly import Context, Poly, natural_key

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[a-z][a-z0-9_]*)|(?P<op>[-+*/^])|(?P<bad>\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        kind = m.lastgroup
        start = m.start(kind)
        if kind == "bad":
            raise _error(text, start, f"unexpected character {m.group(kind)!r}")
        tokens.append((kind, m.group(kind), start))
    tokens.append(("end", "", len(text)))
    return tokens


def _error(text, offset, message):
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return ParseError(message, text, line, column)


def parse_poly(text, context=None):
    """Parse ``text``; without a context the variables are taken in natural order."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind=None, value=None):
        nonlocal pos
        tok = tokens[pos]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            got = tok[1] or "end of input"
            raise _error(text, tok[2], f"expected {want}, got {got!r}")
        pos += 1
        return tok

    terms = []  # (coeff, {name: exp})

    def factor(coeff, exps):
        tok = peek()
        if tok[0] == "num":
            take()
            value = mpq(int(tok[1]))
            if peek()[1] == "/" and peek()[0] == "op":
                take()
                den = take("num")
                if int(den[1]) == 0:
                    raise _error(text, den[2], "zero denominator")
                value /= int(den[1])
            return coeff * value
        if tok[0] == "name":
            take()
            e = 1
            if peek()[1] == "^":
                take()
                e = int(take("num")[1])
            exps[tok[1]] = exps.get(tok[1], 0) + e
            return coeff
        raise _error(text, tok[2], f"unexpected {tok[1] or 'end of input'!r}")

    def term(sign):
        coeff = mpq(sign)
        exps = {}
        coeff = factor(coeff, exps)
        while peek()[1] == "*":
            take()
            coeff = factor(coeff, exps)
        terms.append((coeff, exps))

    sign = 1
    if peek()[1] in "+-" and peek()[0] == "op":
        sign = -1 if take()[1] == "-" else 1
    term(sign)
    while peek()[0] != "end":
        tok = peek()
        if tok[1] not in ("+", "-"):
            raise _error(text, tok[2], f"unexpected {tok[1]!r}")
        take()
        term(-1 if tok[1] == "-" else 1)

    used = sorted({n for _, exps in terms for n in exps}, key=natural_key)
    if context is None:
        context = Context(used)
    elif not isinstance(context, Context):
        context = Context(context)
    for n in used:
        if n not in context:
            raise ContextError(f"unknown variable {n!r} for {context}")
    out = Poly.zero(context)
    for coeff, exps in terms:
        out = out + Poly.monomial(context, exps, coeff)
    return out
