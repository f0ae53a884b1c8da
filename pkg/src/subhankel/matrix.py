"""Polynomial matrices and exact determinants.

Two flavours live here.  :class:`PolyMatrix` holds :class:`Poly` entries and
is used for symbolic determinants such as the sub-Hankel matrix.  Plain
rational matrices (lists of lists of ``mpq``) are handled by the small
``mat_*`` helpers, which the Lie algebra and group code use.
"""
from itertools import permutations

from gmpy2 import mpq

from .errors import ShapeError
from .poly import Context, Poly, exact_divide, rational


class PolyMatrix:
    """Row-major matrix of polynomials sharing one context."""

    __slots__ = ("rows", "cols", "entries", "ctx")

    def __init__(self, rows, cols, entries, ctx=None):
        if rows < 1 or cols < 1 or len(entries) != rows * cols:
            raise ShapeError(f"{len(entries)} entries do not fill a {rows}x{cols} matrix")
        if ctx is None:
            ctx = next((e.ctx for e in entries if isinstance(e, Poly)), Context(()))
            for e in entries:
                if isinstance(e, Poly):
                    ctx = ctx.merge(e.ctx)
        self.ctx = ctx
        self.rows = rows
        self.cols = cols
        self.entries = tuple(
            e.embed(ctx) if isinstance(e, Poly) else Poly.constant(ctx, e) for e in entries)

    @classmethod
    def from_rows(cls, rows, ctx=None):
        rows = [list(r) for r in rows]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged or empty row list")
        return cls(len(rows), len(rows[0]), [e for r in rows for e in r], ctx)

    @classmethod
    def identity(cls, n, ctx):
        return cls(n, n, [1 if i == j else 0 for i in range(n) for j in range(n)], ctx)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i):
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def to_rows(self):
        return [self.row(i) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, PolyMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in self.row(i)) for i in range(self.rows))
        return f"PolyMatrix([{body}])"

    def transpose(self):
        return PolyMatrix(self.cols, self.rows,
                          [self[i, j] for j in range(self.cols) for i in range(self.rows)],
                          self.ctx)

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError("shape mismatch in matrix addition")
        return PolyMatrix(self.rows, self.cols,
                          [a + b for a, b in zip(self.entries, other.entries)])

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise ShapeError(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
            out = []
            for i in range(self.rows):
                for j in range(other.cols):
                    acc = Poly.zero(self.ctx)
                    for k in range(self.cols):
                        a = self[i, k]
                        if a:
                            acc = acc + a * other[k, j]
                    out.append(acc)
            return PolyMatrix(self.rows, other.cols, out)
        return PolyMatrix(self.rows, self.cols, [e * other for e in self.entries], self.ctx)

    __rmul__ = __mul__

    def map(self, fn):
        return PolyMatrix(self.rows, self.cols, [fn(e) for e in self.entries])


def determinant(m):
    """Fraction-free (Bareiss) determinant of a square polynomial matrix."""
    if m.rows != m.cols:
        raise ShapeError(f"determinant of a non-square {m.rows}x{m.cols} matrix")
    n = m.rows
    a = [list(r) for r in m.to_rows()]
    sign = 1
    prev = Poly.constant(m.ctx, 1)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for i in range(k + 1, n):
                if not a[i][k].is_zero():
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return Poly.zero(m.ctx)
        pivot = a[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = exact_divide(num, prev) if k else num
            a[i][k] = Poly.zero(m.ctx)
        prev = pivot
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def cofactor_determinant(m):
    """Laplace expansion along the first row; the cross-check for small sizes."""
    if m.rows != m.cols:
        raise ShapeError(f"determinant of a non-square {m.rows}x{m.cols} matrix")

    def expand(rows):
        if len(rows) == 1:
            return rows[0][0]
        total = Poly.zero(m.ctx)
        for j, head in enumerate(rows[0]):
            if head.is_zero():
                continue
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            term = head * expand(minor)
            total = total + term if j % 2 == 0 else total - term
        return total

    return expand(m.to_rows())


def leibniz_determinant(m):
    """Sum over permutations; exponential, only for tiny oracles."""
    n = m.rows
    total = Poly.zero(m.ctx)
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Poly.constant(m.ctx, -1 if inversions % 2 else 1)
        for i, j in enumerate(perm):
            term = term * m[i, j]
        total = total + term
    return total


# rational matrices -----------------------------------------------------------

def mat(rows):
    return [[rational(x) for x in r] for r in rows]


def mat_zero(n, m=None):
    return [[mpq(0)] * (n if m is None else m) for _ in range(n)]


def mat_identity(n):
    return [[mpq(1 if i == j else 0) for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    inner = len(b)
    cols = len(b[0])
    return [[sum((a[i][k] * b[k][j] for k in range(inner) if a[i][k]), mpq(0))
             for j in range(cols)] for i in range(len(a))]


def mat_add(a, b):
    return [[x + y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_sub(a, b):
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def mat_scale(c, a):
    c = rational(c)
    return [[c * x for x in r] for r in a]


def mat_transpose(a):
    return [list(col) for col in zip(*a)]


def mat_commutator(a, b):
    return mat_sub(mat_mul(a, b), mat_mul(b, a))


def mat_is_zero(a):
    return all(not x for r in a for x in r)


def mat_trace(a):
    return sum((a[i][i] for i in range(len(a))), mpq(0))


def mat_inverse_upper(a):
    """Inverse of an invertible upper triangular rational matrix."""
    n = len(a)
    inv = mat_zero(n)
    for j in range(n):
        if not a[j][j]:
            raise ZeroDivisionError("singular triangular matrix")
    for i in reversed(range(n)):
        inv[i][i] = 1 / a[i][i]
        for j in range(i + 1, n):
            acc = sum((a[i][k] * inv[k][j] for k in range(i + 1, j + 1)), mpq(0))
            inv[i][j] = -acc / a[i][i]
    return inv
