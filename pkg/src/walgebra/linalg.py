"""Dense exact linear algebra over arbitrary-precision rationals.

Everything operates on lists of :class:`fractions.Fraction`.  Pivoting is
positional (first nonzero entry), never magnitude based, so every routine is
deterministic: the same input always yields the same echelon form, kernel
basis and solution vector.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import InvalidInput

Vec = list  # list[Fraction]
Mat = list  # list[list[Fraction]]

F0 = Fraction(0)
F1 = Fraction(1)


def frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(x)


def zeros(n: int) -> Vec:
    return [F0] * n


def zero_mat(m: int, n: int) -> Mat:
    return [[F0] * n for _ in range(m)]


def identity(n: int) -> Mat:
    return [[F1 if i == j else F0 for j in range(n)] for i in range(n)]


def vec_add(u: Vec, v: Vec) -> Vec:
    return [a + b for a, b in zip(u, v)]


def vec_sub(u: Vec, v: Vec) -> Vec:
    return [a - b for a, b in zip(u, v)]


def vec_scale(u: Vec, c: Fraction) -> Vec:
    return [c * a for a in u]


def vec_is_zero(u: Vec) -> bool:
    return all(a == 0 for a in u)


def vec_eq(u: Vec, v: Vec) -> bool:
    return len(u) == len(v) and all(a == b for a, b in zip(u, v))


def dot(u: Vec, v: Vec) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), F0)


def mat_vec(A: Mat, v: Vec) -> Vec:
    return [dot(row, v) for row in A]


def mat_mul(A: Mat, B: Mat) -> Mat:
    n = len(B)
    m = len(B[0]) if n else 0
    out = []
    for row in A:
        out.append([sum((row[k] * B[k][j] for k in range(n)), F0) for j in range(m)])
    return out


def transpose(A: Mat) -> Mat:
    if not A:
        return []
    return [list(col) for col in zip(*A)]


def mat_eq(A: Mat, B: Mat) -> bool:
    return len(A) == len(B) and all(vec_eq(r, s) for r, s in zip(A, B))


def rref(A: Mat) -> tuple[Mat, list[int]]:
    """Reduced row echelon form with the list of pivot columns."""
    R = [list(map(frac, row)) for row in A]
    nrows = len(R)
    ncols = len(R[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pr = None
        for i in range(r, nrows):
            if R[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        R[r], R[pr] = R[pr], R[r]
        pv = R[r][c]
        if pv != 1:
            R[r] = [x / pv for x in R[r]]
        for i in range(nrows):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [a - f * b for a, b in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return R, pivots


def rank(A: Mat) -> int:
    if not A:
        return 0
    return len(rref(A)[1])


def nullspace(A: Mat) -> list[Vec]:
    """Canonical kernel basis of ``A x = 0``.

    One basis vector per free column, ordered by ascending free column,
    with a 1 in the free slot.  Deterministic by construction.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    if ncols == 0:
        return []
    R, pivots = rref(A)
    pivot_set = set(pivots)
    basis = []
    for c in range(ncols):
        if c in pivot_set:
            continue
        v = zeros(ncols)
        v[c] = F1
        for r, pc in enumerate(pivots):
            v[pc] = -R[r][c]
        basis.append(v)
    return basis


def canonical_basis(vectors: list[Vec]) -> list[Vec]:
    """RREF-canonical basis of the span, lowest pivot column first."""
    R, pivots = rref(vectors)
    return [R[i] for i in range(len(pivots))]


def solve(A: Mat, b: Vec) -> tuple[Vec | None, int]:
    """Solve ``A x = b`` exactly.

    Returns ``(solution, n_free)`` where solution is any particular solution
    (free variables set to 0, deterministic) or None when inconsistent, and
    ``n_free`` counts the free columns.
    """
    nrows = len(A)
    ncols = len(A[0]) if nrows else 0
    aug = [list(map(frac, A[i])) + [frac(b[i])] for i in range(nrows)]
    R, pivots = rref(aug)
    if ncols in pivots:
        return None, 0
    x = zeros(ncols)
    for r, pc in enumerate(pivots):
        x[pc] = R[r][ncols]
    return x, ncols - len(pivots)


def solve_unique(A: Mat, b: Vec) -> Vec:
    x, n_free = solve(A, b)
    if x is None:
        raise InvalidInput("linear system is inconsistent")
    if n_free:
        raise InvalidInput("linear system is underdetermined (%d free)" % n_free)
    return x


def inverse(A: Mat) -> Mat:
    n = len(A)
    aug = [list(map(frac, A[i])) + identity(n)[i] for i in range(n)]
    R, pivots = rref(aug)
    if pivots != list(range(n)):
        raise InvalidInput("matrix is singular")
    return [row[n:] for row in R]


def det(A: Mat) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(A)
    M = [list(map(frac, row)) for row in A]
    sign = 1
    out = F1
    for c in range(n):
        pr = None
        for i in range(c, n):
            if M[i][c] != 0:
                pr = i
                break
        if pr is None:
            return F0
        if pr != c:
            M[c], M[pr] = M[pr], M[c]
            sign = -sign
        out *= M[c][c]
        inv = 1 / M[c][c]
        for i in range(c + 1, n):
            if M[i][c] != 0:
                f = M[i][c] * inv
                M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return sign * out
