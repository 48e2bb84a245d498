"""Finite-dimensional Lie algebras over exact rationals.

An algebra is given by structure constants on a fixed basis together with a
symmetric invariant nondegenerate bilinear form.  ``build_sl`` constructs
sl(n) with the trace form; ``sl2_triple_from_partition`` produces the
sl2-triple through a nilpotent built from lower-triangular Jordan blocks.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .errors import InvalidInput, StructureValidationError
from .linalg import F0, F1, Mat, Vec, frac


class LieAlgebra:
    """Lie algebra from structure constants plus an invariant form.

    ``brackets[(i, j)]`` is the sparse coordinate vector of [b_i, b_j]; both
    orientations are stored.  ``form`` is the dense Gram matrix (b_i | b_j).
    """

    def __init__(self, dim: int, basis_labels: list[str],
                 brackets: dict, form: Mat, validate: bool = True):
        self.dim = dim
        self.basis_labels = list(basis_labels)
        bk: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j), entry in brackets.items():
            cleaned = {k: frac(c) for k, c in entry.items() if c != 0}
            if cleaned:
                bk[(i, j)] = cleaned
        self.brackets = bk
        self.form = [[frac(x) for x in row] for row in form]
        if validate:
            self.validate()

    # -- basic operations ---------------------------------------------------

    def bracket_basis(self, i: int, j: int) -> dict[int, Fraction]:
        return self.brackets.get((i, j), {})

    def bracket(self, u: Vec, v: Vec) -> Vec:
        out = linalg.zeros(self.dim)
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                for k, c in self.bracket_basis(i, j).items():
                    out[k] += ui * vj * c
        return out

    def pair(self, u: Vec, v: Vec) -> Fraction:
        total = F0
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            row = self.form[i]
            for j, vj in enumerate(v):
                if vj != 0:
                    total += ui * vj * row[j]
        return total

    def ad(self, v: Vec) -> Mat:
        """Matrix of ad(v) acting on coordinate columns."""
        cols = []
        for j in range(self.dim):
            basis_j = linalg.zeros(self.dim)
            basis_j[j] = F1
            cols.append(self.bracket(v, basis_j))
        return linalg.transpose(cols)

    def basis_vector(self, i: int) -> Vec:
        v = linalg.zeros(self.dim)
        v[i] = F1
        return v

    # -- axioms --------------------------------------------------------------

    def validate(self) -> None:
        n = self.dim
        if len(self.form) != n or any(len(r) != n for r in self.form):
            raise StructureValidationError("form is not %d x %d" % (n, n))
        for (i, j) in self.brackets:
            if not (0 <= i < n and 0 <= j < n):
                raise StructureValidationError("bracket index (%d,%d) out of range" % (i, j))
        lab = self.basis_labels
        for i in range(n):
            got = self.bracket_basis(i, i)
            if got:
                raise StructureValidationError("[%s,%s] must vanish" % (lab[i], lab[i]))
            for j in range(i + 1, n):
                fwd = self.bracket_basis(i, j)
                rev = self.bracket_basis(j, i)
                keys = set(fwd) | set(rev)
                if any(fwd.get(k, F0) != -rev.get(k, F0) for k in keys):
                    raise StructureValidationError(
                        "antisymmetry fails on pair (%s,%s)" % (lab[i], lab[j]))
        basis = [self.basis_vector(i) for i in range(n)]
        pair_table = [[self.bracket(basis[i], basis[j]) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    acc = self.bracket(pair_table[i][j], basis[k])
                    acc = linalg.vec_add(acc, self.bracket(pair_table[j][k], basis[i]))
                    acc = linalg.vec_add(acc, self.bracket(pair_table[k][i], basis[j]))
                    if not linalg.vec_is_zero(acc):
                        raise StructureValidationError(
                            "Jacobi identity fails on triple (%s,%s,%s)" % (lab[i], lab[j], lab[k]))
        for i in range(n):
            for j in range(i + 1, n):
                if self.form[i][j] != self.form[j][i]:
                    raise StructureValidationError(
                        "form is not symmetric at (%s,%s)" % (lab[i], lab[j]))
        if linalg.rank(self.form) != n:
            raise StructureValidationError("form is degenerate (singular Gram matrix)")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    lhs = self.pair(pair_table[i][j], basis[k]) + self.pair(basis[j], pair_table[i][k])
                    if lhs != 0:
                        raise StructureValidationError(
                            "form invariance fails on triple (%s,%s,%s)" % (lab[i], lab[j], lab[k]))


@dataclass
class Sl2Triple:
    """Coordinates of an sl2-triple {e, h, f} with x = h/2."""

    e: Vec
    h: Vec
    f: Vec

    @property
    def x(self) -> Vec:
        return [c / 2 for c in self.h]

    def validate(self, alg: LieAlgebra) -> None:
        if not linalg.vec_eq(alg.bracket(self.h, self.e), linalg.vec_scale(self.e, frac(2))):
            raise StructureValidationError("[h,e] != 2e")
        if not linalg.vec_eq(alg.bracket(self.h, self.f), linalg.vec_scale(self.f, frac(-2))):
            raise StructureValidationError("[h,f] != -2f")
        if not linalg.vec_eq(alg.bracket(self.e, self.f), self.h):
            raise StructureValidationError("[e,f] != h")
        ad_f = alg.ad(self.f)
        power = linalg.identity(alg.dim)
        for _ in range(alg.dim + 1):
            power = linalg.mat_mul(ad_f, power)
            if all(linalg.vec_is_zero(row) for row in power):
                return
        raise StructureValidationError("ad f is not nilpotent")


# -- sl(n) construction -------------------------------------------------------


def _sl_basis_matrices(n: int) -> tuple[list[Mat], list[str]]:
    mats, labels = [], []
    sep = "," if n > 9 else ""
    for i in range(n):
        for j in range(n):
            if i != j:
                m = linalg.zero_mat(n, n)
                m[i][j] = F1
                mats.append(m)
                labels.append("E%d%s%d" % (i + 1, sep, j + 1))
    for i in range(n - 1):
        m = linalg.zero_mat(n, n)
        m[i][i] = F1
        m[i + 1][i + 1] = -F1
        mats.append(m)
        labels.append("H%d" % (i + 1))
    return mats, labels


def _sl_coords(n: int, m: Mat) -> Vec:
    # Off-diagonal entries map to E_ij coordinates, the traceless diagonal
    # to H_i coordinates via partial sums.
    coords = []
    for i in range(n):
        for j in range(n):
            if i != j:
                coords.append(m[i][j])
    acc = F0
    for i in range(n - 1):
        acc += m[i][i]
        coords.append(acc)
    return coords


def _mat_mul_nn(a: Mat, b: Mat) -> Mat:
    return linalg.mat_mul(a, b)


def _mat_trace(m: Mat) -> Fraction:
    return sum((m[i][i] for i in range(len(m))), F0)


def build_sl(n: int) -> LieAlgebra:
    """sl(n) on the basis E_ij (i != j, lexicographic) then H_i, trace form."""
    if n < 2:
        raise InvalidInput("build_sl needs n >= 2, got %r" % (n,))
    mats, labels = _sl_basis_matrices(n)
    dim = len(mats)
    brackets = {}
    for i in range(dim):
        for j in range(dim):
            if i == j:
                continue
            comm = [[a - b for a, b in zip(ra, rb)]
                    for ra, rb in zip(_mat_mul_nn(mats[i], mats[j]), _mat_mul_nn(mats[j], mats[i]))]
            coords = _sl_coords(n, comm)
            entry = {k: c for k, c in enumerate(coords) if c != 0}
            if entry:
                brackets[(i, j)] = entry
    form = [[_mat_trace(_mat_mul_nn(a, b)) for b in mats] for a in mats]
    return LieAlgebra(dim, labels, brackets, form)


def sl_matrix_to_coords(n: int, m: Mat) -> Vec:
    """Coordinates of a traceless n x n matrix in the build_sl(n) basis."""
    if _mat_trace(m) != 0:
        raise InvalidInput("matrix is not traceless")
    return _sl_coords(n, [[frac(x) for x in row] for row in m])


def sl2_triple_from_partition(alg: LieAlgebra, partition: list[int]) -> Sl2Triple:
    """Jordan-block sl2-triple in sl(n) for the given partition of n.

    f is the sum of lower-triangular Jordan blocks, h the standard diagonal
    (m-1, m-3, ..., 1-m) per block of size m, and e the matching raising
    matrix with entries r(m-r).  The algebra must come from build_sl.
    """
    import math

    n = math.isqrt(alg.dim + 1)
    if n * n - 1 != alg.dim or n < 2:
        raise InvalidInput("algebra of dim %d is not an sl(n)" % alg.dim)
    if any(p < 1 for p in partition) or sum(partition) != n:
        raise InvalidInput("partition %r does not sum to %d" % (partition, n))
    f_mat = linalg.zero_mat(n, n)
    e_mat = linalg.zero_mat(n, n)
    h_mat = linalg.zero_mat(n, n)
    offset = 0
    for m in partition:
        for r in range(1, m):
            f_mat[offset + r][offset + r - 1] = F1
            e_mat[offset + r - 1][offset + r] = frac(r * (m - r))
        for r in range(m):
            h_mat[offset + r][offset + r] = frac(m - 1 - 2 * r)
        offset += m
    triple = Sl2Triple(
        e=sl_matrix_to_coords(n, e_mat),
        h=sl_matrix_to_coords(n, h_mat),
        f=sl_matrix_to_coords(n, f_mat),
    )
    triple.validate(alg)
    return triple


def build_from_spec(spec: dict) -> LieAlgebra:
    """Construct and validate a custom algebra from a structured record.

    Expects ``dim``, ``brackets`` as [i, j, coeff-vector] rows and ``form``
    as a full matrix; rationals may be "p/q" strings.
    """
    try:
        dim = int(spec["dim"])
        rows = spec["brackets"]
        form = spec["form"]
    except KeyError as exc:
        raise InvalidInput("custom algebra spec is missing field %s" % exc) from None
    labels = spec.get("basis_labels") or ["b%d" % i for i in range(dim)]
    if len(labels) != dim:
        raise InvalidInput("basis_labels length != dim")
    brackets: dict[tuple[int, int], dict[int, Fraction]] = {}
    for row in rows:
        i, j, coeffs = int(row[0]), int(row[1]), row[2]
        if len(coeffs) != dim:
            raise InvalidInput("bracket row (%d,%d) has wrong length" % (i, j))
        entry = {k: parse_rational(c) for k, c in enumerate(coeffs) if parse_rational(c) != 0}
        if (i, j) in brackets and brackets[(i, j)] != entry:
            raise StructureValidationError("conflicting entries for bracket (%d,%d)" % (i, j))
        brackets[(i, j)] = entry
        rev = {k: -c for k, c in entry.items()}
        if (j, i) in brackets:
            if brackets[(j, i)] != rev:
                raise StructureValidationError(
                    "antisymmetry fails on pair (%s,%s)" % (labels[i], labels[j]))
        else:
            brackets[(j, i)] = rev
    form_m = [[parse_rational(x) for x in r] for r in form]
    return LieAlgebra(dim, labels, brackets, form_m)


def parse_rational(x) -> Fraction:
    """Accept Fraction, int, or a "p/q" / "p" string."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise InvalidInput("cannot read %r as an exact rational" % (x,))
