"""ad x grading, centralizer bases and the dual-basis machinery.

Given an algebra and an sl2-triple {e, h = 2x, f}, ``graded_setup`` rebuilds
the algebra on a canonical ad x eigenbasis and assembles:

* doubled grades (all half-integer bookkeeping is stored doubled, as ints),
* the centralizer basis {q_j} of g^f (RREF-canonical inside each grade) and
  the dual basis {q^j} of g^e with (q_i | q^j) = delta_ij,
* the full dual pair of bases Q[j,n] = (ad f)^n q^j and
  D[j,n] = (-1)^n / (n!^2 binom(2 delta_j, n)) (ad e)^n q_j,
* the index sets J_{-k} and the four projections of
  g = g^f + [e,g] = g^e + [f,g].

All returned vectors are coordinates in the adapted basis.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

from . import linalg
from .errors import (FormPairingError, InternalConsistencyError, InvalidInput,
                     StructureValidationError)
from .liealg import LieAlgebra, Sl2Triple
from .linalg import F0, F1, Mat, Vec, frac


class GradedSetup:
    """Immutable bundle of grading data; built through :func:`graded_setup`."""

    def __init__(self, alg, orig_alg, to_adapted, from_adapted, triple,
                 grade2, depth2, jf_delta2, qj, qjup, qjn, qjn_dual, s,
                 principal):
        self.alg: LieAlgebra = alg
        self.orig_alg: LieAlgebra = orig_alg
        self.to_adapted: Mat = to_adapted
        self.from_adapted: Mat = from_adapted
        self.triple: Sl2Triple = triple
        self.grade2: list[int] = grade2          # doubled ad x eigenvalue per basis index
        self.depth2: int = depth2                # 2d
        self.jf_delta2: list[int] = jf_delta2    # doubled delta(j) per j in Jf
        self.qj: list[Vec] = qj                  # basis of g^f
        self.qjup: list[Vec] = qjup              # dual basis of g^e
        self.qjn: dict = qjn                     # (j, n) -> Q[j,n] = (ad f)^n q^j
        self.qjn_dual: dict = qjn_dual           # (j, n) -> D[j,n]
        self.s: Vec = s
        self.principal = principal               # True / False / None (unknown)
        self._calc = None                        # lazy differential-calculus cache

    # pickling: the calculus cache is a memo of pure functions, rebuild lazily
    def __getstate__(self):
        state = dict(self.__dict__)
        state["_calc"] = None
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)

    # -- basics ---------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def ell(self) -> int:
        return len(self.jf_delta2)

    def adapt(self, v: Vec) -> Vec:
        """Original coordinates -> adapted coordinates."""
        return linalg.mat_vec(self.to_adapted, v)

    def unadapt(self, v: Vec) -> Vec:
        return linalg.mat_vec(self.from_adapted, v)

    def bracket(self, u: Vec, v: Vec) -> Vec:
        return self.alg.bracket(u, v)

    def pair(self, u: Vec, v: Vec) -> Fraction:
        return self.alg.pair(u, v)

    def delta2(self, j: int) -> int:
        return self.jf_delta2[j]

    def weight2(self, j: int) -> int:
        """Doubled conformal weight of the generator attached to q_j."""
        return 2 + self.jf_delta2[j]

    def Q(self, j: int, n: int) -> Vec | None:
        """(ad f)^n q^j, or None outside 0 <= n <= 2 delta(j)."""
        return self.qjn.get((j, n))

    def D(self, j: int, n: int) -> Vec | None:
        return self.qjn_dual.get((j, n))

    def j_minus(self, k2: int) -> list[tuple[int, int]]:
        """Index set J_{-k} for doubled k: pairs (j, n) with n = delta(j) - k.

        Nonempty entries require delta(j) >= |k| with integral difference.
        """
        out = []
        for j, d2 in enumerate(self.jf_delta2):
            if d2 >= abs(k2) and (d2 - abs(k2)) % 2 == 0:
                n = (d2 - k2) // 2
                out.append((j, n))
        return out

    def gf_coords(self, v: Vec) -> Vec:
        """Coefficients of v in the {q_j} basis; v must lie in g^f."""
        coords = [self.pair(v, self.qjup[j]) for j in range(self.ell)]
        rebuilt = linalg.zeros(self.dim)
        for j, c in enumerate(coords):
            if c != 0:
                rebuilt = linalg.vec_add(rebuilt, linalg.vec_scale(self.qj[j], c))
        if not linalg.vec_eq(rebuilt, v):
            raise InvalidInput("vector does not lie in the centralizer of f")
        return coords

    def sharp_coords(self, v: Vec) -> Vec:
        """Coefficients of the g^f component of v in the {q_j} basis."""
        return [self.pair(v, self.qjup[j]) for j in range(self.ell)]

    # -- projections ----------------------------------------------------------

    def proj(self, v: Vec, target: str) -> Vec:
        return project(self, v, target)

    def sharp(self, v: Vec) -> Vec:
        return project(self, v, "gf")


def _eigenbasis(alg: LieAlgebra, x: Vec) -> tuple[list[Vec], list[int]]:
    """Canonical ad x eigenbasis: kernels of (ad x - k), grades ascending."""
    ad_x = alg.ad(x)
    n = alg.dim
    vectors: list[Vec] = []
    grades: list[int] = []
    bound = 2 * n
    for k2 in range(-bound, bound + 1):
        shifted = [[ad_x[i][j] - (Fraction(k2, 2) if i == j else F0) for j in range(n)]
                   for i in range(n)]
        kernel = linalg.nullspace(shifted)
        if not kernel:
            continue
        for v in linalg.canonical_basis(kernel):
            vectors.append(v)
            grades.append(k2)
        if len(vectors) > n:
            break
    if len(vectors) != n:
        raise InternalConsistencyError(
            "ad x eigenspace dimensions sum to %d, expected %d" % (len(vectors), n))
    return vectors, grades


def _adapt_algebra(alg: LieAlgebra, basis: list[Vec]) -> tuple[LieAlgebra, Mat, Mat]:
    """Rebuild the algebra on the given basis (columns, old coordinates)."""
    n = alg.dim
    P = linalg.transpose(basis)           # columns = new basis vectors
    P_inv = linalg.inverse(P)
    labels = []
    for idx, v in enumerate(basis):
        hits = [i for i, c in enumerate(v) if c != 0]
        if len(hits) == 1 and v[hits[0]] == 1:
            labels.append(alg.basis_labels[hits[0]])
        else:
            labels.append("g%d" % idx)
    brackets = {}
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w = linalg.mat_vec(P_inv, alg.bracket(basis[i], basis[j]))
            entry = {k: c for k, c in enumerate(w) if c != 0}
            if entry:
                brackets[(i, j)] = entry
    form = [[alg.pair(basis[i], basis[j]) for j in range(n)] for i in range(n)]
    adapted = LieAlgebra(n, labels, brackets, form, validate=False)
    return adapted, P_inv, P


def graded_setup(alg: LieAlgebra, triple: Sl2Triple, s: Vec | None = None,
                 principal: bool | None = None) -> GradedSetup:
    """Assemble the full graded setup for (alg, triple).

    ``s`` (original coordinates) must lie in the top graded piece g_d; it
    defaults to the canonical basis vector of g_d when that space is a line.
    """
    triple.validate(alg)
    basis, grades = _eigenbasis(alg, triple.x)
    adapted, P_inv, P = _adapt_algebra(alg, basis)
    tri = Sl2Triple(
        e=linalg.mat_vec(P_inv, triple.e),
        h=linalg.mat_vec(P_inv, triple.h),
        f=linalg.mat_vec(P_inv, triple.f),
    )
    depth2 = max(grades)

    # centralizer of f, grade by grade, RREF-canonical inside each grade
    ad_f = adapted.ad(tri.f)
    ad_e = adapted.ad(tri.e)
    n = adapted.dim
    qj: list[Vec] = []
    jf_delta2: list[int] = []
    for d2 in range(0, depth2 + 1):
        idxs = [i for i, g2 in enumerate(grades) if g2 == -d2]
        if not idxs:
            continue
        cols = [[ad_f[r][c] for c in idxs] for r in range(n)]
        for coeffs in linalg.canonical_basis(linalg.nullspace(cols)):
            v = linalg.zeros(n)
            for c, i in zip(coeffs, idxs):
                v[i] = c
            qj.append(v)
            jf_delta2.append(d2)
    if sum(d2 + 1 for d2 in jf_delta2) != n:
        raise InternalConsistencyError("sl2 string lengths do not fill the algebra")

    # dual basis of g^e: solve (q_i | q^j) = delta_ij inside each g^e grade
    ge_by_grade: dict[int, list[Vec]] = {}
    for d2 in sorted(set(jf_delta2)):
        idxs = [i for i, g2 in enumerate(grades) if g2 == d2]
        cols = [[ad_e[r][c] for c in idxs] for r in range(n)]
        vecs = []
        for coeffs in linalg.canonical_basis(linalg.nullspace(cols)):
            v = linalg.zeros(n)
            for c, i in zip(coeffs, idxs):
                v[i] = c
            vecs.append(v)
        ge_by_grade[d2] = vecs
    qjup: list[Vec] = [None] * len(qj)
    for d2 in sorted(set(jf_delta2)):
        js = [j for j, dd in enumerate(jf_delta2) if dd == d2]
        evecs = ge_by_grade[d2]
        if len(evecs) != len(js):
            raise InternalConsistencyError("dim g^e_k != dim g^f_{-k} at 2k=%d" % d2)
        gram = [[adapted.pair(qj[j], u) for u in evecs] for j in js]
        try:
            gram_inv = linalg.inverse(gram)
        except InvalidInput:
            raise FormPairingError("pairing of g^f and g^e is singular at 2k=%d" % d2)
        for col, j in enumerate(js):
            v = linalg.zeros(n)
            for r, u in enumerate(evecs):
                v = linalg.vec_add(v, linalg.vec_scale(u, gram_inv[r][col]))
            qjup[j] = v

    # dual pair of bases on the whole algebra
    qjn: dict[tuple[int, int], Vec] = {}
    qjn_dual: dict[tuple[int, int], Vec] = {}
    for j, d2 in enumerate(jf_delta2):
        v = qjup[j]
        for m in range(0, d2 + 1):
            qjn[(j, m)] = v
            if m < d2:
                v = linalg.mat_vec(ad_f, v)
        w = qj[j]
        for m in range(0, d2 + 1):
            scale = Fraction((-1) ** m, math.factorial(m) ** 2 * math.comb(d2, m))
            qjn_dual[(j, m)] = linalg.vec_scale(w, scale)
            if m < d2:
                w = linalg.mat_vec(ad_e, w)

    # choice of s in g_d
    top_idxs = [i for i, g2 in enumerate(grades) if g2 == depth2]
    if s is None:
        if len(top_idxs) != 1:
            raise InvalidInput(
                "dim g_d = %d > 1: an explicit s is required" % len(top_idxs))
        s_vec = adapted.basis_vector(top_idxs[0])
    else:
        s_vec = linalg.mat_vec(P_inv, [frac(c) for c in s])
        if any(s_vec[i] != 0 for i in range(n) if grades[i] != depth2):
            raise InvalidInput("s does not lie in the top graded piece g_d")

    setup = GradedSetup(adapted, alg, P_inv, P, tri, grades, depth2, jf_delta2,
                        qj, qjup, qjn, qjn_dual, s_vec, principal)
    problems = [name for name, ok, _ in _structural_checks(setup) if not ok]
    if problems:
        raise InternalConsistencyError("setup invariants failed: %s" % ", ".join(problems))
    return setup


# -- projections and the inverse of ad f --------------------------------------


def project(setup: GradedSetup, a: Vec, target: str) -> Vec:
    """Projection of ``a`` onto g^f, [e,g], g^e or [f,g].

    Uses the completeness relations of the dual bases, e.g.
    pi_{g^f}(a) = sum_j (a | q^j) q_j.
    """
    if len(a) != setup.dim:
        raise InvalidInput("vector has length %d, expected %d" % (len(a), setup.dim))
    out = linalg.zeros(setup.dim)
    if target == "gf":
        for j in range(setup.ell):
            c = setup.pair(a, setup.qjup[j])
            if c != 0:
                out = linalg.vec_add(out, linalg.vec_scale(setup.qj[j], c))
    elif target == "e_bracket":
        for j, d2 in enumerate(setup.jf_delta2):
            for m in range(1, d2 + 1):
                c = setup.pair(a, setup.Q(j, m))
                if c != 0:
                    out = linalg.vec_add(out, linalg.vec_scale(setup.D(j, m), c))
    elif target == "ge":
        for j in range(setup.ell):
            c = setup.pair(a, setup.qj[j])
            if c != 0:
                out = linalg.vec_add(out, linalg.vec_scale(setup.qjup[j], c))
    elif target == "f_bracket":
        for j, d2 in enumerate(setup.jf_delta2):
            for m in range(1, d2 + 1):
                c = setup.pair(a, setup.D(j, m))
                if c != 0:
                    out = linalg.vec_add(out, linalg.vec_scale(setup.Q(j, m), c))
    else:
        raise InvalidInput("unknown projection target %r" % (target,))
    return out


def ad_f_inverse_pi(setup: GradedSetup, a: Vec) -> Vec:
    """(ad f)^{-1} of the [f,g] component: sum_{j,n} (a | D[j,n+1]) Q[j,n]."""
    out = linalg.zeros(setup.dim)
    for j, d2 in enumerate(setup.jf_delta2):
        for m in range(0, d2):
            c = setup.pair(a, setup.D(j, m + 1))
            if c != 0:
                out = linalg.vec_add(out, linalg.vec_scale(setup.Q(j, m), c))
    return out


# -- validation ---------------------------------------------------------------


def _structural_checks(setup: GradedSetup) -> list[tuple[str, bool, str]]:
    checks = []
    alg = setup.alg
    n = setup.dim
    tri = setup.triple

    ok = all(linalg.vec_eq(alg.bracket(tri.x, alg.basis_vector(i)),
                           linalg.vec_scale(alg.basis_vector(i), Fraction(setup.grade2[i], 2)))
             for i in range(n))
    checks.append(("adapted basis consists of ad x eigenvectors", ok, ""))

    ok = True
    for j, d2 in enumerate(setup.jf_delta2):
        if not linalg.vec_eq(alg.bracket(tri.x, setup.qj[j]),
                             linalg.vec_scale(setup.qj[j], Fraction(-d2, 2))):
            ok = False
        if not linalg.vec_eq(alg.bracket(tri.x, setup.qjup[j]),
                             linalg.vec_scale(setup.qjup[j], Fraction(d2, 2))):
            ok = False
        if not linalg.vec_is_zero(alg.bracket(tri.f, setup.qj[j])):
            ok = False
        if not linalg.vec_is_zero(alg.bracket(tri.e, setup.qjup[j])):
            ok = False
    checks.append(("q_j / q^j have grades -delta(j) / +delta(j)", ok, ""))

    ok = all(setup.pair(setup.qj[i], setup.qjup[j]) == (1 if i == j else 0)
             for i in range(setup.ell) for j in range(setup.ell))
    checks.append(("(q_i | q^j) = delta_ij", ok, ""))

    # ((ad e)^n q_j | (ad f)^m q^i) = (-1)^n n!^2 binom(2 delta_j, n) d_ij d_mn
    ad_e = alg.ad(tri.e)
    ok = True
    for j, d2j in enumerate(setup.jf_delta2):
        v = setup.qj[j]
        for nn in range(0, d2j + 1):
            for i, d2i in enumerate(setup.jf_delta2):
                for m in range(0, d2i + 1):
                    got = setup.pair(v, setup.Q(i, m))
                    want = F0
                    if i == j and m == nn:
                        want = Fraction((-1) ** nn * math.factorial(nn) ** 2
                                        * math.comb(d2j, nn))
                    if got != want:
                        ok = False
            if nn < d2j:
                v = linalg.mat_vec(ad_e, v)
    checks.append(("duality of the (ad e)^n q_j and (ad f)^m q^i families", ok, ""))

    # sl2 action on the dual pair of bases
    ok = True
    for j, d2 in enumerate(setup.jf_delta2):
        for nn in range(0, d2 + 1):
            Dn = setup.D(j, nn)
            Qn = setup.Q(j, nn)
            prev_d = setup.D(j, nn - 1) if nn >= 1 else linalg.zeros(n)
            next_d = setup.D(j, nn + 1) if nn + 1 <= d2 else linalg.zeros(n)
            next_q = setup.Q(j, nn + 1) if nn + 1 <= d2 else linalg.zeros(n)
            prev_q = setup.Q(j, nn - 1) if nn >= 1 else linalg.zeros(n)
            if not linalg.vec_eq(alg.bracket(tri.f, Dn), linalg.vec_scale(prev_d, -1)):
                ok = False
            if not linalg.vec_eq(alg.bracket(tri.e, Dn),
                                 linalg.vec_scale(next_d, -Fraction((nn + 1) * (d2 - nn)))):
                ok = False
            if not linalg.vec_eq(alg.bracket(tri.f, Qn), next_q):
                ok = False
            if not linalg.vec_eq(alg.bracket(tri.e, Qn),
                                 linalg.vec_scale(prev_q, Fraction(nn * (d2 - nn + 1)))):
                ok = False
    checks.append(("sl2 action identities on Q[j,n] and D[j,n]", ok, ""))

    id_n = linalg.identity(n)
    basis = [alg.basis_vector(i) for i in range(n)]
    m_gf = linalg.transpose([project(setup, b, "gf") for b in basis])
    m_eg = linalg.transpose([project(setup, b, "e_bracket") for b in basis])
    m_ge = linalg.transpose([project(setup, b, "ge") for b in basis])
    m_fg = linalg.transpose([project(setup, b, "f_bracket") for b in basis])
    ok = linalg.mat_eq([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(m_gf, m_eg)], id_n) \
        and linalg.mat_eq([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(m_ge, m_fg)], id_n)
    checks.append(("projection completeness: gf+[e,g] = id = ge+[f,g]", ok, ""))

    ok = True
    for b in basis:
        lhs = alg.bracket(tri.f, ad_f_inverse_pi(setup, b))
        if not linalg.vec_eq(lhs, project(setup, b, "f_bracket")):
            ok = False
    checks.append(("ad f inverts the [f,g]-projection formula", ok, ""))

    # orthogonality of the two splittings
    ok = True
    for j, d2 in enumerate(setup.jf_delta2):
        for i, d2i in enumerate(setup.jf_delta2):
            for m in range(1, d2i + 1):
                if setup.pair(setup.qj[j], setup.Q(i, m)) != 0:
                    ok = False
                if setup.pair(setup.qjup[j], setup.D(i, m)) != 0:
                    ok = False
    checks.append(("g^f perp [f,g] and g^e perp [e,g]", ok, ""))

    # sl2 commutation relations of the ad matrices
    ad_x = alg.ad(tri.x)
    ad_f = alg.ad(tri.f)
    comm = lambda A, B: [[a - b for a, b in zip(r1, r2)]
                         for r1, r2 in zip(linalg.mat_mul(A, B), linalg.mat_mul(B, A))]
    ok = linalg.mat_eq(comm(ad_x, ad_e), ad_e) \
        and linalg.mat_eq(comm(ad_x, ad_f), [[-c for c in row] for row in ad_f]) \
        and linalg.mat_eq(comm(ad_e, ad_f), [[2 * c for c in row] for row in ad_x])
    checks.append(("ad e, ad h, ad f satisfy the sl2 relations", ok, ""))

    s_ok = all(setup.s[i] == 0 for i in range(n) if setup.grade2[i] != setup.depth2)
    if setup.depth2 >= 2:
        for i in range(n):
            if setup.grade2[i] >= 1 and not linalg.vec_is_zero(
                    alg.bracket(setup.s, basis[i])):
                s_ok = False
    checks.append(("s lies in g_d and commutes with the positive half", s_ok, ""))
    return checks


class ValidationReport:
    def __init__(self, checks: list[tuple[str, bool, str]]):
        self.checks = checks

    @property
    def ok(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def lines(self) -> list[str]:
        return ["%s %s%s" % ("PASS" if ok else "FAIL", name, (": " + msg) if msg else "")
                for name, ok, msg in self.checks]

    def __str__(self) -> str:
        return "\n".join(self.lines())


def validate_setup(setup: GradedSetup, samples: int = 3, seed: int = 20140304) -> ValidationReport:
    """Full structural report: construction invariants, the tensor identity
    sum_{J_{k-1}} D[i,m+1] (x) Q[i,m] = - sum_{J_{-k}} Q[j,n] (x) D[j,n+1]
    for every admissible k, and transversality [f+r, g] + g^e = g at random
    rational points r in the nonnegative part of the grading.
    """
    checks = list(_structural_checks(setup))
    n = setup.dim

    ok = True
    detail = ""
    for k2 in range(-setup.depth2, setup.depth2 + 1):
        lhs = linalg.zero_mat(n, n)
        for (i, m) in setup.j_minus(2 - k2):
            if m + 1 > setup.jf_delta2[i]:
                continue
            dv, qv = setup.D(i, m + 1), setup.Q(i, m)
            for a in range(n):
                if dv[a] == 0:
                    continue
                for b in range(n):
                    lhs[a][b] += dv[a] * qv[b]
        rhs = linalg.zero_mat(n, n)
        for (j, nn) in setup.j_minus(k2):
            if nn + 1 > setup.jf_delta2[j]:
                continue
            qv, dv = setup.Q(j, nn), setup.D(j, nn + 1)
            for a in range(n):
                if qv[a] == 0:
                    continue
                for b in range(n):
                    rhs[a][b] -= qv[a] * dv[b]
        if not linalg.mat_eq(lhs, rhs):
            ok = False
            detail = "fails at 2k=%d" % k2
    checks.append(("tensor identity over J_{k-1} / J_{-k} for all k", ok, detail))

    rng = random.Random(seed)
    nonneg = [i for i in range(n) if setup.grade2[i] >= 0]
    ge_basis = list(setup.qjup)
    ok = True
    principal_ok = True
    for _ in range(samples):
        r = linalg.zeros(n)
        for i in nonneg:
            r[i] = Fraction(rng.randint(-6, 6), rng.randint(1, 4))
        fr = linalg.vec_add(setup.triple.f, r)
        ad_fr = setup.alg.ad(fr)
        cols = [[ad_fr[a][b] for b in range(n)] for a in range(n)]
        stacked = linalg.transpose(cols) + ge_basis
        if linalg.rank(stacked) != n:
            ok = False
        if setup.principal:
            if linalg.rank(cols) + len(ge_basis) != n:
                principal_ok = False
    checks.append(("transversality [f+r,g] + g^e = g at sampled r in g_{>=0}", ok, ""))
    if setup.principal:
        checks.append(("principal case: g = [f+r,g] (+) g^e is a direct sum",
                       principal_ok, ""))
    return ValidationReport(checks)
