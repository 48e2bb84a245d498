"""Poisson structure of the (twisted) Slodowy slice.

Two independent routes to the same bracket on S(g^f):

* ``finite_bracket_oracle`` works geometrically: it builds the projector
  Phi onto g^e along the slice directions for a symbolic point r of g^e
  (optionally shifted by z x), evaluates (p | Phi([q, r])) as an exact
  polynomial in the coordinates (q_j | r), and renames those coordinates to
  the symbols q_j.  Because r is symbolic the comparison with the closed
  formula is an identity, not a sampled test.

* ``finite_bracket`` evaluates the closed chain formula

      {p,q}_z = fac(p,q) + sum_{t>=1} sum_links fac(p,Q_1) fac(D_1,Q_2)
                ... fac(D_t,q),
      fac(A,B) = [A,B]^sharp + z (x|[A,B]),

  with links (j_i, n_i), 0 <= n_i <= 2 delta(j_i) - 1, Q_i = Q[j_i, n_i],
  D_i = D[j_i, n_i + 1].  The sum truncates at t = 2d; the t = 2d + 1 term
  is recomputed and asserted to vanish on every call.
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .affine import calculus
from .diffpoly import DiffPoly
from .errors import InternalConsistencyError, InvalidInput
from .grading import GradedSetup, ad_f_inverse_pi, project
from .linalg import F0, F1, Vec, frac

# A symbolic g^e vector: one DiffPoly coordinate (over the r variables or
# any coefficient space) per adapted basis index.
PolyVec = list


def _pvec_from_vec(calc, v: Vec) -> PolyVec:
    space = calc.space_r
    return [DiffPoly.const(space, c) for c in v]


def _pvec_is_zero(pv: PolyVec) -> bool:
    return all(p.is_zero() for p in pv)


def _pvec_add(pu: PolyVec, pv: PolyVec) -> PolyVec:
    return [a + b for a, b in zip(pu, pv)]


def _pvec_apply_matrix(M, pv: PolyVec) -> PolyVec:
    out = []
    for row in M:
        acc = None
        for c, p in zip(row, pv):
            if c == 0 or p.is_zero():
                continue
            acc = p.scale(c) if acc is None else acc + p.scale(c)
        out.append(acc if acc is not None else DiffPoly.zero(pv[0].space))
    return out


def _pvec_bracket(setup: GradedSetup, pu: PolyVec, pv: PolyVec) -> PolyVec:
    space = pu[0].space
    out = [DiffPoly.zero(space) for _ in range(setup.dim)]
    for i, pi in enumerate(pu):
        if pi.is_zero():
            continue
        for j, pj in enumerate(pv):
            if pj.is_zero():
                continue
            prod = pi * pj
            for k, c in setup.alg.bracket_basis(i, j).items():
                out[k] = out[k] + prod.scale(c)
    return out


def _pvec_pair(setup: GradedSetup, v: Vec, pv: PolyVec) -> DiffPoly:
    space = pv[0].space
    acc = DiffPoly.zero(space)
    for i, c in enumerate(v):
        if c == 0:
            continue
        row = setup.alg.form[i]
        for j, p in enumerate(pv):
            if row[j] != 0 and not p.is_zero():
                acc = acc + p.scale(c * row[j])
    return acc


def symbolic_ge_vector(setup: GradedSetup, z=F0) -> PolyVec:
    """Generic r = sum_j r_j q^j in g^e, shifted by the rational z x."""
    calc = calculus(setup)
    space = calc.space_r
    out = [DiffPoly.zero(space) for _ in range(setup.dim)]
    for j in range(setup.ell):
        rj = DiffPoly.variable(space, j)
        for i, c in enumerate(setup.qjup[j]):
            if c != 0:
                out[i] = out[i] + rj.scale(c)
    z = frac(z)
    if z != 0:
        for i, c in enumerate(setup.triple.x):
            if c != 0:
                out[i] = out[i] + DiffPoly.const(space, z * c)
    return out


def phi_r(setup: GradedSetup, a, r: PolyVec) -> PolyVec:
    """The slice projector Phi applied to ``a``.

    Phi = pi_{g^e} o sum_{t=0}^{2d} (-(ad r) o (ad f)^{-1} o pi_{[f,g]})^t;
    nilpotency of the summand (one extra power vanishing identically) and
    membership of the output in g^e are asserted.
    """
    calc = calculus(setup)
    for i, p in enumerate(r):
        if not p.is_zero() and setup.grade2[i] < 0:
            raise InvalidInput("r has support in negative grades")
    if a and not isinstance(a[0], DiffPoly):
        a = _pvec_from_vec(calc, a)
    space = a[0].space

    n = setup.dim
    # matrix of (ad f)^{-1} o pi_{[f,g]} in the adapted basis
    key = "_adfinv"
    mat = getattr(setup, key, None)
    if mat is None:
        cols = [ad_f_inverse_pi(setup, setup.alg.basis_vector(i)) for i in range(n)]
        mat = linalg.transpose(cols)
        setattr(setup, key, mat)

    def step(pv: PolyVec) -> PolyVec:
        lifted = _pvec_apply_matrix(mat, pv)
        return [p.scale(-1) for p in _pvec_bracket(setup, r, lifted)]

    total = list(a)
    term = a
    for _ in range(setup.depth2):
        term = step(term)
        if _pvec_is_zero(term):
            break
        total = _pvec_add(total, term)
    else:
        tail = step(term)
        if not _pvec_is_zero(tail):
            raise InternalConsistencyError(
                "slice projector series fails to truncate at t = 2d")

    out = [DiffPoly.zero(space) for _ in range(n)]
    for j in range(setup.ell):
        c = _pvec_pair(setup, setup.qj[j], total)
        if c.is_zero():
            continue
        for i, q in enumerate(setup.qjup[j]):
            if q != 0:
                out[i] = out[i] + c.scale(q)
    # Phi must land in g^e: the [f,g] component of the output vanishes
    for j, d2 in enumerate(setup.jf_delta2):
        for m in range(1, d2 + 1):
            if not _pvec_pair(setup, setup.D(j, m), out).is_zero():
                raise InternalConsistencyError("Phi output left g^e")
    return out


def _require_gf(setup: GradedSetup, v: Vec, name: str) -> None:
    if len(v) != setup.dim:
        raise InvalidInput("%s has wrong length" % name)
    if not linalg.vec_eq(project(setup, v, "gf"), v):
        raise InvalidInput("%s does not lie in g^f" % name)


def finite_bracket_oracle(setup: GradedSetup, p: Vec, q: Vec, z=F0) -> DiffPoly:
    """Slice Poisson bracket {p, q} through the projector route.

    Returns the polynomial (p | Phi([q, zx + r])) rewritten in the symbols
    q_j; exact in the symbolic slice point r.
    """
    _require_gf(setup, p, "p")
    _require_gf(setup, q, "q")
    calc = calculus(setup)
    r = symbolic_ge_vector(setup, z=z)
    qp = _pvec_from_vec(calc, q)
    moved = _pvec_bracket(setup, qp, r)
    eta = phi_r(setup, moved, r)
    value = _pvec_pair(setup, p, eta)
    rename = {j: DiffPoly.variable(calc.space_qf, j) for j in range(setup.ell)}
    return value.substitute(calc.space_qf, rename)


def _finite_factor_tables(setup: GradedSetup):
    """Shared chain-factor tables (z-independent parts) for the closed formula."""
    calc = calculus(setup)
    if calc._finite_fac:
        return calc._finite_fac
    links = [(j, n) for j, d2 in enumerate(setup.jf_delta2) for n in range(0, d2)]
    # fac(D[j,n+1], Q[j',n']) stored as (sharp coordinates over q, (x|[.,.]))
    mid = {}
    for (j, n) in links:
        dv = setup.D(j, n + 1)
        for (j2, n2) in links:
            br = setup.bracket(dv, setup.Q(j2, n2))
            mid[(j, n, j2, n2)] = (setup.sharp_coords(br),
                                   setup.pair(setup.triple.x, br))
    calc._finite_fac = (links, mid)
    return calc._finite_fac


def finite_bracket(setup: GradedSetup, p: Vec, q: Vec, z=F0) -> DiffPoly:
    """Closed-formula Poisson bracket on S(g^f), twisted by rational z."""
    _require_gf(setup, p, "p")
    _require_gf(setup, q, "q")
    z = frac(z)
    calc = calculus(setup)
    space = calc.space_qf
    links, mid = _finite_factor_tables(setup)

    def fac(sharp_coords, xconst) -> DiffPoly:
        return DiffPoly.linear(space, sharp_coords,
                               z * xconst if z != 0 else F0)

    def fac_vecs(u, v) -> DiffPoly:
        br = setup.bracket(u, v)
        return fac(setup.sharp_coords(br), setup.pair(setup.triple.x, br))

    total = fac_vecs(p, q)
    row_p = {ln: fac_vecs(p, setup.Q(ln[0], ln[1])) for ln in links}
    suffix = {ln: fac_vecs(setup.D(ln[0], ln[1] + 1), q) for ln in links}
    for t in range(1, setup.depth2 + 2):
        term = DiffPoly.zero(space)
        for ln in links:
            if not (row_p[ln].is_zero() or suffix[ln].is_zero()):
                term = term + row_p[ln] * suffix[ln]
        if t == setup.depth2 + 1:
            if not term.is_zero():
                raise InternalConsistencyError(
                    "chain sum fails to truncate at t = 2d")
            break
        total = total + term
        nxt = {}
        for ln in links:
            acc = DiffPoly.zero(space)
            for ln2 in links:
                s = suffix[ln2]
                if s.is_zero():
                    continue
                sharp, xc = mid[ln + ln2]
                f = fac(sharp, xc)
                if not f.is_zero():
                    acc = acc + f * s
            nxt[ln] = acc
        suffix = nxt
    return total


def slice_shift(setup: GradedSetup, P: DiffPoly, z) -> DiffPoly:
    """Substitute q_j -> q_j + (z^2/4)(q_j | e); intertwines the z-twist."""
    z = frac(z)
    calc = calculus(setup)
    if P.space != calc.space_qf:
        raise InvalidInput("slice_shift acts on polynomials in the q_j")
    if z == 0:
        return P
    images = {}
    for j in range(setup.ell):
        shift = z * z / 4 * setup.pair(setup.qj[j], setup.triple.e)
        images[j] = DiffPoly.linear(calc.space_qf,
                                    [F1 if i == j else F0 for i in range(setup.ell)],
                                    shift)
    return P.substitute(calc.space_qf, images)


def poisson_extend(setup: GradedSetup, table, A: DiffPoly, B: DiffPoly) -> DiffPoly:
    """Extend a generator bracket table to S(g^f) by the Leibniz rule."""
    space = A.space
    out = DiffPoly.zero(space)
    for (i, _) in A.support():
        dA = A.pderiv(i, 0)
        if dA.is_zero():
            continue
        for (j, _) in B.support():
            dB = B.pderiv(j, 0)
            if dB.is_zero():
                continue
            base = table[i][j]
            if base.is_zero():
                continue
            out = out + dA * dB * base
    return out


def finite_bracket_table(setup: GradedSetup, z=F0):
    """All generator brackets {q_i, q_j}_z as a nested list."""
    ell = setup.ell
    return [[finite_bracket(setup, setup.qj[i], setup.qj[j], z=z)
             for j in range(ell)] for i in range(ell)]
