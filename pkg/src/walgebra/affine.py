"""Affine lambda-bracket calculus attached to a graded setup.

Differential-polynomial variable spaces are indexed by the dual-basis family
D[j,n] (n = 0 gives the centralizer basis q_j, n >= 1 spans [e,g]), so

* the full current algebra V(g) uses all pairs (j, n),
* V(g_{<=1/2}) is the literal subset of variables of grade <= 1/2,
* the invariants live in the q_j variables alone, and projecting onto them
  is just dropping monomials that touch an n >= 1 variable.

The generator bracket is {a_lam b}_z = [a,b] + (a|b) lam + z (s|[a,b]); the
map rho sends a to its grade <= 1/2 part plus the constant (f|a).
"""

from __future__ import annotations

from fractions import Fraction

from . import linalg
from .diffpoly import DiffPoly, LambdaPoly, VarSpace, master_bracket
from .errors import InternalConsistencyError, InvalidInput
from .grading import GradedSetup
from .linalg import F0, F1, Vec


class Calculus:
    """Per-setup variable spaces, coordinate maps and bracket caches."""

    def __init__(self, setup: GradedSetup):
        self.setup = setup
        ell = setup.ell

        self.gvars: list[tuple[int, int]] = []
        for j, d2 in enumerate(setup.jf_delta2):
            for n in range(0, d2 + 1):
                self.gvars.append((j, n))
        self.gidx = {jn: i for i, jn in enumerate(self.gvars)}
        self.gvar_grade2 = [2 * n - setup.jf_delta2[j] for (j, n) in self.gvars]

        qnames = []
        for j in range(ell):
            label = self._unit_label(setup.qj[j])
            qnames.append(label if label else "q%d" % j)
        self.qnames = qnames

        def dname(j, n):
            return qnames[j] if n == 0 else "%s^%d" % (qnames[j], n)

        g_weights = tuple(2 - g2 for g2 in self.gvar_grade2)
        self.space_g = VarSpace(
            "g", tuple(dname(j, n) for (j, n) in self.gvars), g_weights)

        self.le_vars = [i for i, g2 in enumerate(self.gvar_grade2) if g2 <= 1]
        self.le_of_g = {gi: li for li, gi in enumerate(self.le_vars)}
        self.space_le = VarSpace(
            "g_le12",
            tuple(self.space_g.var_names[i] for i in self.le_vars),
            tuple(g_weights[i] for i in self.le_vars))
        # le12 variable of the centralizer generator q_j
        self.le_of_qj = [self.le_of_g[self.gidx[(j, 0)]] for j in range(ell)]
        self.ideal_le_vars = set(range(len(self.le_vars))) - set(self.le_of_qj)

        self.t_vars = [i for i, g2 in enumerate(self.gvar_grade2) if g2 in (0, 1)]
        self.t_of_g = {gi: ti for ti, gi in enumerate(self.t_vars)}
        self.space_tensor = VarSpace(
            "g0_g12",
            tuple(self.space_g.var_names[i] for i in self.t_vars),
            tuple(g_weights[i] for i in self.t_vars))

        wnames = tuple("w(%s)" % qnames[j] for j in range(ell))
        w_weights = tuple(2 + setup.jf_delta2[j] for j in range(ell))
        self.space_w = VarSpace("w", wnames, w_weights)
        self.space_qf = VarSpace("qf", tuple(qnames), w_weights)
        self.space_r = VarSpace("r", tuple("r(%s)" % qn for qn in qnames),
                                (0,) * ell)
        self.space_zhu = VarSpace("zhu", wnames + ("z",), w_weights + (0,))

        dmat_cols = [setup.D(j, n) for (j, n) in self.gvars]
        self._dmat_inv = linalg.inverse(linalg.transpose(dmat_cols))

        self._aff_gen: dict = {}
        self._rho_gen: dict = {}
        self._tensor_gen: dict = {}
        self._w_table: dict = {}
        self._wgens: dict = {}
        self._finite_fac: dict = {}

    def _unit_label(self, v: Vec):
        """Adapted basis label when v is exactly that basis vector, else None."""
        hits = [i for i, c in enumerate(v) if c != 0]
        if len(hits) == 1 and v[hits[0]] == 1:
            return self.setup.alg.basis_labels[hits[0]]
        return None

    # -- coordinates ------------------------------------------------------------

    def d_coords(self, v: Vec) -> Vec:
        """Coordinates of an adapted vector in the D[j,n] basis."""
        return linalg.mat_vec(self._dmat_inv, v)

    def poly_g(self, v: Vec, constant=F0) -> DiffPoly:
        return DiffPoly.linear(self.space_g, self.d_coords(v), constant)

    def poly_le(self, v: Vec, constant=F0) -> DiffPoly:
        """Linear polynomial of a vector lying in g_{<=1/2}."""
        coords = self.d_coords(v)
        le_coords = [F0] * len(self.le_vars)
        for gi, c in enumerate(coords):
            if c == 0:
                continue
            if gi not in self.le_of_g:
                raise InvalidInput("vector sticks out of g_{<=1/2}")
            le_coords[self.le_of_g[gi]] = c
        return DiffPoly.linear(self.space_le, le_coords, constant)

    def poly_w_sharp(self, v: Vec, constant=F0) -> DiffPoly:
        """w of the g^f component of v, as a linear w-space polynomial."""
        return DiffPoly.linear(self.space_w, self.setup.sharp_coords(v), constant)

    def poly_qf_sharp(self, v: Vec, constant=F0) -> DiffPoly:
        return DiffPoly.linear(self.space_qf, self.setup.sharp_coords(v), constant)

    def embed_le_to_g(self, p: DiffPoly) -> DiffPoly:
        images = {li: DiffPoly.variable(self.space_g, gi)
                  for li, gi in enumerate(self.le_vars)}
        return p.substitute(self.space_g, images)

    # -- rho and generator brackets ----------------------------------------------

    def rho_poly(self, p: DiffPoly) -> DiffPoly:
        """rho: V(g) -> V(g_{<=1/2}), a -> pi_{<=1/2}(a) + (f|a) on generators."""
        setup = self.setup
        images = {}
        for gi, (j, n) in enumerate(self.gvars):
            g2 = self.gvar_grade2[gi]
            if g2 <= 1:
                images[gi] = DiffPoly.variable(self.space_le, self.le_of_g[gi])
            elif g2 == 2:
                c = setup.pair(setup.triple.f, setup.D(j, n))
                images[gi] = DiffPoly.const(self.space_le, c)
            # grade > 1: variable maps to zero (absent from images)
        return p.substitute(self.space_le, images)

    def affine_gen(self, i: int, j: int) -> LambdaPoly:
        """{v_i _lam v_j}_z over V(g) for D-basis variables v_i, v_j."""
        key = (i, j)
        if key not in self._aff_gen:
            setup = self.setup
            (ja, na), (jb, nb) = self.gvars[i], self.gvars[j]
            self._aff_gen[key] = self.affine_bracket_vec(
                setup.D(ja, na), setup.D(jb, nb))
        return self._aff_gen[key]

    def affine_bracket_vec(self, u: Vec, v: Vec) -> LambdaPoly:
        """[u,v] + (u|v) lam + z (s|[u,v]) expanded over the g variables."""
        setup = self.setup
        br = setup.bracket(u, v)
        terms = {}
        p0 = self.poly_g(br)
        if not p0.is_zero():
            terms[(0, 0)] = p0
        c1 = setup.pair(u, v)
        if c1 != 0:
            terms[(1, 0)] = DiffPoly.const(self.space_g, c1)
        cz = setup.pair(setup.s, br)
        if cz != 0:
            terms[(0, 1)] = DiffPoly.const(self.space_g, cz)
        return LambdaPoly(self.space_g, terms)

    def rho_gen(self, i: int, j: int) -> LambdaPoly:
        """rho{v_i _lam v_j}_z over V(g_{<=1/2}) for le12 variables."""
        key = (i, j)
        if key not in self._rho_gen:
            setup = self.setup
            (ja, na) = self.gvars[self.le_vars[i]]
            (jb, nb) = self.gvars[self.le_vars[j]]
            u, v = setup.D(ja, na), setup.D(jb, nb)
            br = setup.bracket(u, v)
            terms = {}
            p0 = self.rho_poly(self.poly_g(br))
            if not p0.is_zero():
                terms[(0, 0)] = p0
            c1 = setup.pair(u, v)
            if c1 != 0:
                terms[(1, 0)] = DiffPoly.const(self.space_le, c1)
            cz = setup.pair(setup.s, br)
            if cz != 0:
                terms[(0, 1)] = DiffPoly.const(self.space_le, cz)
            self._rho_gen[key] = LambdaPoly(self.space_le, terms)
        return self._rho_gen[key]

    def rho_bracket(self, g: DiffPoly, h: DiffPoly) -> LambdaPoly:
        """rho{g_lam h}_z for g, h in V(g_{<=1/2}), z carried formally."""
        return master_bracket(self.rho_gen, g, h)


def calculus(setup: GradedSetup) -> Calculus:
    if setup._calc is None:
        setup._calc = Calculus(setup)
    return setup._calc


# -- module-level operations ------------------------------------------------------


def affine_bracket_gen(setup: GradedSetup, i: int, j: int) -> LambdaPoly:
    """Generator bracket {v_i _lam v_j}_z of the current algebra V(g)."""
    return calculus(setup).affine_gen(i, j)


def affine_bracket_vec(setup: GradedSetup, u: Vec, v: Vec) -> LambdaPoly:
    return calculus(setup).affine_bracket_vec(u, v)


def rho(setup: GradedSetup, p: DiffPoly) -> DiffPoly:
    """The differential-algebra homomorphism V(g) -> V(g_{<=1/2})."""
    calc = calculus(setup)
    if p.space == calc.space_le:
        return p
    if p.space != calc.space_g:
        raise InvalidInput("rho expects a polynomial over the g variables")
    return calc.rho_poly(p)


def rho_action(setup: GradedSetup, a: Vec, g: DiffPoly) -> LambdaPoly:
    """Twisted action a^rho_lam g = rho{a_lam g}_z of a in g_{>=1/2}.

    The result is independent of z; this is asserted, not assumed.
    """
    calc = calculus(setup)
    coords = calc.d_coords(a)
    for gi, c in enumerate(coords):
        if c != 0 and calc.gvar_grade2[gi] < 1:
            raise InvalidInput("rho_action needs a in the positive part g_{>=1/2}")
    if g.space != calc.space_le:
        raise InvalidInput("rho_action acts on V(g_{<=1/2}) polynomials")
    out = LambdaPoly.zero(calc.space_le)
    setup_ = calc.setup
    for (j, n) in g.support():
        dh = g.pderiv(j, n)
        if dh.is_zero():
            continue
        (jb, nb) = calc.gvars[calc.le_vars[j]]
        gen = _rho_mixed_gen(calc, a, setup_.D(jb, nb))
        mid = LambdaPoly.zero(calc.space_le)
        for (k, zd), coeff in gen.terms.items():
            piece = LambdaPoly.from_poly(DiffPoly.const(calc.space_le, F1)).lam_del(k)
            piece = piece.mul_poly(coeff)
            if zd:
                piece = piece.z_shift()
            mid = mid + piece
        out = out + mid.lam_del(n).mul_poly(dh)
    for key in out.terms:
        if key[1] != 0:
            raise InternalConsistencyError("rho action acquired a z term")
    return out


def _rho_mixed_gen(calc: Calculus, a: Vec, v: Vec) -> LambdaPoly:
    """rho{a _lam v}_z for a in g (any grade) against an le12 generator."""
    setup = calc.setup
    br = setup.bracket(a, v)
    terms = {}
    p0 = calc.rho_poly(calc.poly_g(br))
    if not p0.is_zero():
        terms[(0, 0)] = p0
    c1 = setup.pair(a, v)
    if c1 != 0:
        terms[(1, 0)] = DiffPoly.const(calc.space_le, c1)
    cz = setup.pair(setup.s, br)
    if cz != 0:
        terms[(0, 1)] = DiffPoly.const(calc.space_le, cz)
    return LambdaPoly(calc.space_le, terms)
