"""Sparse differential polynomials and lambda-polynomials.

A :class:`DiffPoly` is a rational-linear combination of monomials in
derivative variables v_i^(m), tagged by the :class:`VarSpace` its variables
live in.  A :class:`LambdaPoly` is a polynomial in the formal variable
lambda whose coefficients are DiffPolys, each split into a z-degree 0 and a
z-degree 1 slot; z-degree 2 is a hard error, which turns the linearity of
every bracket formula in z into an executable assertion.

``master_bracket`` evaluates the Master Formula

    {g_lam h} = sum_{i,j,m,n} dh/dv_j^(n) (lam+d)^n {v_i _(lam+d) v_j}
                 (-lam-d)^m dg/dv_i^(m)

eagerly, with every (lam+d) acting on everything to its right.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import InternalConsistencyError, InvalidInput
from .linalg import F0, F1, frac

Monomial = tuple  # sorted tuple of (var_index, derivative_order) with repetition


class _Inhomogeneous:
    def __repr__(self):
        return "INHOMOGENEOUS"


INHOMOGENEOUS = _Inhomogeneous()


@dataclass(frozen=True)
class VarSpace:
    """Named variable space: variable names plus doubled conformal weights."""

    name: str
    var_names: tuple
    weight2: tuple   # doubled conformal weight per variable (0 when unused)

    @property
    def nvars(self) -> int:
        return len(self.var_names)


class DiffPoly:
    """Sparse differential polynomial; treat instances as immutable."""

    __slots__ = ("space", "terms")

    def __init__(self, space: VarSpace, terms: dict | None = None):
        self.space = space
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if c != 0:
                    self.terms[mono] = c

    # -- constructors ---------------------------------------------------------

    @classmethod
    def zero(cls, space: VarSpace) -> "DiffPoly":
        return cls(space)

    @classmethod
    def const(cls, space: VarSpace, c) -> "DiffPoly":
        c = frac(c)
        return cls(space, {(): c} if c != 0 else {})

    @classmethod
    def variable(cls, space: VarSpace, i: int, order: int = 0) -> "DiffPoly":
        if not (0 <= i < space.nvars):
            raise InvalidInput("variable index %d outside space %s" % (i, space.name))
        return cls(space, {((i, order),): F1})

    @classmethod
    def linear(cls, space: VarSpace, coeffs, constant=F0) -> "DiffPoly":
        terms = {}
        for i, c in enumerate(coeffs):
            if c != 0:
                terms[((i, 0),)] = frac(c)
        if constant != 0:
            terms[()] = frac(constant)
        return cls(space, terms)

    # -- ring operations -------------------------------------------------------

    def _require_same_space(self, other: "DiffPoly"):
        if self.space != other.space:
            raise InvalidInput("mixing variable spaces %s and %s"
                               % (self.space.name, other.space.name))

    def __add__(self, other: "DiffPoly") -> "DiffPoly":
        self._require_same_space(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            acc = terms.get(mono, F0) + c
            if acc == 0:
                terms.pop(mono, None)
            else:
                terms[mono] = acc
        out = DiffPoly(self.space)
        out.terms = terms
        return out

    def __sub__(self, other: "DiffPoly") -> "DiffPoly":
        return self + other.scale(-1)

    def scale(self, c) -> "DiffPoly":
        c = frac(c)
        if c == 0:
            return DiffPoly(self.space)
        out = DiffPoly(self.space)
        out.terms = {mono: c * v for mono, v in self.terms.items()}
        return out

    def __neg__(self) -> "DiffPoly":
        return self.scale(-1)

    def __mul__(self, other: "DiffPoly") -> "DiffPoly":
        self._require_same_space(other)
        terms: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = tuple(sorted(m1 + m2))
                acc = terms.get(mono, F0) + c1 * c2
                if acc == 0:
                    terms.pop(mono, None)
                else:
                    terms[mono] = acc
        out = DiffPoly(self.space)
        out.terms = terms
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, DiffPoly) and self.space == other.space
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.space.name, tuple(sorted(self.terms.items()))))

    def constant_part(self) -> Fraction:
        return self.terms.get((), F0)

    # -- calculus ---------------------------------------------------------------

    def deriv(self) -> "DiffPoly":
        """Total derivative: Leibniz-linear, v^(m) -> v^(m+1)."""
        terms: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            for pos in range(len(mono)):
                var, order = mono[pos]
                bumped = tuple(sorted(mono[:pos] + ((var, order + 1),) + mono[pos + 1:]))
                acc = terms.get(bumped, F0) + c
                if acc == 0:
                    terms.pop(bumped, None)
                else:
                    terms[bumped] = acc
        out = DiffPoly(self.space)
        out.terms = terms
        return out

    def pderiv(self, var: int, order: int) -> "DiffPoly":
        """Partial derivative with respect to the variable v_var^(order)."""
        key = (var, order)
        terms: dict[Monomial, Fraction] = {}
        for mono, c in self.terms.items():
            count = mono.count(key)
            if not count:
                continue
            pos = mono.index(key)
            reduced = mono[:pos] + mono[pos + 1:]
            acc = terms.get(reduced, F0) + c * count
            if acc == 0:
                terms.pop(reduced, None)
            else:
                terms[reduced] = acc
        out = DiffPoly(self.space)
        out.terms = terms
        return out

    def support(self) -> list:
        """Sorted list of (var, order) pairs appearing in some monomial."""
        seen = set()
        for mono in self.terms:
            seen.update(mono)
        return sorted(seen)

    def max_order(self) -> int:
        orders = [o for mono in self.terms for _, o in mono]
        return max(orders, default=0)

    def substitute(self, target: VarSpace, images: dict) -> "DiffPoly":
        """Differential-algebra homomorphism sending v_i to images[i].

        v_i^(m) maps to the m-th total derivative of the image; variables
        absent from ``images`` are sent to zero.
        """
        cache: dict[tuple, DiffPoly] = {}

        def image(var, order):
            key = (var, order)
            if key not in cache:
                if order == 0:
                    cache[key] = images.get(var, DiffPoly.zero(target))
                else:
                    cache[key] = image(var, order - 1).deriv()
            return cache[key]

        out = DiffPoly.zero(target)
        for mono, c in self.terms.items():
            acc = DiffPoly.const(target, c)
            for var, order in mono:
                acc = acc * image(var, order)
                if acc.is_zero():
                    break
            out = out + acc
        return out

    # -- weights and rendering ---------------------------------------------------

    def weight2_of_monomial(self, mono: Monomial) -> int:
        return sum(self.space.weight2[var] + 2 * order for var, order in mono)

    def conformal_weight2(self):
        """Common doubled weight of all monomials, or INHOMOGENEOUS.

        The zero polynomial counts as homogeneous of weight 0.
        """
        weights = {self.weight2_of_monomial(m) for m in self.terms}
        if not weights:
            return 0
        if len(weights) > 1:
            return INHOMOGENEOUS
        return weights.pop()

    def render(self) -> str:
        return render_poly(self)

    def __repr__(self):
        return "DiffPoly<%s>(%s)" % (self.space.name, self.render())


def _render_varpow(name: str, order: int) -> str:
    if order == 0:
        return name
    if order <= 3:
        return name + "'" * order
    return "%s^(%d)" % (name, order)


def render_poly(p: DiffPoly) -> str:
    """Canonical text form; monomials sorted by their canonical keys."""
    if not p.terms:
        return "0"
    out = []
    for mono in sorted(p.terms, key=lambda m: (len(m), m)):
        c = p.terms[mono]
        factors = []
        i = 0
        while i < len(mono):
            j = i
            while j < len(mono) and mono[j] == mono[i]:
                j += 1
            name = _render_varpow(p.space.var_names[mono[i][0]], mono[i][1])
            factors.append(name if j - i == 1 else "%s^%d" % (name, j - i))
            i = j
        mag = abs(c)
        if not factors:
            word = str(mag)
        elif mag == 1:
            word = "*".join(factors)
        else:
            word = str(mag) + "*" + "*".join(factors)
        if not out:
            out.append(("-" if c < 0 else "") + word)
        else:
            out.append(("- " if c < 0 else "+ ") + word)
    return " ".join(out)


class LambdaPoly:
    """Polynomial in lambda with DiffPoly coefficients, split by z-degree.

    ``terms[(k, zd)]`` is the coefficient of lambda^k z^zd with zd in {0, 1};
    hitting z-degree 2 raises InternalConsistencyError.
    """

    __slots__ = ("space", "terms")

    def __init__(self, space: VarSpace, terms: dict | None = None):
        self.space = space
        self.terms: dict[tuple[int, int], DiffPoly] = {}
        if terms:
            for (k, zd), p in terms.items():
                if zd not in (0, 1):
                    raise InternalConsistencyError(
                        "z-degree %d appeared; brackets must be linear in z" % zd)
                if not p.is_zero():
                    self.terms[(k, zd)] = p

    @classmethod
    def zero(cls, space: VarSpace) -> "LambdaPoly":
        return cls(space)

    @classmethod
    def from_poly(cls, p: DiffPoly, lam: int = 0, zdeg: int = 0) -> "LambdaPoly":
        return cls(p.space, {(lam, zdeg): p})

    def coeff(self, lam: int, zdeg: int = 0) -> DiffPoly:
        return self.terms.get((lam, zdeg), DiffPoly.zero(self.space))

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        return (isinstance(other, LambdaPoly) and self.space == other.space
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.space.name, tuple(sorted((k, hash(p)) for k, p in self.terms.items()))))

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        if self.space != other.space:
            raise InvalidInput("mixing spaces in lambda arithmetic")
        terms = dict(self.terms)
        for key, p in other.terms.items():
            acc = terms.get(key)
            q = p if acc is None else acc + p
            if q.is_zero():
                terms.pop(key, None)
            else:
                terms[key] = q
        return LambdaPoly(self.space, terms)

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        return self + other.scale(-1)

    def scale(self, c) -> "LambdaPoly":
        return LambdaPoly(self.space, {k: p.scale(c) for k, p in self.terms.items()})

    def __neg__(self) -> "LambdaPoly":
        return self.scale(-1)

    def mul_poly(self, p: DiffPoly) -> "LambdaPoly":
        return LambdaPoly(self.space, {k: q * p for k, q in self.terms.items()})

    def z_shift(self) -> "LambdaPoly":
        """Multiply by the formal z (shifting every slot up one z-degree)."""
        return LambdaPoly(self.space, {(k, zd + 1): p for (k, zd), p in self.terms.items()})

    def lam_del(self, power: int = 1) -> "LambdaPoly":
        """Apply the operator (lambda + d) ``power`` times."""
        out = self
        for _ in range(power):
            terms: dict[tuple[int, int], DiffPoly] = {}
            for (k, zd), p in out.terms.items():
                for key, q in (((k + 1, zd), p), ((k, zd), p.deriv())):
                    if q.is_zero():
                        continue
                    acc = terms.get(key)
                    q2 = q if acc is None else acc + q
                    if q2.is_zero():
                        terms.pop(key, None)
                    else:
                        terms[key] = q2
            out = LambdaPoly(self.space, terms)
        return out

    def map_coeffs(self, fn, space: VarSpace | None = None) -> "LambdaPoly":
        return LambdaPoly(space or self.space,
                          {k: fn(p) for k, p in self.terms.items()})

    def specialize_z(self, z) -> "LambdaPoly":
        """Substitute a rational value for z, collapsing to z-degree 0."""
        z = frac(z)
        out: dict[tuple[int, int], DiffPoly] = {}
        for (k, zd), p in self.terms.items():
            q = p if zd == 0 else p.scale(z)
            key = (k, 0)
            acc = out.get(key)
            q2 = q if acc is None else acc + q
            if q2.is_zero():
                out.pop(key, None)
            else:
                out[key] = q2
        return LambdaPoly(self.space, out)

    def max_lam(self) -> int:
        return max((k for (k, _) in self.terms), default=-1)

    def swap_argument_image(self) -> "LambdaPoly":
        """Return -{.. evaluated at lambda -> -lambda-d ..}.

        Used for the skewsymmetry axiom: {g_lam h} must equal the image of
        {h_lam g} under this map.
        """
        out = LambdaPoly.zero(self.space)
        for (k, zd), p in self.terms.items():
            base = LambdaPoly(self.space, {(0, zd): p})
            shifted = base.lam_del(k).scale((-1) ** k)
            out = out + shifted
        return out.scale(-1)

    def render(self) -> str:
        if not self.terms:
            return "0"
        bits = []
        for (k, zd) in sorted(self.terms):
            head = "" if k == 0 else ("lam" if k == 1 else "lam^%d" % k)
            zhead = "" if zd == 0 else "z"
            prefix = "*".join(x for x in (zhead, head) if x)
            body = self.terms[(k, zd)].render()
            bits.append("(%s)%s" % (body, ("*" + prefix) if prefix else ""))
        return " + ".join(bits)

    def __repr__(self):
        return "LambdaPoly<%s>(%s)" % (self.space.name, self.render())


def total_derivative(p: DiffPoly) -> DiffPoly:
    return p.deriv()


def conformal_weight(p: DiffPoly):
    """Doubled conformal weight of a homogeneous polynomial, else the marker."""
    return p.conformal_weight2()


def master_bracket(gen_bracket, g: DiffPoly, h: DiffPoly) -> LambdaPoly:
    """Master Formula evaluation of {g_lam h} from generator brackets.

    ``gen_bracket(i, j)`` must return {v_i _lam v_j} as a LambdaPoly over the
    common variable space.  Sesquilinearity and the Leibniz rules hold by
    construction of the formula; they are exercised in tests, not assumed.
    """
    if g.space != h.space:
        raise InvalidInput("master bracket needs both arguments in one space")
    space = g.space
    out = LambdaPoly.zero(space)
    for (i, m) in g.support():
        dg = g.pderiv(i, m)
        if dg.is_zero():
            continue
        # (-lam-d)^m dg/dv_i^(m) = (-1)^m (lam+d)^m dg
        right = LambdaPoly.from_poly(dg).lam_del(m).scale((-1) ** m)
        for (j, n) in h.support():
            dh = h.pderiv(j, n)
            if dh.is_zero():
                continue
            gen = gen_bracket(i, j)
            if gen.is_zero():
                continue
            mid = LambdaPoly.zero(space)
            for (k, zd), coeff in gen.terms.items():
                piece = right.lam_del(k).mul_poly(coeff)
                if zd:
                    piece = piece.z_shift()
                mid = mid + piece
            out = out + mid.lam_del(n).mul_poly(dh)
    return out


def jacobi_defect(gen_bracket, g: DiffPoly, h: DiffPoly, k: DiffPoly) -> dict:
    """Bivariate Jacobi defect {g_lam {h_mu k}} - {h_mu {g_lam k}} - {{g_lam h}_(lam+mu) k}.

    Returns a map (lam_power, mu_power, zdeg) -> DiffPoly; empty means the
    identity holds.  Inner brackets are expanded eagerly, so the outer
    lambda/mu bookkeeping reduces to shifting powers.
    """
    space = g.space
    acc: dict[tuple[int, int, int], DiffPoly] = {}

    def add(lp: int, mp: int, zd: int, p: DiffPoly, sign=1):
        if p.is_zero():
            return
        key = (lp, mp, zd)
        q = acc.get(key)
        q2 = p.scale(sign) if q is None else q + p.scale(sign)
        if q2.is_zero():
            acc.pop(key, None)
        else:
            acc[key] = q2

    hk = master_bracket(gen_bracket, h, k)
    for (mu, zd1), p in hk.terms.items():
        lhs = master_bracket(gen_bracket, g, p)
        for (lam, zd2), q in lhs.terms.items():
            add(lam, mu, zd1 + zd2, q, +1)
    gk = master_bracket(gen_bracket, g, k)
    for (lam, zd1), p in gk.terms.items():
        rhs = master_bracket(gen_bracket, h, p)
        for (mu, zd2), q in rhs.terms.items():
            add(lam, mu, zd1 + zd2, q, -1)
    gh = master_bracket(gen_bracket, g, h)
    for (kpow, zd1), p in gh.terms.items():
        # {p _(lam+mu) k} with the outer power kpow carried on lambda
        pk = master_bracket(gen_bracket, p, k)
        for (npow, zd2), q in pk.terms.items():
            # substitute nu -> lam + mu in nu^npow
            for a in range(npow + 1):
                add(kpow + a, npow - a, zd1 + zd2, q.scale(comb(npow, a)), -1)
    return acc
