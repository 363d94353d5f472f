"""Elliptic endoscopic data, diagrams, and the transfer factor.

The group G is split simply connected and all scenarios live on one compact
Cartan, realized on the cocharacter lattice with Galois acting by -1.  An
endoscopic datum is cut out by an order-2 character s of the coroot lattice;
the endoscopic group H has roots {alpha : s(coroot(alpha)) = +1}, a closed
subsystem on the coroot side, with Weyl group included in W^G on the nose.

Transfer factors are normalized relative to a base diagram.  The cocycle
constructions fix these auxiliary choices, recorded in every report:

* canonical reflection representatives n(w) built from the pinning;
* the compact-Cartan realization with torus twist t_q = e(-rho_check / 2);
* the duality pairing sign of cohomology.DUALITY_CONVENTION.

Individual values of the first and third factor depend on these choices;
their product against the middle factor does not, and is pinned by the
stable-conjugacy invariant (tested against an independent matrix model).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .cohomology import (
    CohomologyError,
    QuotientTorus,
    RealTorus,
    TorusPoint,
    cocycle_class,
    elliptic_torus,
    h1,
    kappa_from_s,
    quotient_torus_lattice,
    tate_nakayama_pair,
)
from .lattice import FracVec, IntVec, dot, solve_rational, transpose, vec_frac
from .realform import RealFormGrading
from .rootdata import (
    RootDatum,
    RootDatumError,
    WeylElement,
    build_sub_datum,
    enumerate_weyl,
    right_coset_representatives,
    weyl_inverse,
)
from .tits import inverse as tits_inverse, multiply as tits_multiply, n_of

WALL_EPS = 1e-9

Coords = tuple[Union[Fraction, float], ...]


class EndoscopyError(ValueError):
    pass


@dataclass(frozen=True)
class EndoscopicDatum:
    g_datum: RootDatum
    s_simple_signs: tuple[int, ...]
    xhat_s: FracVec                      # functional with e^{2 pi i <xhat,coroot>} = s
    h_roots: tuple[IntVec, ...]
    h_datum: RootDatum
    elliptic: bool

    def s_value(self, coroot: IntVec) -> int:
        r = dot(self.xhat_s, coroot)
        if (2 * r).denominator != 1:
            raise EndoscopyError("character is not of order 2 on this coroot")
        return 1 if r.denominator == 1 else -1


@dataclass(frozen=True)
class EllipticElement:
    """X = i v on the compact Cartan, tagged by the side it lives on."""

    coords: Coords
    side: str = "G"

    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self.coords)

    def floats(self) -> tuple[float, ...]:
        return tuple(float(c) for c in self.coords)


@dataclass(frozen=True)
class ADatum:
    """a_alpha = i * ratio(alpha) on positive roots; a(-alpha) = -a(alpha)."""

    ratios: tuple[tuple[IntVec, Fraction], ...]

    def __post_init__(self):
        for _, r in self.ratios:
            if r == 0:
                raise EndoscopyError("a-datum ratio must be nonzero")
        object.__setattr__(self, "_map", dict(self.ratios))

    def ratio(self, root: IntVec) -> Fraction:
        if root in self._map:
            return self._map[root]
        neg = tuple(-x for x in root)
        if neg in self._map:
            return -self._map[neg]
        raise EndoscopyError(f"no a-datum value for root {root}")

    @staticmethod
    def default(datum: RootDatum) -> "ADatum":
        return ADatum(tuple((r, Fraction(1)) for r in datum.positive_roots))


@dataclass(frozen=True)
class Diagram:
    datum: EndoscopicDatum
    w: WeylElement
    x_h: EllipticElement
    x_g: EllipticElement


def build_endoscopic_datum(g_datum: RootDatum, s_simple_signs: Sequence[int]) -> EndoscopicDatum:
    if len(s_simple_signs) != len(g_datum.simple_roots):
        raise EndoscopyError("one sign per simple coroot is required")
    if any(s not in (1, -1) for s in s_simple_signs):
        raise EndoscopyError("character signs must be +1 or -1")
    xhat = tuple(Fraction(1, 2) if s == -1 else Fraction(0) for s in s_simple_signs)

    def s_value(coroot: IntVec) -> int:
        r = dot(vec_frac(xhat), coroot)
        return 1 if r.denominator == 1 else -1

    h_roots = tuple(r for r in g_datum.roots if s_value(g_datum.coroot(r)) == 1)
    _check_coroot_closed(g_datum, h_roots)
    h_label = f"{g_datum.cartan_label}|s={''.join('+' if s == 1 else '-' for s in s_simple_signs)}"
    h_datum = build_sub_datum(g_datum, h_roots, h_label)
    elliptic = _is_elliptic(g_datum, h_roots)
    return EndoscopicDatum(
        g_datum=g_datum,
        s_simple_signs=tuple(int(s) for s in s_simple_signs),
        xhat_s=vec_frac(xhat),
        h_roots=h_roots,
        h_datum=h_datum,
        elliptic=elliptic,
    )


def _check_coroot_closed(g_datum: RootDatum, h_roots: tuple[IntVec, ...]) -> None:
    """Closedness of the coroot system of H inside the coroots of G."""
    h_coroots = {g_datum.coroot(r) for r in h_roots}
    all_coroots = {g_datum.coroot(r) for r in g_datum.roots}
    for a in h_coroots:
        neg = tuple(-x for x in a)
        if neg not in h_coroots:
            raise EndoscopyError("endoscopic coroot system is not symmetric")
        for b in h_coroots:
            s = tuple(x + y for x, y in zip(a, b))
            if s in all_coroots and s not in h_coroots:
                raise EndoscopyError("endoscopic coroot system is not closed")


def is_elliptic_datum(
    g_datum: RootDatum,
    h_roots: tuple[IntVec, ...],
    involution: Optional[tuple[tuple[int, ...], ...]] = None,
) -> bool:
    """[Z_Hhat^Gamma]^0 is trivial: no nonzero Galois-fixed rational direction
    orthogonal to every coroot of H.  The default involution is the compact
    Cartan's -1, for which the check can only fail on degenerate input."""
    n = g_datum.rank
    if involution is None:
        involution = tuple(tuple(-1 if i == j else 0 for j in range(n)) for i in range(n))
    rows = [g_datum.coroot(r) for r in h_roots]
    # (sigma^T - 1) vhat = 0 and <vhat, coroot> = 0 for all h-coroots
    sigma_t = transpose(involution)
    stacked = [tuple(sigma_t[i][j] - (1 if i == j else 0) for j in range(n)) for i in range(n)]
    stacked.extend(tuple(r) for r in rows)
    from .lattice import integer_kernel, mat_int

    fixed_perp = integer_kernel(mat_int(stacked))
    return len(fixed_perp) == 0


def _is_elliptic(g_datum: RootDatum, h_roots: tuple[IntVec, ...]) -> bool:
    return is_elliptic_datum(g_datum, h_roots)


def build_diagram(
    datum: EndoscopicDatum,
    weyl_group: tuple[WeylElement, ...],
    x_h: EllipticElement,
    x_g: EllipticElement,
    wall_eps: float = WALL_EPS,
) -> Optional[Diagram]:
    """Diagram with the minimal Weyl element w satisfying w . eta(x_h) = x_g,
    or None when the orbits do not match (the factor is then zero)."""
    require_regular(datum.g_datum, x_h, wall_eps)
    require_regular(datum.g_datum, x_g, wall_eps)
    exact = x_h.is_exact() and x_g.is_exact()
    target = x_g.coords
    for w in weyl_group:
        image = w.act(x_h.coords)
        if exact:
            if tuple(image) == tuple(target):
                return Diagram(datum, w, x_h, x_g)
        else:
            scale = max(1.0, max(abs(float(t)) for t in target))
            if all(abs(float(a) - float(b)) <= 1e-9 * scale for a, b in zip(image, target)):
                return Diagram(datum, w, x_h, x_g)
    return None


def require_regular(g_datum: RootDatum, x: EllipticElement, wall_eps: float = WALL_EPS) -> None:
    for alpha in g_datum.positive_roots:
        val = dot(alpha, x.coords)
        if x.is_exact():
            if val == 0:
                raise EndoscopyError(f"element is on the wall of root {alpha}")
        else:
            norm = max(1.0, sum(float(c) * float(c) for c in x.coords) ** 0.5)
            if abs(float(val)) < wall_eps * norm:
                raise EndoscopyError(f"element is numerically on the wall of root {alpha}")


def sign_of(value) -> int:
    if isinstance(value, Fraction):
        if value == 0:
            raise EndoscopyError("sign of zero requested; regularity leak")
        return 1 if value > 0 else -1
    if value == 0.0:
        raise EndoscopyError("sign of zero requested; regularity leak")
    return 1 if value > 0 else -1


class TransferFactorEngine:
    """Evaluates the normalized transfer factor for one endoscopic scenario.

    Carries the ambient Weyl group, both real Weyl groups, the base diagram,
    and the exact cohomological data entering the first and third factors.
    """

    def __init__(
        self,
        datum: EndoscopicDatum,
        grading_g: RealFormGrading,
        grading_h: RealFormGrading,
        real_weyl_g: tuple[WeylElement, ...],
        real_weyl_h: tuple[WeylElement, ...],
        base_x_h: EllipticElement,
        base_x_g: EllipticElement,
        base_value: complex = 1.0,
    ):
        self.datum = datum
        self.g_datum = datum.g_datum
        self.grading_g = grading_g
        self.grading_h = grading_h
        self.weyl_g = enumerate_weyl(self.g_datum)
        self.weyl_h = enumerate_weyl(datum.h_datum)
        self._weyl_h_matrices = {w.matrix for w in self.weyl_h}
        self.real_weyl_g = real_weyl_g
        self.real_weyl_h = real_weyl_h
        self.base_value = base_value

        omega = self.g_datum.minus_one_element()
        if omega is None:
            raise EndoscopyError(
                "the split form has no compact Cartan (-1 is not in the Weyl group); "
                "scenario is not elliptic"
            )
        self.omega = omega
        self.rho_check = _half_sum_positive_coroots(self.g_datum)
        self.torus = elliptic_torus(self.g_datum.rank)
        self._h1 = h1(self.torus)
        self._delta_cache: dict = {}
        self._delta_i_cache: dict = {}
        self._delta_iii_cache: dict = {}
        self._inverse_cache: dict = {}
        self._u = None
        self._u_h1 = None

        self.base_diagram = build_diagram(datum, self.weyl_g, base_x_h, base_x_g)
        if self.base_diagram is None or not self.base_diagram.w.is_identity():
            raise EndoscopyError("base point does not admit an identity diagram")

    # -- auxiliary lattice data -------------------------------------------

    def tits_delta(self, w: WeylElement) -> IntVec:
        """delta(w) with n(w)^{-1} n(omega) n(w) = (-1)^{delta(w)} n(omega)."""
        key = w.matrix
        if key not in self._delta_cache:
            d = self.g_datum
            lhs = tits_multiply(
                d,
                tits_multiply(d, tits_inverse(d, n_of(d, w)), n_of(d, self.omega)),
                n_of(d, w),
            )
            if lhs.w != self.omega:
                raise EndoscopyError("minus-one element is not central in the Weyl group")
            self._delta_cache[key] = lhs.eps
        return self._delta_cache[key]

    def _u_torus(self) -> QuotientTorus:
        if self._u is None:
            n = self.g_datum.rank
            big = elliptic_torus(2 * n)
            reps = _coweight_classes(self.g_datum)
            subgroup = [tuple(list(p) + [(-x) % 1 for x in p]) for p in reps]
            self._u = quotient_torus_lattice(big, subgroup)
            self._u_h1 = h1(self._u.torus)
        return self._u

    # -- the three factors ---------------------------------------------------

    def kappa_for(self, w: WeylElement):
        moved = self.g_datum.act_on_functional(w, self.datum.xhat_s)
        return kappa_from_s(moved, self.torus)

    def inverse_of(self, w: WeylElement) -> WeylElement:
        if w.matrix not in self._inverse_cache:
            self._inverse_cache[w.matrix] = self.g_datum.element_from_matrix(
                weyl_inverse(self.g_datum, w).matrix
            )
        return self._inverse_cache[w.matrix]

    def delta_i(self, diagram: Diagram, a: ADatum) -> int:
        """Pairing of the splitting-cocycle class with the transported
        endoscopic character; exact, via the cohomology layer.  The value
        depends only on the torus identification, hence is cached per w."""
        key = (diagram.w.matrix, a.ratios)
        if key in self._delta_i_cache:
            return self._delta_i_cache[key]
        d = self.g_datum
        w = diagram.w
        phases = [Fraction(0)] * d.rank
        mags = [Fraction(1)] * d.rank

        w_rho = w.act(self.rho_check)
        delta_vec = self.tits_delta(w)
        w_delta = w.act(delta_vec)
        for j in range(d.rank):
            phases[j] += Fraction(w_rho[j] + self.rho_check[j], 2) + Fraction(w_delta[j], 2)

        for beta in d.positive_roots:
            alpha = d.act_on_root(w, beta)
            r = a.ratio(alpha)
            coroot = d.coroot(alpha)
            if r < 0:
                for j in range(d.rank):
                    phases[j] += Fraction(coroot[j], 2)
            mag = abs(r)
            if mag != 1:
                for j in range(d.rank):
                    mags[j] *= mag ** coroot[j]

        tau = TorusPoint(tuple(mags), tuple(phases))
        cls = cocycle_class(self.torus, tau, self._h1)
        value = tate_nakayama_pair(cls, self.kappa_for(w))
        self._delta_i_cache[key] = value
        return value

    def delta_ii(self, diagram: Diagram, a: ADatum) -> int:
        """Sign product over positive roots outside the image of H."""
        d = self.g_datum
        w = diagram.w
        h_image = {d.act_on_root(w, beta) for beta in self.datum.h_roots}
        v = diagram.x_g.coords
        out = 1
        for alpha in d.positive_roots:
            if alpha in h_image:
                continue
            out *= sign_of(dot(alpha, v)) * sign_of(a.ratio(alpha))
        return out

    def delta_iii(self, diagram: Diagram, base: Optional[Diagram] = None) -> int:
        """Duality pairing on the doubled torus of the two diagrams.  The
        value depends only on the two torus identifications (cached)."""
        if base is None:
            base = self.base_diagram
        if base.datum is not self.datum or diagram.datum is not self.datum:
            raise EndoscopyError("diagrams come from different endoscopic data")
        key = (diagram.w.matrix, base.w.matrix)
        if key in self._delta_iii_cache:
            return self._delta_iii_cache[key]
        d = self.g_datum
        u = self._u_torus()
        n = d.rank

        def slot(w: WeylElement, sign: int) -> list[Fraction]:
            winv = weyl_inverse(d, w)
            rho_back = winv.act(self.rho_check)
            delta_vec = self.tits_delta(w)
            return [
                sign * (-Fraction(rho_back[j]) / 2 + Fraction(delta_vec[j], 2))
                for j in range(n)
            ]

        x_old = slot(diagram.w, +1) + slot(base.w, -1)
        x_new = u.to_new_coordinates(vec_frac(x_old))
        point = TorusPoint.from_phases(x_new)
        cls = cocycle_class(u.torus, point, self._u_h1)

        f1 = d.act_on_functional(diagram.w, self.datum.xhat_s)
        f2 = d.act_on_functional(base.w, self.datum.xhat_s)
        f_new = u.functional_to_new(vec_frac(tuple(f1) + tuple(f2)))
        kappa_u = kappa_from_s(f_new, u.torus)
        value = tate_nakayama_pair(cls, kappa_u)
        self._delta_iii_cache[key] = value
        return value

    # -- normalized transfer factor ---------------------------------------

    def transfer_factor(
        self,
        x_h: EllipticElement,
        x_g: EllipticElement,
        a: Optional[ADatum] = None,
        wall_eps: float = WALL_EPS,
    ):
        """Normalized factor: base_value on the base diagram, 0 off-orbit."""
        if a is None:
            a = ADatum.default(self.g_datum)
        diagram = build_diagram(self.datum, self.weyl_g, x_h, x_g, wall_eps)
        if diagram is None:
            return 0
        return self.relative_factor(diagram, a) * self.base_value

    def relative_factor(self, diagram: Diagram, a: Optional[ADatum] = None) -> int:
        if a is None:
            a = ADatum.default(self.g_datum)
        base = self.base_diagram
        value = (
            self.delta_i(diagram, a)
            * self.delta_i(base, a)
            * self.delta_ii(diagram, a)
            * self.delta_ii(base, a)
            * self.delta_iii(diagram, base)
        )
        return value  # each factor is +-1, so ratios are products

    # -- orbit enumeration ---------------------------------------------------

    def stable_orbit_representatives(self, x_g: EllipticElement) -> tuple[EllipticElement, ...]:
        require_regular(self.g_datum, x_g)
        reps = right_coset_representatives(self.weyl_g, self.real_weyl_g)
        return tuple(EllipticElement(tuple(w.act(x_g.coords)), "G") for w in reps)

    def matching_h_orbits(self, x_g: EllipticElement) -> tuple[EllipticElement, ...]:
        require_regular(self.g_datum, x_g)
        reps = right_coset_representatives(self.weyl_g, self.real_weyl_h)
        return tuple(EllipticElement(tuple(w.act(x_g.coords)), "H") for w in reps)

    def stable_class_size_h(self, x_h: EllipticElement) -> int:
        require_regular(self.g_datum, x_h)
        return len(self.weyl_h) // len(self.real_weyl_h)

    def h_weyl_contains(self, w: WeylElement) -> bool:
        return w.matrix in self._weyl_h_matrices

    # -- independent stable-conjugacy invariant ----------------------------

    def stable_invariant_class(self, w: WeylElement) -> IntVec:
        """Lattice vector of the class inv(X, w X) in H^1 of the Cartan:
        rho_check - w(rho_check) + delta'(w) with n(omega) n(w) n(omega)^{-1}
        = (-1)^{delta'} n(w)."""
        d = self.g_datum
        lhs = tits_multiply(
            d,
            tits_multiply(d, n_of(d, self.omega), n_of(d, w)),
            tits_inverse(d, n_of(d, self.omega)),
        )
        if lhs.w != w:
            raise EndoscopyError("minus-one element is not central in the Weyl group")
        w_rho = w.act(self.rho_check)
        vec = [self.rho_check[j] - w_rho[j] + lhs.eps[j] for j in range(d.rank)]
        out = []
        for x in vec:
            fx = Fraction(x)
            if fx.denominator != 1:
                raise EndoscopyError("stable invariant is not integral")
            out.append(int(fx))
        return tuple(out)


def _half_sum_positive_coroots(datum: RootDatum) -> FracVec:
    total = [Fraction(0)] * datum.rank
    for r in datum.positive_roots:
        c = datum.coroot(r)
        for j in range(datum.rank):
            total[j] += Fraction(c[j])
    return tuple(t / 2 for t in total)


def _coweight_classes(datum: RootDatum) -> list[FracVec]:
    """Representatives of the coweight lattice modulo the coroot lattice."""
    simple_root_rows = datum.simple_roots
    coweights = []
    n = datum.rank
    for i in range(n):
        e = tuple(Fraction(1) if j == i else Fraction(0) for j in range(n))
        sol = solve_rational(simple_root_rows, e)
        if sol is None:
            raise EndoscopyError("simple roots are degenerate")
        coweights.append(sol)
    seen = {tuple(Fraction(0) for _ in range(n))}
    frontier = list(seen)
    while frontier:
        new = []
        for p in frontier:
            for cw in coweights:
                q = tuple((a + b) % 1 for a, b in zip(p, cw))
                if q not in seen:
                    seen.add(q)
                    new.append(q)
        frontier = new
    return sorted(seen)
