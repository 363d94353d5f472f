"""Root data, Weyl groups, and exact lattice arithmetic.

Conventions used throughout the package:

* The cocharacter lattice is Z^rank in the basis of simple coroots, so a
  simple coroot is a standard basis vector.  Coroots are column vectors
  acted on by Weyl matrices.
* Roots are stored as integer functionals: pairing(root, coroot_vector)
  is the plain dot product.
* A root is positive when it is a nonnegative rational combination of the
  simple roots; for the systems built here the coefficients are integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .lattice import (
    FracVec,
    IntMat,
    IntVec,
    det_int,
    dot,
    identity,
    mat_int,
    mat_mul,
    mat_vec,
    solve_rational,
    vec_frac,
    vec_int,
)

WEYL_ORDER_CAP = 10**6

# Cartan matrices, row i = pairings of simple root i with the simple coroots.
_CARTAN: dict[str, IntMat] = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "A3": ((2, -1, 0), (-1, 2, -1), (0, -1, 2)),
    "A4": ((2, -1, 0, 0), (-1, 2, -1, 0), (0, -1, 2, -1), (0, 0, -1, 2)),
    # B_n: last simple root short; C_n: last simple root long.
    "B2": ((2, -1), (-2, 2)),
    "B3": ((2, -1, 0), (-1, 2, -1), (0, -2, 2)),
    "B4": ((2, -1, 0, 0), (-1, 2, -1, 0), (0, -1, 2, -1), (0, 0, -2, 2)),
    "C2": ((2, -1), (-2, 2)),
    "C3": ((2, -1, 0), (-1, 2, -2), (0, -1, 2)),
    "C4": ((2, -1, 0, 0), (-1, 2, -1, 0), (0, -1, 2, -2), (0, 0, -1, 2)),
    "D4": ((2, -1, 0, 0), (-1, 2, -1, -1), (0, -1, 2, 0), (0, -1, 0, 2)),
    "G2": ((2, -1), (-3, 2)),
}

# Classified root counts, used as a post-condition on the closure generation.
_ROOT_COUNTS = {
    "A1": 2, "A2": 6, "A3": 12, "A4": 20,
    "B2": 8, "B3": 18, "B4": 32,
    "C2": 8, "C3": 18, "C4": 32,
    "D4": 24, "G2": 12,
}


class RootDatumError(ValueError):
    pass


@dataclass(frozen=True)
class WeylElement:
    """Element of a Weyl group, acting on the cocharacter lattice."""

    matrix: IntMat
    word: tuple[int, ...]

    def __mul__(self, other: "WeylElement") -> "WeylElement":
        return WeylElement(mat_mul(self.matrix, other.matrix), self.word + other.word)

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, WeylElement) and self.matrix == other.matrix

    @property
    def rank(self) -> int:
        return len(self.matrix)

    def is_identity(self) -> bool:
        return self.matrix == identity(self.rank)

    def act(self, v):
        """Action on a cocharacter-space vector."""
        return mat_vec(self.matrix, v)


@dataclass(frozen=True)
class RootDatum:
    rank: int
    cartan_label: str
    simple_roots: tuple[IntVec, ...]
    simple_coroots: tuple[IntVec, ...]
    roots: tuple[IntVec, ...]
    coroots: tuple[IntVec, ...]
    invariant_form: tuple[FracVec, ...]

    def __post_init__(self):
        object.__setattr__(self, "_coroot_of", dict(zip(self.roots, self.coroots)))
        object.__setattr__(self, "_root_of", dict(zip(self.coroots, self.roots)))
        object.__setattr__(self, "_root_set", frozenset(self.roots))
        object.__setattr__(self, "_coeff_cache", {})
        object.__setattr__(self, "_positive_cache", None)

    # -- basic queries ----------------------------------------------------

    def is_root(self, f: IntVec) -> bool:
        return f in self._root_set

    def coroot(self, root: IntVec) -> IntVec:
        return self._coroot_of[root]

    def root_for_coroot(self, coroot: IntVec) -> IntVec:
        return self._root_of[coroot]

    def simple_root_coefficients(self, root: IntVec) -> FracVec:
        """Coefficients of a root over the simple roots (exact, memoized)."""
        cached = self._coeff_cache.get(root)
        if cached is None:
            cached = solve_rational(tuple(zip(*self.simple_roots)), root)
            if cached is None:
                raise RootDatumError(f"{root} is not in the span of the simple roots")
            self._coeff_cache[root] = cached
        return cached

    def is_positive(self, root: IntVec) -> bool:
        coeffs = self.simple_root_coefficients(root)
        return all(c >= 0 for c in coeffs) and any(c > 0 for c in coeffs)

    @property
    def positive_roots(self) -> tuple[IntVec, ...]:
        if self._positive_cache is None:
            object.__setattr__(
                self, "_positive_cache", tuple(r for r in self.roots if self.is_positive(r))
            )
        return self._positive_cache

    def form(self, u, v) -> Fraction:
        return sum(
            ui * sum(bij * vj for bij, vj in zip(row, v))
            for ui, row in zip(u, self.invariant_form)
        )

    # -- Weyl action -------------------------------------------------------

    def simple_reflection(self, i: int) -> WeylElement:
        # s_i(v) = v - <alpha_i, v> coalpha_i, so M[r][c] = d_rc - alpha_i[c] coalpha_i[r].
        alpha, coalpha = self.simple_roots[i], self.simple_coroots[i]
        matrix = tuple(
            tuple((1 if r == c else 0) - alpha[c] * coalpha[r] for c in range(self.rank))
            for r in range(self.rank)
        )
        return WeylElement(matrix, (i,))

    def reflect_root(self, i: int, f: IntVec) -> IntVec:
        pairing = dot(f, self.simple_coroots[i])
        return tuple(x - pairing * a for x, a in zip(f, self.simple_roots[i]))

    def reflect_coroot(self, i: int, v: IntVec) -> IntVec:
        pairing = dot(self.simple_roots[i], v)
        return tuple(x - pairing * a for x, a in zip(v, self.simple_coroots[i]))

    def act_on_root(self, w: WeylElement, f: IntVec) -> IntVec:
        """w . f as a functional: (w.f)(v) = f(w^{-1} v)."""
        out = f
        for i in reversed(w.word):
            out = self.reflect_root(i, out)
        return out

    def act_on_functional(self, w: WeylElement, f: FracVec) -> FracVec:
        out = vec_frac(f)
        for i in reversed(w.word):
            pairing = dot(out, self.simple_coroots[i])
            out = tuple(x - pairing * a for x, a in zip(out, self.simple_roots[i]))
        return out

    def root_is_negative_under(self, w: WeylElement, root: IntVec) -> bool:
        return not self.is_positive(self.act_on_root(w, root))

    def length(self, w: WeylElement) -> int:
        return sum(1 for r in self.positive_roots if self.root_is_negative_under(w, r))

    def reduced_word(self, matrix: IntMat) -> tuple[int, ...]:
        """A reduced word for the Weyl element with the given matrix."""
        suffix: list[int] = []
        current = matrix
        guard = 0
        while current != identity(self.rank):
            guard += 1
            if guard > 10 * WEYL_ORDER_CAP:
                raise RootDatumError("matrix does not define a Weyl element")
            for i in range(len(self.simple_roots)):
                image = self._act_root_via_matrix(current, self.simple_roots[i])
                if not self.is_positive(image):
                    suffix.append(i)
                    current = mat_mul(current, self.simple_reflection(i).matrix)
                    break
            else:
                raise RootDatumError("matrix does not define a Weyl element")
        return tuple(reversed(suffix))

    def _act_root_via_matrix(self, matrix: IntMat, root: IntVec) -> IntVec:
        image_coroot = mat_vec(matrix, self.coroot(root))
        return self.root_for_coroot(vec_int(image_coroot))

    def element_from_matrix(self, matrix: IntMat) -> WeylElement:
        return WeylElement(mat_int(matrix), self.reduced_word(mat_int(matrix)))

    def element_from_word(self, word: tuple[int, ...]) -> WeylElement:
        w = WeylElement(identity(self.rank), ())
        for i in word:
            w = w * self.simple_reflection(i)
        return self.element_from_matrix(w.matrix)

    def minus_one_element(self):
        """The Weyl element acting by -1, if it exists."""
        minus = tuple(tuple(-1 if i == j else 0 for j in range(self.rank)) for i in range(self.rank))
        try:
            return self.element_from_matrix(minus)
        except RootDatumError:
            return None


def weyl_sign(w: WeylElement) -> int:
    """det(w) on the lattice, the signature of the Weyl element."""
    d = det_int(w.matrix)
    assert d in (1, -1)
    return d


def _simple_systems(spec: str) -> list[IntMat]:
    parts = [p.strip() for p in spec.replace("x", "×").split("×")]
    systems = []
    for part in parts:
        if part not in _CARTAN:
            raise RootDatumError(f"unknown Cartan type {part!r}")
        systems.append(_CARTAN[part])
    return systems


@lru_cache(maxsize=None)
def build_root_datum(spec: str) -> RootDatum:
    """Build the simply connected root datum for a Cartan type like 'A1' or 'A1xA1'."""
    systems = _simple_systems(spec)
    rank = sum(len(c) for c in systems)
    if rank > 4:
        raise RootDatumError(f"total rank {rank} exceeds the supported range (<= 4)")

    simple_roots: list[IntVec] = []
    offset = 0
    for cartan in systems:
        k = len(cartan)
        for i in range(k):
            row = [0] * rank
            row[offset:offset + k] = list(cartan[i])
            simple_roots.append(tuple(row))
        offset += k
    simple_coroots = [tuple(1 if j == i else 0 for j in range(rank)) for i in range(rank)]

    datum = _close_root_system(spec, rank, tuple(simple_roots), tuple(simple_coroots))
    label = spec.replace("x", "×")
    expected = sum(_ROOT_COUNTS[p.strip()] for p in label.split("×"))
    if len(datum.roots) != expected:
        raise RootDatumError(
            f"closure produced {len(datum.roots)} roots for {spec}, expected {expected}"
        )
    return datum


def build_sub_datum(parent: RootDatum, sub_roots: tuple[IntVec, ...], label: str) -> RootDatum:
    """Root datum of a closed subsystem on the same lattice as the parent."""
    positives = [r for r in sub_roots if parent.is_positive(r)]
    simple = _indecomposable(positives)
    return _close_root_system(
        label,
        parent.rank,
        tuple(simple),
        tuple(parent.coroot(r) for r in simple),
        invariant_form=parent.invariant_form,
        expected_roots=tuple(sorted(sub_roots)),
    )


def _indecomposable(positives: list[IntVec]) -> list[IntVec]:
    pos = set(positives)
    out = []
    for a in sorted(pos):
        if not any(tuple(x - y for x, y in zip(a, b)) in pos for b in pos if b != a):
            out.append(a)
    return out


def _close_root_system(label, rank, simple_roots, simple_coroots, invariant_form=None, expected_roots=None) -> RootDatum:
    for i, alpha in enumerate(simple_roots):
        if dot(alpha, simple_coroots[i]) != 2:
            raise RootDatumError("pairing of a simple root with its coroot is not 2")

    pairs = set(zip(simple_roots, simple_coroots))
    pairs |= {(tuple(-x for x in r), tuple(-x for x in c)) for r, c in pairs}
    frontier = set(pairs)
    while frontier:
        new = set()
        for root, coroot in frontier:
            for i in range(len(simple_roots)):
                pairing = dot(root, simple_coroots[i])
                image_root = tuple(x - pairing * a for x, a in zip(root, simple_roots[i]))
                pairing_co = dot(simple_roots[i], coroot)
                image_coroot = tuple(x - pairing_co * a for x, a in zip(coroot, simple_coroots[i]))
                pair = (image_root, image_coroot)
                if pair not in pairs:
                    new.add(pair)
        pairs |= new
        frontier = new
        if len(pairs) > 4 * WEYL_ORDER_CAP:
            raise RootDatumError("root closure does not terminate")

    ordered = sorted(pairs)
    roots = tuple(r for r, _ in ordered)
    coroots = tuple(c for _, c in ordered)
    if expected_roots is not None and tuple(sorted(roots)) != expected_roots:
        raise RootDatumError("subsystem is not closed: closure escapes the given root set")

    if invariant_form is None:
        invariant_form = _build_form(rank, roots, coroots)
    datum = RootDatum(
        rank=rank,
        cartan_label=label,
        simple_roots=tuple(simple_roots),
        simple_coroots=tuple(simple_coroots),
        roots=roots,
        coroots=coroots,
        invariant_form=invariant_form,
    )
    return datum


def _build_form(rank: int, roots, coroots) -> tuple[FracVec, ...]:
    """Weyl-invariant positive form: sum over roots of alpha(u) alpha(v),
    scaled so the shortest coroot has squared length 2."""
    raw = [[Fraction(0)] * rank for _ in range(rank)]
    for f in roots:
        for i in range(rank):
            for j in range(rank):
                raw[i][j] += Fraction(f[i] * f[j])
    lengths = []
    for c in coroots:
        val = sum(c[i] * raw[i][j] * c[j] for i in range(rank) for j in range(rank))
        lengths.append(val)
    scale = Fraction(2) / min(lengths)
    return tuple(tuple(scale * raw[i][j] for j in range(rank)) for i in range(rank))


def enumerate_weyl(datum: RootDatum, cap: int = WEYL_ORDER_CAP) -> tuple[WeylElement, ...]:
    """The full Weyl group, breadth-first, identity first, deterministic order."""
    gens = [datum.simple_reflection(i) for i in range(len(datum.simple_roots))]
    ident = WeylElement(identity(datum.rank), ())
    seen = {ident.matrix: ident}
    order: list[WeylElement] = [ident]
    frontier = [ident]
    while frontier:
        new: list[WeylElement] = []
        for w in sorted(frontier, key=lambda e: (e.word, e.matrix)):
            for i, g in enumerate(gens):
                cand = WeylElement(mat_mul(w.matrix, g.matrix), w.word + (i,))
                if cand.matrix not in seen:
                    seen[cand.matrix] = cand
                    new.append(cand)
                    if len(seen) > cap:
                        raise RootDatumError(f"Weyl group order exceeds cap {cap}")
        order.extend(sorted(new, key=lambda e: (e.word, e.matrix)))
        frontier = new
    return tuple(order)


def weyl_inverse(datum: RootDatum, w: WeylElement) -> WeylElement:
    matrix = mat_int([[int(x) for x in row] for row in _inverse(w.matrix)])
    return WeylElement(matrix, tuple(reversed(w.word)))


def _inverse(matrix: IntMat):
    from .lattice import invert_rational

    inv = invert_rational(matrix)
    for row in inv:
        for x in row:
            if Fraction(x).denominator != 1:
                raise RootDatumError("matrix is not unimodular")
    return tuple(tuple(int(x) for x in row) for row in inv)


def coset_representatives(
    group: tuple[WeylElement, ...], subgroup: tuple[WeylElement, ...]
) -> tuple[WeylElement, ...]:
    """Minimal representatives of the left cosets w . subgroup."""
    sub = {w.matrix for w in subgroup}
    grp = {w.matrix for w in group}
    if not sub <= grp:
        raise RootDatumError("subgroup is not contained in the group")
    for a in subgroup:
        for b in subgroup:
            if mat_mul(a.matrix, b.matrix) not in sub:
                raise RootDatumError("subgroup is not closed under composition")
    if len(grp) % len(sub) != 0:
        raise RootDatumError("subgroup order does not divide the group order")
    reps: list[WeylElement] = []
    covered: set[IntMat] = set()
    for w in group:  # group is in (length, word) order, so reps are minimal
        if w.matrix in covered:
            continue
        reps.append(w)
        for s in subgroup:
            covered.add(mat_mul(w.matrix, s.matrix))
    assert len(reps) * len(sub) == len(grp)
    return tuple(reps)


def right_coset_representatives(
    group: tuple[WeylElement, ...], subgroup: tuple[WeylElement, ...]
) -> tuple[WeylElement, ...]:
    """Minimal representatives of the right cosets subgroup . w, so that the
    subgroup-orbits {s . w} of the representatives partition the group."""
    sub = {w.matrix for w in subgroup}
    grp = {w.matrix for w in group}
    if not sub <= grp:
        raise RootDatumError("subgroup is not contained in the group")
    reps: list[WeylElement] = []
    covered: set[IntMat] = set()
    for w in group:
        if w.matrix in covered:
            continue
        reps.append(w)
        for s in subgroup:
            covered.add(mat_mul(s.matrix, w.matrix))
    if len(reps) * len(sub) != len(grp):
        raise RootDatumError("subgroup is not closed under composition")
    return tuple(reps)


def closure(datum: RootDatum, generators: tuple[WeylElement, ...]) -> tuple[WeylElement, ...]:
    """Subgroup generated by the given elements, deterministic order."""
    ident = WeylElement(identity(datum.rank), ())
    seen = {ident.matrix: ident}
    frontier = [ident]
    while frontier:
        new = []
        for w in frontier:
            for g in generators:
                cand = w * g
                if cand.matrix not in seen:
                    cand = datum.element_from_matrix(cand.matrix)
                    seen[cand.matrix] = cand
                    new.append(cand)
        frontier = new
        if len(seen) > WEYL_ORDER_CAP:
            raise RootDatumError("subgroup closure exceeds cap")
    return tuple(sorted(seen.values(), key=lambda e: (len(e.word), e.word, e.matrix)))
