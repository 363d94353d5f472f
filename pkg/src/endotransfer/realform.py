"""Real forms through compact/noncompact gradings of imaginary roots.

On the compact Cartan every root is imaginary, so a real form is encoded by
a Z/2 grading of the root system: 0 = compact, 1 = noncompact.  The grading
determines the Cartan decomposition dimensions, the default real Weyl group
(generated by reflections in compact roots), and the Weil constant of the
invariant form, which is negative definite on the compact part.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .lattice import IntVec
from .rootdata import RootDatum, WeylElement, closure

COMPACT = 0
NONCOMPACT = 1

_GRADE_NAMES = {"compact": COMPACT, "noncompact": NONCOMPACT}


class GradingError(ValueError):
    pass


@dataclass(frozen=True)
class EighthRoot:
    """Exact eighth root of unity exp(i pi k / 4)."""

    k: int

    def __post_init__(self):
        object.__setattr__(self, "k", self.k % 8)

    def __mul__(self, other: "EighthRoot") -> "EighthRoot":
        return EighthRoot(self.k + other.k)

    def __truediv__(self, other: "EighthRoot") -> "EighthRoot":
        return EighthRoot(self.k - other.k)

    def __complex__(self) -> complex:
        from cmath import exp, pi

        return exp(1j * pi * self.k / 4)

    def __repr__(self) -> str:
        return f"exp(i*pi*{self.k}/4)"


ONE = EighthRoot(0)
MINUS_I = EighthRoot(-2)


@dataclass(frozen=True)
class RealFormGrading:
    datum: RootDatum
    grade: Mapping[IntVec, int]

    def grade_of(self, root: IntVec) -> int:
        return self.grade[root]

    @property
    def compact_roots(self) -> tuple[IntVec, ...]:
        return tuple(r for r in self.datum.roots if self.grade[r] == COMPACT)

    @property
    def noncompact_roots(self) -> tuple[IntVec, ...]:
        return tuple(r for r in self.datum.roots if self.grade[r] == NONCOMPACT)


@dataclass(frozen=True)
class DimensionProfile:
    dim_g: int
    dim_t: int
    dim_k: int
    dim_g_over_t: int
    dim_g_over_k: int


def parse_grade(name: str) -> int:
    try:
        return _GRADE_NAMES[name.strip().lower()]
    except KeyError:
        raise GradingError(f"unknown grade {name!r}; expected 'compact' or 'noncompact'")


def build_grading(datum: RootDatum, simple_grades: Sequence[int]) -> RealFormGrading:
    """Extend a grading of the simple roots additively to all roots."""
    if len(simple_grades) != len(datum.simple_roots):
        raise GradingError(
            f"expected {len(datum.simple_roots)} simple grades, got {len(simple_grades)}"
        )
    grade = {}
    for root in datum.roots:
        coeffs = datum.simple_root_coefficients(root)
        total = sum(int(c) * g for c, g in zip(coeffs, simple_grades))
        if any(c.denominator != 1 for c in coeffs):
            raise GradingError(f"root {root} has non-integer simple coefficients")
        grade[root] = total % 2
    grading = RealFormGrading(datum=datum, grade=grade)
    _check_grading(grading)
    return grading


def _check_grading(grading: RealFormGrading) -> None:
    datum = grading.datum
    for root in datum.roots:
        neg = tuple(-x for x in root)
        if grading.grade[root] != grading.grade[neg]:
            raise GradingError("grading is not symmetric under negation")
    for a in datum.roots:
        for b in datum.roots:
            s = tuple(x + y for x, y in zip(a, b))
            if datum.is_root(s):
                if grading.grade[s] != (grading.grade[a] + grading.grade[b]) % 2:
                    raise GradingError("grading is not additive on root sums")


def dimension_profile(grading: RealFormGrading) -> DimensionProfile:
    datum = grading.datum
    n_roots = len(datum.roots)
    n_noncompact = len(grading.noncompact_roots)
    profile = DimensionProfile(
        dim_g=datum.rank + n_roots,
        dim_t=datum.rank,
        dim_k=datum.rank + (n_roots - n_noncompact),
        dim_g_over_t=n_roots,
        dim_g_over_k=n_noncompact,
    )
    assert profile.dim_k + n_noncompact == profile.dim_g
    return profile


def preserves_grading(grading: RealFormGrading, w: WeylElement) -> bool:
    datum = grading.datum
    return all(
        grading.grade[datum.act_on_root(w, r)] == grading.grade[r] for r in datum.roots
    )


def real_weyl_group(
    grading: RealFormGrading,
    extra_generators: tuple[WeylElement, ...] = (),
) -> tuple[WeylElement, ...]:
    """Subgroup generated by compact-root reflections and validated extras."""
    datum = grading.datum
    gens = []
    for root in grading.compact_roots:
        if datum.is_positive(root):
            gens.append(_reflection_in_root(datum, root))
    for w in extra_generators:
        if not preserves_grading(grading, w):
            raise GradingError("extra generator does not preserve the grading")
        gens.append(w)
    return closure(datum, tuple(gens))


def _reflection_in_root(datum: RootDatum, root: IntVec) -> WeylElement:
    coroot = datum.coroot(root)
    matrix = tuple(
        tuple((1 if r == c else 0) - root[c] * coroot[r] for c in range(datum.rank))
        for r in range(datum.rank)
    )
    return datum.element_from_matrix(matrix)


def weil_constant(p: int, q: int) -> EighthRoot:
    """Weil constant exp(i pi (p - q)/4) of a real form of signature (p, q)."""
    if p < 0 or q < 0:
        raise ValueError("signature entries must be nonnegative")
    return EighthRoot(p - q)


def signature(grading: RealFormGrading) -> tuple[int, int]:
    """Signature (p, q) of the invariant form: positive on the noncompact
    part, negative on the compact part (which contains the Cartan)."""
    profile = dimension_profile(grading)
    return profile.dim_g_over_k, profile.dim_k


def gamma_psi(grading: RealFormGrading) -> EighthRoot:
    p, q = signature(grading)
    return weil_constant(p, q)


def prefactor(profile: DimensionProfile) -> EighthRoot:
    """(-i)^{dim(g/t)/2} (-1)^{dim(g/k)/2} as an exact eighth root."""
    if profile.dim_g_over_t % 2 or profile.dim_g_over_k % 2:
        raise GradingError("dimension profile has odd root-space dimensions")
    m = profile.dim_g_over_t // 2
    n = profile.dim_g_over_k // 2
    return EighthRoot(-2 * m + 4 * n)
