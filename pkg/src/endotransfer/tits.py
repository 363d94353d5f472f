"""Arithmetic in the extended Weyl group generated by the canonical
reflection representatives n_i.

Elements are pairs (eps, w): a 2-torsion torus part (-1)^eps with eps a
coroot-lattice vector mod 2, times the canonical representative n(w) built
from any reduced word of w.  The two defining rules are

    n_i * n_i = (-1)^{coroot_i}
    n_i * (-1)^lam = (-1)^{s_i lam} * n_i

and products of canonical representatives are reduced with the standard
length-descent fold, which is reduced-word independent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import IntVec, identity, mat_mul, vec_int
from .rootdata import RootDatum, WeylElement


@dataclass(frozen=True)
class TitsElement:
    eps: IntVec  # exponent vector of the (-1)-torus part, reduced mod 2
    w: WeylElement

    def __post_init__(self):
        object.__setattr__(self, "eps", tuple(x % 2 for x in self.eps))


def n_of(datum: RootDatum, w: WeylElement) -> TitsElement:
    zero = tuple(0 for _ in range(datum.rank))
    return TitsElement(zero, w)


def torus_part(datum: RootDatum, eps: IntVec) -> TitsElement:
    ident = WeylElement(identity(datum.rank), ())
    return TitsElement(vec_int(eps), ident)


def _fold_generator(datum: RootDatum, eps: IntVec, w: WeylElement, i: int) -> tuple[IntVec, WeylElement]:
    """Right-multiply (eps, n(w)) by n_i."""
    s_i = datum.simple_reflection(i)
    alpha_i = datum.simple_roots[i]
    image = datum.act_on_root(w, alpha_i)
    target = WeylElement(mat_mul(w.matrix, s_i.matrix), w.word + (i,))
    if datum.is_positive(image):
        # length goes up: concatenation of reduced words stays reduced
        return eps, target
    # length drop: n(w) n_i = n(w s_i) (-1)^{(w s_i) coroot_i}
    shorter = datum.element_from_matrix(target.matrix)
    sign_vec = shorter.act(datum.simple_coroots[i])
    new_eps = tuple((a + b) % 2 for a, b in zip(eps, sign_vec))
    return new_eps, shorter


def multiply(datum: RootDatum, a: TitsElement, b: TitsElement) -> TitsElement:
    # (-1)^{eps_b} moves left through n(w_a) by the lattice action of w_a.
    moved = a.w.act(b.eps)
    eps = tuple((x + y) % 2 for x, y in zip(a.eps, moved))
    w = a.w
    # fold a reduced word of w_b; n(w_b) is independent of which one
    for i in datum.element_from_matrix(b.w.matrix).word:
        eps, w = _fold_generator(datum, eps, w, i)
    return TitsElement(eps, datum.element_from_matrix(w.matrix))


def inverse(datum: RootDatum, a: TitsElement) -> TitsElement:
    """Inverse of (eps, w): compute n(w) n(w^{-1}) = (-1)^{e0} and unwind."""
    from .rootdata import weyl_inverse

    winv = weyl_inverse(datum, a.w)
    winv = datum.element_from_matrix(winv.matrix)
    prod = multiply(datum, n_of(datum, a.w), n_of(datum, winv))
    if not prod.w.is_identity():
        raise AssertionError("n(w) n(w^{-1}) is not torus-valued")
    # n(w)^{-1} = n(w^{-1}) (-1)^{e0}; then invert the torus part of a.
    eps_total = tuple((winv.act(prod.eps)[k] + winv.act(a.eps)[k]) % 2 for k in range(datum.rank))
    return TitsElement(eps_total, winv)
