"""The tensor-power ladder ``X^{(x)n}`` for ``n`` in ``[-L, L]``.

Level 0 is ``A`` over itself, level 1 is ``X``, level ``n + 1`` is the
Gram quotient of ``level(n) (x) X``, and level ``-n`` is the dual of level
``n``.  A dual coefficient vector ``c`` stands for ``conj(c)~``; under this
convention the flip ``x_1 (x) ... (x) x_n -> x_n~ (x) ... (x) x_1~`` used to
identify ``dual(X^{(x)n})`` with ``dual(X)^{(x)n}`` is plain coefficient
conjugation.

Every product ``level m x level n -> level m+n`` is stored as a dense
tensor ``C[(m, n)]`` of shape ``(d_{m+n}, d_m, d_n)``.  Mixed-sign products
use the identifications ``x (x) y~ = <x, y>_L`` and ``x~ (x) y = <x, y>_R``,
collapsing adjacent dual factors from the interface outwards, which equals
pairing the touching block of factors through the level-``k`` inner product.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, CStarAlgebra
from .bimodule import (
    Bimodule,
    ModuleElement,
    TensorQuotient,
    ValidationReport,
    algebra_as_bimodule,
    dual_bimodule,
    require_valid,
    tensor_product,
    validate_bimodule,
)
from .errors import OutOfRangeError, StructuralError


def _swap(c: np.ndarray) -> np.ndarray:
    """Contraction tensor of the reversed product, conjugated."""
    return np.conj(c).transpose(0, 2, 1)


@dataclass(frozen=True, eq=False)
class TensorLadder:
    base: Bimodule
    radius: int
    levels: Mapping[int, Bimodule] = field(repr=False)
    quotients: Mapping[int, TensorQuotient] = field(repr=False)
    products: Mapping[tuple[int, int], np.ndarray] = field(repr=False)

    @property
    def algebra(self) -> CStarAlgebra:
        return self.base.left_algebra

    @property
    def max_level(self) -> int:
        return 2 * self.radius

    def level(self, n: int) -> Bimodule:
        try:
            return self.levels[n]
        except KeyError:
            raise OutOfRangeError(f"level {n} outside [-{self.max_level}, {self.max_level}]") from None

    def dim(self, n: int) -> int:
        return self.level(n).dim

    def level_of(self, X: Bimodule) -> int:
        for n, Y in self.levels.items():
            if Y is X:
                return n
        raise StructuralError(f"{X!r} is not a level of this ladder")

    def product_tensor(self, m: int, n: int) -> np.ndarray:
        try:
            return self.products[(m, n)]
        except KeyError:
            raise OutOfRangeError(f"product of levels {m} and {n} outside ladder range") from None

    def element(self, n: int, coeffs) -> ModuleElement:
        return self.level(n).element(coeffs)

    def random(self, n: int, rng: np.random.Generator) -> ModuleElement:
        return self.level(n).random(rng)

    def validate(self, tol: float = DEFAULT_TOL) -> dict[int, ValidationReport]:
        return {n: validate_bimodule(self.levels[n], tol) for n in sorted(self.levels)}


def _positive_products(levels, quotients, L):
    C: dict[tuple[int, int], np.ndarray] = {}
    for n in range(0, L + 1):
        C[(0, n)] = levels[n].left_action.transpose(1, 0, 2)
        C[(n, 0)] = levels[n].right_action.transpose(1, 2, 0)
    for p in range(1, L):
        C[(p, 1)] = quotients[p + 1].tensor
    dX = levels[1].dim
    for q in range(2, L + 1):
        lift = quotients[q].basis.reshape(levels[q - 1].dim, dX, -1)
        for p in range(1, L - q + 1):
            C[(p, q)] = np.einsum(
                "uxb,sau,rsx->rab", lift, C[(p, q - 1)], C[(p + q - 1, 1)], optimize=True
            )
    return C


def _lift(c: np.ndarray) -> np.ndarray:
    """Right inverse of the flattened product map ``(d_p d_k) -> d_m``."""
    m = c.reshape(c.shape[0], -1)
    return np.linalg.pinv(m, rcond=1e-10).reshape(c.shape[1], c.shape[2], c.shape[0])


def _mixed_products(levels, C, L):
    for m in range(1, L + 1):
        for k in range(1, m + 1):
            # s (x) t~ with s = s' (x) s'', s'' in level k:  s' <s'', t>_L
            p = m - k
            lift = _lift(C[(p, k)])
            C[(m, -k)] = np.einsum(
                "abs,bjz,zra->rsj", lift, levels[k].inner_L, levels[p].right_action, optimize=True
            )
            # s~ (x) t with t = t' (x) t'', t' in level k:  <s, t'>_R t''
            n, q = m, m - k
            lift = _lift(C[(k, q)])
            C[(-k, n)] = np.einsum(
                "abt,iaz,zrb->rit", lift, levels[k].inner_R, levels[q].left_action, optimize=True
            )
    for m in range(1, L + 1):
        for k in range(m + 1, L + 1):
            if k - m > L:
                continue
            C[(m, -k)] = _swap(C[(k, -m)])
            C[(-k, m)] = _swap(C[(-m, k)])
    for m in range(1, L + 1):
        for n in range(1, L - m + 1):
            C[(-m, -n)] = _swap(C[(n, m)])
    for n in range(1, L + 1):
        C[(0, -n)] = levels[-n].left_action.transpose(1, 0, 2)
        C[(-n, 0)] = levels[-n].right_action.transpose(1, 2, 0)
    return C


def build_ladder(X: Bimodule, radius: int, validate: bool = True, tol: float = DEFAULT_TOL) -> TensorLadder:
    """Build levels ``-2*radius .. 2*radius`` and every product between them."""
    if X.left_algebra != X.right_algebra:
        raise StructuralError("the ladder needs an A-A bimodule")
    if radius < 1:
        raise StructuralError(f"radius must be positive, got {radius}")
    if validate:
        require_valid(X, tol)
    L = 2 * radius
    levels: dict[int, Bimodule] = {0: algebra_as_bimodule(X.left_algebra), 1: X}
    quotients: dict[int, TensorQuotient] = {}
    for n in range(2, L + 1):
        levels[n], quotients[n] = tensor_product(levels[n - 1], X)
    for n in range(1, L + 1):
        levels[-n] = dual_bimodule(levels[n])
    C = _positive_products(levels, quotients, L)
    C = _mixed_products(levels, C, L)
    for arr in C.values():
        arr.setflags(write=False)
    return TensorLadder(
        X, radius, MappingProxyType(levels), MappingProxyType(quotients), MappingProxyType(C)
    )


def contract(m: int, n: int, s: ModuleElement, t: ModuleElement, ladder: TensorLadder) -> ModuleElement:
    """Product of ``s`` in level ``m`` and ``t`` in level ``n`` inside level ``m + n``."""
    if s.owner is not ladder.level(m) or t.owner is not ladder.level(n):
        raise StructuralError(f"arguments are not elements of levels {m} and {n}")
    c = ladder.product_tensor(m, n)
    return ModuleElement(ladder.level(m + n), np.einsum("rab,a,b->r", c, s.coeffs, t.coeffs))


def contract_vec(ladder: TensorLadder, m: int, n: int, s: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.einsum("rab,a,b->r", ladder.product_tensor(m, n), s, t)


def involution(x: ModuleElement, n: int, ladder: TensorLadder) -> ModuleElement:
    """The antilinear map ``level n -> level -n``; ``a -> a*`` on level 0."""
    if x.owner is not ladder.level(n):
        raise StructuralError(f"element does not belong to level {n}")
    return ModuleElement(ladder.level(-n), involution_vec(ladder, n, x.coeffs))


def involution_vec(ladder: TensorLadder, n: int, c: np.ndarray) -> np.ndarray:
    if n == 0:
        return ladder.algebra.star_vec(c)
    return np.conj(c)


def as_level_zero(a: AlgebraElement, ladder: TensorLadder) -> ModuleElement:
    return ladder.level(0).element(a.vec)
