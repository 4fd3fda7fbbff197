"""The windowed module ``l2(X)`` over ``[-N, N]`` and block operator matrices."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterator

import numpy as np

from .adjointable import AdjointableMap, alpha_shift, zero_map
from .algebra import AlgebraElement
from .bimodule import ModuleElement
from .errors import OutOfRangeError, StructuralError
from .ladder import TensorLadder

TOEPLITZ_TOL = 1e-8


def _window(N: int) -> range:
    return range(-N, N + 1)


def _check_index(k: int, N: int) -> None:
    if abs(k) > N:
        raise OutOfRangeError(f"index {k} outside window [-{N}, {N}]")


@dataclass(frozen=True, eq=False)
class WindowedL2Element:
    ladder: TensorLadder
    radius: int
    components: dict[int, ModuleElement] = field(repr=False)

    def __post_init__(self):
        if self.radius > self.ladder.radius:
            raise OutOfRangeError(f"window {self.radius} exceeds ladder radius {self.ladder.radius}")
        for k in _window(self.radius):
            c = self.components.get(k)
            if c is None or c.owner is not self.ladder.level(k):
                raise StructuralError(f"component {k} is missing or in the wrong level")

    @classmethod
    def zeros(cls, ladder: TensorLadder, N: int) -> WindowedL2Element:
        return cls(ladder, N, {k: ladder.level(k).zero() for k in _window(N)})

    @classmethod
    def random(cls, ladder: TensorLadder, N: int, rng: np.random.Generator) -> WindowedL2Element:
        return cls(ladder, N, {k: ladder.random(k, rng) for k in _window(N)})

    def __getitem__(self, k: int) -> ModuleElement:
        return project(self, k)

    def _match(self, other):
        if other.ladder is not self.ladder or other.radius != self.radius:
            raise StructuralError("window mismatch")

    def __add__(self, other: WindowedL2Element) -> WindowedL2Element:
        self._match(other)
        return WindowedL2Element(
            self.ladder, self.radius, {k: v + other.components[k] for k, v in self.components.items()}
        )

    def __sub__(self, other: WindowedL2Element) -> WindowedL2Element:
        return self + other * -1.0

    def __mul__(self, scalar) -> WindowedL2Element:
        return WindowedL2Element(
            self.ladder, self.radius, {k: v * scalar for k, v in self.components.items()}
        )

    __rmul__ = __mul__

    def norm(self) -> float:
        return l2_norm(self)


def embed(v: ModuleElement, k: int, N: int, ladder: TensorLadder) -> WindowedL2Element:
    """``v delta_k``."""
    _check_index(k, N)
    if v.owner is not ladder.level(k):
        raise StructuralError(f"element is not in level {k}")
    comps = {j: ladder.level(j).zero() for j in _window(N)}
    comps[k] = v
    return WindowedL2Element(ladder, N, comps)


def project(xi: WindowedL2Element, k: int) -> ModuleElement:
    _check_index(k, xi.radius)
    return xi.components[k]


def l2_inner(xi: WindowedL2Element, zeta: WindowedL2Element) -> AlgebraElement:
    """``sum_k <xi(k), zeta(k)>_R``."""
    xi._match(zeta)
    A = xi.ladder.algebra
    total = np.zeros(A.dim, dtype=complex)
    for k, x in xi.components.items():
        total += x.owner.inner_R_vec(x.coeffs, zeta.components[k].coeffs)
    return AlgebraElement(A, total)


def l2_norm(xi: WindowedL2Element) -> float:
    val = l2_inner(xi, xi)
    return float(np.sqrt(max(float(val.owner.norms(val.vec)), 0.0)))


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Block matrix ``[T]_{ij} : level j -> level i`` over ``|i|, |j| <= N``."""

    ladder: TensorLadder
    radius: int
    blocks: dict[tuple[int, int], AdjointableMap] = field(repr=False)

    def __post_init__(self):
        if self.radius > self.ladder.radius:
            raise OutOfRangeError(f"window {self.radius} exceeds ladder radius {self.ladder.radius}")
        for i in _window(self.radius):
            for j in _window(self.radius):
                b = self.blocks.get((i, j))
                if (
                    b is None
                    or b.domain is not self.ladder.level(j)
                    or b.codomain is not self.ladder.level(i)
                ):
                    raise StructuralError(f"block ({i}, {j}) is missing or has the wrong levels")

    @classmethod
    def from_function(
        cls, ladder: TensorLadder, N: int, fn: Callable[[int, int], AdjointableMap | None]
    ) -> OperatorMatrix:
        blocks = {}
        for i in _window(N):
            for j in _window(N):
                b = fn(i, j)
                blocks[(i, j)] = b if b is not None else zero_map(ladder.level(j), ladder.level(i))
        return cls(ladder, N, blocks)

    @classmethod
    def zeros(cls, ladder: TensorLadder, N: int) -> OperatorMatrix:
        return cls.from_function(ladder, N, lambda i, j: None)

    @classmethod
    def identity(cls, ladder: TensorLadder, N: int) -> OperatorMatrix:
        def fn(i, j):
            if i != j:
                return None
            X = ladder.level(i)
            return AdjointableMap(X, X, np.eye(X.dim))

        return cls.from_function(ladder, N, fn)

    def __getitem__(self, ij: tuple[int, int]) -> AdjointableMap:
        return self.blocks[ij]

    def indices(self) -> Iterator[tuple[int, int]]:
        return iter(sorted(self.blocks))

    def _match(self, other):
        if other.ladder is not self.ladder or other.radius != self.radius:
            raise StructuralError("window mismatch")

    def map_blocks(self, fn) -> OperatorMatrix:
        return OperatorMatrix(self.ladder, self.radius, {ij: fn(ij, b) for ij, b in self.blocks.items()})

    def __add__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._match(other)
        return self.map_blocks(lambda ij, b: b + other.blocks[ij])

    def __sub__(self, other: OperatorMatrix) -> OperatorMatrix:
        self._match(other)
        return self.map_blocks(lambda ij, b: b - other.blocks[ij])

    def __mul__(self, scalar) -> OperatorMatrix:
        return self.map_blocks(lambda ij, b: b * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: OperatorMatrix) -> OperatorMatrix:
        """Truncated product ``sum_{|l| <= N} [M]_{il} [K]_{lj}``."""
        self._match(other)
        N = self.radius

        def fn(i, j):
            acc = self.blocks[(i, -N)] @ other.blocks[(-N, j)]
            for l in range(-N + 1, N + 1):
                acc = acc + self.blocks[(i, l)] @ other.blocks[(l, j)]
            return acc

        return OperatorMatrix.from_function(self.ladder, N, fn)

    def adjoint(self) -> OperatorMatrix:
        """Blockwise adjoint, transposed."""
        return OperatorMatrix(
            self.ladder, self.radius, {(i, j): self.blocks[(j, i)].adjoint() for (i, j) in self.blocks}
        )

    def right_mul(self, a: AlgebraElement) -> OperatorMatrix:
        return self.map_blocks(lambda ij, b: b.right_mul(a))

    def left_mul(self, a: AlgebraElement) -> OperatorMatrix:
        return self.map_blocks(lambda ij, b: b.left_mul(a))

    def linearity_residual(self) -> float:
        return max(b.linearity_residual() for b in self.blocks.values())


def apply_matrix(M: OperatorMatrix, xi: WindowedL2Element) -> WindowedL2Element:
    """``(M xi)(i) = sum_j [M]_{ij} xi(j)``."""
    if M.ladder is not xi.ladder or M.radius != xi.radius:
        raise StructuralError("window mismatch")
    out = {}
    for i in _window(M.radius):
        acc = np.zeros(M.ladder.dim(i), dtype=complex)
        for j in _window(M.radius):
            acc = acc + M.blocks[(i, j)].matrix @ xi.components[j].coeffs
        out[i] = ModuleElement(M.ladder.level(i), acc)
    return WindowedL2Element(M.ladder, M.radius, out)


@dataclass(frozen=True)
class ToeplitzResult:
    is_toeplitz: bool
    max_residual: float
    worst_index: tuple[int, int] | None
    offending_index: tuple[int, int] | None
    residuals: dict[tuple[int, int], float] = field(repr=False, default_factory=dict)

    def __bool__(self):
        return self.is_toeplitz


def is_toeplitz(M: OperatorMatrix, tol: float = TOEPLITZ_TOL) -> ToeplitzResult:
    """Check ``alpha^{j,i}([M]_{ij}) = [M]_{i-1, j-1}`` wherever both blocks exist.

    ``offending_index`` is the first failing pair in lexicographic order,
    ``worst_index`` the location of the largest residual.
    """
    N = M.radius
    residuals = {}
    for i in range(-N + 1, N + 1):
        for j in range(-N + 1, N + 1):
            shifted = alpha_shift(M.blocks[(i, j)], M.ladder, check=False)
            residuals[(i, j)] = (shifted - M.blocks[(i - 1, j - 1)]).norm()
    if not residuals:
        return ToeplitzResult(True, 0.0, None, None, residuals)
    worst = max(residuals, key=lambda ij: residuals[ij])
    failing = [ij for ij in sorted(residuals) if residuals[ij] > tol]
    return ToeplitzResult(
        not failing, residuals[worst], worst, failing[0] if failing else None, residuals
    )


def sigma_seminorm(M: OperatorMatrix, v: ModuleElement, j: int) -> float:
    """``p_v(M) = ||M (v delta_j)||``."""
    return l2_norm(apply_matrix(M, embed(v, j, M.radius, M.ladder)))
