"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

An algebra ``M_{n_1} + ... + M_{n_r}`` is described by its block sizes.  Its
linear basis consists of the matrix units ``E^{(b)}_{pq}``, ordered by block
and then row-major inside each block; every structure tensor in the package
is written against this basis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import StructuralError

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class CStarAlgebra:
    """Direct sum of full complex matrix algebras."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(n) for n in self.block_dims)
        if not dims or any(n <= 0 for n in dims):
            raise StructuralError(f"block sizes must be positive, got {self.block_dims}")
        object.__setattr__(self, "block_dims", dims)

    def __eq__(self, other):
        return isinstance(other, CStarAlgebra) and self.block_dims == other.block_dims

    def __hash__(self):
        return hash(self.block_dims)

    def __repr__(self):
        return "CStarAlgebra(" + " + ".join(f"M{n}" for n in self.block_dims) + ")"

    @property
    def dim(self) -> int:
        return sum(n * n for n in self.block_dims)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, pos = [], 0
        for n in self.block_dims:
            out.append(pos)
            pos += n * n
        return tuple(out)

    @cached_property
    def star_index(self) -> np.ndarray:
        """Index permutation sending ``E_pq`` to ``E_qp``."""
        perm = np.empty(self.dim, dtype=int)
        for off, n in zip(self.offsets, self.block_dims):
            idx = np.arange(n * n).reshape(n, n)
            perm[off + idx.ravel()] = off + idx.T.ravel()
        return perm

    @cached_property
    def trace_vector(self) -> np.ndarray:
        """Coefficients of the faithful trace on the matrix-unit basis."""
        t = np.zeros(self.dim)
        for off, n in zip(self.offsets, self.block_dims):
            t[off + np.arange(n) * (n + 1)] = 1.0
        return t

    @cached_property
    def unit_vector(self) -> np.ndarray:
        return self.trace_vector.astype(complex)

    @cached_property
    def structure_constants(self) -> np.ndarray:
        """``c[i, j, k]`` with ``e_i e_j = sum_k c[i, j, k] e_k``."""
        d = self.dim
        c = np.zeros((d, d, d))
        for off, n in zip(self.offsets, self.block_dims):
            for p in range(n):
                for q in range(n):
                    for r in range(n):
                        c[off + p * n + q, off + q * n + r, off + p * n + r] = 1.0
        return c

    # -- conversions ---------------------------------------------------
    def split(self, vec: np.ndarray) -> list[np.ndarray]:
        """Cut the trailing axis of ``vec`` into per-block matrices."""
        vec = np.asarray(vec)
        lead = vec.shape[:-1]
        return [
            vec[..., off:off + n * n].reshape(lead + (n, n))
            for off, n in zip(self.offsets, self.block_dims)
        ]

    def join(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        lead = np.asarray(blocks[0]).shape[:-2]
        return np.concatenate(
            [np.asarray(b, dtype=complex).reshape(lead + (-1,)) for b in blocks], axis=-1
        )

    def element(self, data) -> AlgebraElement:
        """Build an element from a coefficient vector or a list of blocks."""
        if isinstance(data, AlgebraElement):
            check_same_owner(self, data.owner)
            return data
        if isinstance(data, (list, tuple)) and len(data) == len(self.block_dims) and all(
            np.ndim(b) == 2 for b in data
        ):
            vec = self.join(data)
        else:
            vec = np.asarray(data, dtype=complex)
        if vec.shape != (self.dim,):
            raise StructuralError(f"expected {self.dim} coefficients, got shape {vec.shape}")
        return AlgebraElement(self, vec)

    def unit(self) -> AlgebraElement:
        return AlgebraElement(self, self.unit_vector.copy())

    def zero(self) -> AlgebraElement:
        return AlgebraElement(self, np.zeros(self.dim, dtype=complex))

    def basis(self) -> list[AlgebraElement]:
        eye = np.eye(self.dim, dtype=complex)
        return [AlgebraElement(self, eye[i]) for i in range(self.dim)]

    def random(self, rng: np.random.Generator) -> AlgebraElement:
        return AlgebraElement(self, random_complex(rng, self.dim))

    # -- vectorised kernels on raw coefficient arrays --------------------
    def mul_vec(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.join([x @ y for x, y in zip(self.split(a), self.split(b))])

    def star_vec(self, a: np.ndarray) -> np.ndarray:
        return np.conj(np.asarray(a)[..., self.star_index])

    def norms(self, vecs: np.ndarray) -> np.ndarray:
        """C*-norms of a stack of coefficient vectors (trailing axis)."""
        vecs = np.asarray(vecs, dtype=complex)
        per_block = [np.linalg.norm(b, ord=2, axis=(-2, -1)) for b in self.split(vecs)]
        return np.max(np.stack(per_block, axis=0), axis=0)

    def left_regular(self, a: np.ndarray) -> np.ndarray:
        """Matrix of ``x -> a x`` on coefficient vectors."""
        return np.einsum("i,ijk->kj", a, self.structure_constants)

    def right_regular(self, a: np.ndarray) -> np.ndarray:
        """Matrix of ``x -> x a`` on coefficient vectors."""
        return np.einsum("j,ijk->ki", a, self.structure_constants)


@dataclass(frozen=True, eq=False)
class AlgebraElement:
    owner: CStarAlgebra
    vec: np.ndarray = field(repr=False)

    @property
    def blocks(self) -> list[np.ndarray]:
        return self.owner.split(self.vec)

    def __add__(self, other):
        return element_arithmetic(self, other, "add")

    def __sub__(self, other):
        return element_arithmetic(self, other * -1.0, "add")

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return element_arithmetic(self, other, "multiply")
        return element_arithmetic(self, other, "scalar")

    def __rmul__(self, scalar):
        return element_arithmetic(self, scalar, "scalar")

    def __matmul__(self, other):
        return element_arithmetic(self, other, "multiply")

    def __neg__(self):
        return self * -1.0

    def star(self) -> AlgebraElement:
        return element_arithmetic(self, None, "involution")

    def norm(self) -> float:
        return operator_norm(self)

    def __repr__(self):
        return f"AlgebraElement({self.owner!r}, {np.round(self.vec, 6).tolist()})"


def check_same_owner(a, b) -> None:
    if a != b:
        raise StructuralError(f"elements belong to different objects: {a!r} vs {b!r}")


def random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def element_arithmetic(a: AlgebraElement, b, kind: str) -> AlgebraElement:
    """Blockwise ``add``, ``multiply``, ``involution`` or ``scalar`` multiply."""
    alg = a.owner
    if kind == "involution":
        return AlgebraElement(alg, alg.star_vec(a.vec))
    if kind == "scalar":
        return AlgebraElement(alg, complex(b) * a.vec)
    if not isinstance(b, AlgebraElement):
        raise StructuralError(f"{kind} needs two algebra elements")
    check_same_owner(alg, b.owner)
    if kind == "add":
        return AlgebraElement(alg, a.vec + b.vec)
    if kind == "multiply":
        return AlgebraElement(alg, alg.mul_vec(a.vec, b.vec))
    raise ValueError(f"unknown operation {kind!r}")


def operator_norm(a: AlgebraElement) -> float:
    """Largest singular value over all blocks."""
    return float(a.owner.norms(a.vec))


def positivity_check(a: AlgebraElement, tol: float = DEFAULT_TOL) -> bool:
    """True iff ``a`` is Hermitian and has no eigenvalue below ``-tol``."""
    for blk in a.blocks:
        if np.max(np.abs(blk - blk.conj().T), initial=0.0) > tol:
            return False
        if np.linalg.eigvalsh((blk + blk.conj().T) / 2).min() < -tol:
            return False
    return True


def faithful_trace(a: AlgebraElement) -> complex:
    return complex(a.owner.trace_vector @ a.vec)
