"""Adjointable maps between ladder levels.

Adjoints and operator norms are computed on the trace-scalarised inner
product ``tau(<x, y>)``.  The adjointable maps of a finite-dimensional
module form a C*-algebra acting faithfully there, so the scalar adjoint is
the module adjoint and the Hilbert-space operator norm is the module
operator norm.

Maps default to right-adjointable (``side="R"``).  Right creation
operators ``y -> y (x) z`` are left-module maps and carry ``side="L"``:
their adjoint and norm use the left inner products.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import null_space

from .algebra import DEFAULT_TOL, AlgebraElement, check_same_owner, random_complex
from .bimodule import Bimodule, ModuleElement
from .errors import (
    FullnessError,
    NotAdjointableError,
    NotCreationOperatorError,
    StructuralError,
)
from .ladder import TensorLadder


@dataclass(frozen=True, eq=False)
class AdjointableMap:
    domain: Bimodule
    codomain: Bimodule
    matrix: np.ndarray = field(repr=False)
    side: str = "R"

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.shape != (self.codomain.dim, self.domain.dim):
            raise StructuralError(
                f"matrix shape {mat.shape} does not match {self.codomain.dim}x{self.domain.dim}"
            )
        if self.side not in ("R", "L"):
            raise ValueError(f"side must be 'R' or 'L', got {self.side!r}")
        object.__setattr__(self, "matrix", mat)

    def __call__(self, x: ModuleElement) -> ModuleElement:
        check_same_owner(self.domain, x.owner)
        return ModuleElement(self.codomain, self.matrix @ x.coeffs)

    def _like(self, other: AdjointableMap) -> None:
        if (
            other.domain is not self.domain
            or other.codomain is not self.codomain
            or other.side != self.side
        ):
            raise StructuralError("maps act between different modules")

    def __add__(self, other: AdjointableMap) -> AdjointableMap:
        self._like(other)
        return AdjointableMap(self.domain, self.codomain, self.matrix + other.matrix, self.side)

    def __sub__(self, other: AdjointableMap) -> AdjointableMap:
        self._like(other)
        return AdjointableMap(self.domain, self.codomain, self.matrix - other.matrix, self.side)

    def __mul__(self, scalar) -> AdjointableMap:
        return AdjointableMap(self.domain, self.codomain, complex(scalar) * self.matrix, self.side)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __matmul__(self, other: AdjointableMap) -> AdjointableMap:
        if other.codomain is not self.domain:
            raise StructuralError("composition of non-matching maps")
        return AdjointableMap(other.domain, self.codomain, self.matrix @ other.matrix, self.side)

    def left_mul(self, a: AlgebraElement) -> AdjointableMap:
        """``(a . T)(z) = a T(z)``."""
        return AdjointableMap(
            self.domain, self.codomain, self.codomain.left_matrix(a.vec) @ self.matrix, self.side
        )

    def right_mul(self, a: AlgebraElement) -> AdjointableMap:
        """``(T . a)(z) = T(a z)``."""
        return AdjointableMap(
            self.domain, self.codomain, self.matrix @ self.domain.left_matrix(a.vec), self.side
        )

    def adjoint(self, tol: float = DEFAULT_TOL) -> AdjointableMap:
        return adjoint(self, tol)

    def norm(self) -> float:
        return map_norm(self)

    def linearity_residual(self) -> float:
        return linearity_residual(self)


def linearity_residual(T: AdjointableMap) -> float:
    """Max over algebra basis elements of ``||T(x e) - T(x) e||`` (or the left analogue)."""
    if T.side == "R":
        dom, cod = T.domain.right_action, T.codomain.right_action
    else:
        dom, cod = T.domain.left_action, T.codomain.left_action
    diff = np.einsum("ij,ajk->aik", T.matrix, dom) - np.einsum("aij,jk->aik", cod, T.matrix)
    return float(np.linalg.norm(diff, axis=(1, 2)).max(initial=0.0))


def map_norm(T: AdjointableMap) -> float:
    """Module operator norm via the trace-localised Hilbert space."""
    s = T.codomain.gram_sqrt(T.side) @ T.matrix @ T.domain.gram_inv_sqrt(T.side)
    if s.size == 0:
        return 0.0
    return float(np.linalg.norm(s, ord=2))


def adjoint(T: AdjointableMap, tol: float = DEFAULT_TOL) -> AdjointableMap:
    """The unique ``S`` with ``<T x, y> = <x, S y>`` on the map's side."""
    mat = T.domain.gram_inv(T.side) @ T.matrix.conj().T @ T.codomain.gram(T.side)
    S = AdjointableMap(T.codomain, T.domain, mat, T.side)
    scale = max(1.0, float(np.linalg.norm(mat)))
    if linearity_residual(S) > tol * scale:
        raise NotAdjointableError(
            f"adjoint fails {T.side}-linearity by {linearity_residual(S):.3e}"
        )
    return S


def identity_map(X: Bimodule) -> AdjointableMap:
    return AdjointableMap(X, X, np.eye(X.dim))


def zero_map(domain: Bimodule, codomain: Bimodule) -> AdjointableMap:
    return AdjointableMap(domain, codomain, np.zeros((codomain.dim, domain.dim)))


@lru_cache(maxsize=None)
def right_linear_basis(domain: Bimodule, codomain: Bimodule) -> np.ndarray:
    """Orthonormal basis (columns, column-major vec) of all right-linear maps."""
    dn, dm = domain.dim, codomain.dim
    eqs = [
        np.kron(rn.T, np.eye(dm)) - np.kron(np.eye(dn), rm)
        for rn, rm in zip(domain.right_action, codomain.right_action)
    ]
    return null_space(np.concatenate(eqs, axis=0))


def random_right_linear_map(domain: Bimodule, codomain: Bimodule, rng: np.random.Generator) -> AdjointableMap:
    """Random element of ``L_R(domain, codomain)``, drawn from its linear span."""
    basis = right_linear_basis(domain, codomain)
    coeffs = random_complex(rng, basis.shape[1])
    mat = (basis @ coeffs).reshape(codomain.dim, domain.dim, order="F")
    return AdjointableMap(domain, codomain, mat)


# ---------------------------------------------------------------------------
# creation operators and symbols
# ---------------------------------------------------------------------------
def creation_left(y: ModuleElement, n: int, ladder: TensorLadder) -> AdjointableMap:
    """``T^n_y : z -> y (x) z`` from level ``n`` to level ``n + p``."""
    p = ladder.level_of(y.owner)
    c = ladder.product_tensor(p, n)
    return AdjointableMap(ladder.level(n), ladder.level(n + p), np.einsum("rab,a->rb", c, y.coeffs))


def creation_right(z: ModuleElement, n: int, ladder: TensorLadder) -> AdjointableMap:
    """``R_z : y -> y (x) z`` from level ``n`` to level ``n + q``; a left-module map."""
    q = ladder.level_of(z.owner)
    c = ladder.product_tensor(n, q)
    return AdjointableMap(
        ladder.level(n), ladder.level(n + q), np.einsum("rab,b->ra", c, z.coeffs), side="L"
    )


@lru_cache(maxsize=None)
def _unit_decomposition(Z: Bimodule, tol: float):
    d = Z.dim
    M = Z.inner_L.reshape(d * d, -1).T
    unit = Z.left_algebra.unit_vector
    coef, *_ = np.linalg.lstsq(M, unit, rcond=None)
    residual = float(Z.left_algebra.norms(M @ coef - unit))
    if residual > tol:
        raise FullnessError(f"unit is not spanned by left inner products (residual {residual:.3e})")
    coef = coef.reshape(d, d)
    # sum_ij c_ij <e_i, e_j>_L = sum_j <sum_i c_ij e_i, e_j>_L
    return tuple((coef[:, j].copy(), np.eye(d, dtype=complex)[j]) for j in range(d))


def unit_decomposition(Z: Bimodule, tol: float = 1e-10) -> list[tuple[ModuleElement, ModuleElement]]:
    """Pairs ``(u_i, v_i)`` with ``sum_i <u_i, v_i>_L = 1``."""
    return [(ModuleElement(Z, u), ModuleElement(Z, v)) for u, v in _unit_decomposition(Z, tol)]


@lru_cache(maxsize=None)
def _symbol_operator(ladder: TensorLadder, n: int, m: int) -> np.ndarray:
    """Tensor ``K`` with ``symbol(T) = einsum('pij,ji->p', K, T)``.

    ``symbol(T) = sum_i R_{v_i}^* T u_i`` for a unit decomposition of level
    ``n``, the adjoints being taken on the left inner products.
    """
    p = m - n
    Zn, Yp, Wm = ladder.level(n), ladder.level(p), ladder.level(m)
    c = ladder.product_tensor(p, n)
    K = np.zeros((Yp.dim, Zn.dim, Wm.dim), dtype=complex)
    for u, v in _unit_decomposition(Zn, 1e-10):
        r_v = np.einsum("rab,b->ra", c, v)
        r_adj = Yp.gram_inv("L") @ r_v.conj().T @ Wm.gram("L")
        K += np.einsum("pw,j->pjw", r_adj, u)
    return K


def extract_symbol(
    T: AdjointableMap, ladder: TensorLadder, tol: float = DEFAULT_TOL, check: bool = True
) -> ModuleElement:
    """The ``eta`` in level ``m - n`` with ``T = T^n_eta``."""
    n, m = ladder.level_of(T.domain), ladder.level_of(T.codomain)
    K = _symbol_operator(ladder, n, m)
    eta = ModuleElement(ladder.level(m - n), np.einsum("pjw,wj->p", K, T.matrix))
    if check:
        residual = map_norm(T - creation_left(eta, n, ladder))
        if residual > tol * max(1.0, map_norm(T)):
            raise NotCreationOperatorError(residual)
    return eta


def multiplier_H(phi: AdjointableMap, n: int, ladder: TensorLadder) -> AdjointableMap:
    """``H(phi)(b z) = phi(b) (x) z``, realised with ``b = 1``."""
    if ladder.level_of(phi.domain) != 0:
        raise StructuralError("H expects a map out of level 0")
    one = ladder.level(0).element(ladder.algebra.unit_vector)
    return creation_left(phi(one), n, ladder)


def multiplier_J(T: AdjointableMap, ladder: TensorLadder, tol: float = DEFAULT_TOL) -> AdjointableMap:
    """``J(T) = T^0_eta`` for the symbol ``eta`` of ``T``."""
    return creation_left(extract_symbol(T, ladder, tol), 0, ladder)


def alpha_shift(
    T: AdjointableMap, ladder: TensorLadder, tol: float = DEFAULT_TOL, check: bool = True
) -> AdjointableMap:
    """``alpha^{n,m}``: ``L_R(level n, level m) -> L_R(level n-1, level m-1)``."""
    n = ladder.level_of(T.domain)
    return creation_left(extract_symbol(T, ladder, tol, check), n - 1, ladder)


def alpha_shift_inverse(T: AdjointableMap, ladder: TensorLadder, tol: float = DEFAULT_TOL) -> AdjointableMap:
    n = ladder.level_of(T.domain)
    return creation_left(extract_symbol(T, ladder, tol), n + 1, ladder)
