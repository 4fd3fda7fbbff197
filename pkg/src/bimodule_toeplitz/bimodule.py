"""Imprimitivity bimodules given by explicit structure tensors.

A bimodule ``X`` over ``A`` (left) and ``B`` (right) of vector-space
dimension ``d`` is stored as four dense tensors written against the
matrix-unit bases of ``A`` and ``B`` and a fixed basis ``e_1..e_d`` of ``X``:

``left_action[a]``   (dA, d, d)  matrix of ``x -> e_a x`` on coefficients
``right_action[b]``  (dB, d, d)  matrix of ``x -> x e_b``
``inner_L[i, j]``    (d, d, dA)  ``<e_i, e_j>_L``; linear in the first slot
``inner_R[i, j]``    (d, d, dB)  ``<e_i, e_j>_R``; linear in the second slot
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import null_space, sqrtm

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    CStarAlgebra,
    check_same_owner,
    random_complex,
)
from .errors import AxiomViolationError, InvalidModuleError, StructuralError

NULL_TOL_FACTOR = 1e-10


@dataclass(frozen=True, eq=False)
class Bimodule:
    left_algebra: CStarAlgebra
    right_algebra: CStarAlgebra
    left_action: np.ndarray = field(repr=False)
    right_action: np.ndarray = field(repr=False)
    inner_L: np.ndarray = field(repr=False)
    inner_R: np.ndarray = field(repr=False)
    name: str = ""

    def __post_init__(self):
        la = np.asarray(self.left_action, dtype=complex)
        ra = np.asarray(self.right_action, dtype=complex)
        gl = np.asarray(self.inner_L, dtype=complex)
        gr = np.asarray(self.inner_R, dtype=complex)
        d = la.shape[-1] if la.ndim == 3 else -1
        dA, dB = self.left_algebra.dim, self.right_algebra.dim
        expected = {
            "left_action": (la.shape, (dA, d, d)),
            "right_action": (ra.shape, (dB, d, d)),
            "inner_L": (gl.shape, (d, d, dA)),
            "inner_R": (gr.shape, (d, d, dB)),
        }
        for key, (got, want) in expected.items():
            if d <= 0 or got != want:
                raise StructuralError(f"{key} has shape {got}, expected {want}")
        for key, val in zip(
            ("left_action", "right_action", "inner_L", "inner_R"), (la, ra, gl, gr)
        ):
            val.setflags(write=False)
            object.__setattr__(self, key, val)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Bimodule{label}({self.left_algebra!r}-{self.right_algebra!r}, dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.left_action.shape[-1]

    # -- coefficient-level kernels -------------------------------------
    def left_matrix(self, a: np.ndarray) -> np.ndarray:
        return np.einsum("a,aij->ij", a, self.left_action)

    def right_matrix(self, b: np.ndarray) -> np.ndarray:
        return np.einsum("b,bij->ij", b, self.right_action)

    def inner_R_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.conj(x), y, self.inner_R)

    def inner_L_vec(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return np.einsum("i,j,ijk->k", x, np.conj(y), self.inner_L)

    @cached_property
    def gram_R(self) -> np.ndarray:
        """Hermitian Gram matrix of ``tau(<., .>_R)``, conjugate-linear in the row."""
        return self.inner_R @ self.right_algebra.trace_vector

    @cached_property
    def gram_L(self) -> np.ndarray:
        """Hermitian Gram matrix of ``tau(<., .>_L)`` in the same convention as ``gram_R``."""
        return (self.inner_L @ self.left_algebra.trace_vector).T

    def gram(self, side: str) -> np.ndarray:
        return self.gram_R if side == "R" else self.gram_L

    @cached_property
    def _gram_factors(self) -> dict:
        out = {}
        for side in ("R", "L"):
            w, v = np.linalg.eigh(self.gram(side))
            out[side] = (
                (v * np.sqrt(w)) @ v.conj().T,
                (v / np.sqrt(w)) @ v.conj().T,
                (v / w) @ v.conj().T,
            )
        return out

    def gram_sqrt(self, side: str = "R") -> np.ndarray:
        return self._gram_factors[side][0]

    def gram_inv_sqrt(self, side: str = "R") -> np.ndarray:
        return self._gram_factors[side][1]

    def gram_inv(self, side: str = "R") -> np.ndarray:
        return self._gram_factors[side][2]

    # -- elements --------------------------------------------------------
    def element(self, coeffs) -> ModuleElement:
        if isinstance(coeffs, ModuleElement):
            check_same_owner(self, coeffs.owner)
            return coeffs
        vec = np.asarray(coeffs, dtype=complex)
        if vec.shape != (self.dim,):
            raise StructuralError(f"expected {self.dim} coefficients, got shape {vec.shape}")
        return ModuleElement(self, vec)

    def zero(self) -> ModuleElement:
        return ModuleElement(self, np.zeros(self.dim, dtype=complex))

    def basis(self) -> list[ModuleElement]:
        eye = np.eye(self.dim, dtype=complex)
        return [ModuleElement(self, eye[i]) for i in range(self.dim)]

    def random(self, rng: np.random.Generator) -> ModuleElement:
        return ModuleElement(self, random_complex(rng, self.dim))


@dataclass(frozen=True, eq=False)
class ModuleElement:
    owner: Bimodule
    coeffs: np.ndarray = field(repr=False)

    def __add__(self, other: ModuleElement) -> ModuleElement:
        check_same_owner(self.owner, other.owner)
        return ModuleElement(self.owner, self.coeffs + other.coeffs)

    def __sub__(self, other: ModuleElement) -> ModuleElement:
        check_same_owner(self.owner, other.owner)
        return ModuleElement(self.owner, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> ModuleElement:
        return ModuleElement(self.owner, complex(scalar) * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def left_act(self, a: AlgebraElement) -> ModuleElement:
        """``a x`` for ``a`` in the left algebra."""
        check_same_owner(self.owner.left_algebra, a.owner)
        return ModuleElement(self.owner, self.owner.left_matrix(a.vec) @ self.coeffs)

    def right_act(self, b: AlgebraElement) -> ModuleElement:
        """``x b`` for ``b`` in the right algebra."""
        check_same_owner(self.owner.right_algebra, b.owner)
        return ModuleElement(self.owner, self.owner.right_matrix(b.vec) @ self.coeffs)

    def norm(self) -> float:
        return module_norm(self)

    def __repr__(self):
        return f"ModuleElement({self.owner!r}, {np.round(self.coeffs, 6).tolist()})"


def evaluate_inner(side: str, x: ModuleElement, y: ModuleElement) -> AlgebraElement:
    """``<x, y>_L`` (side ``"L"``) or ``<x, y>_R`` (side ``"R"``)."""
    check_same_owner(x.owner, y.owner)
    X = x.owner
    if side == "R":
        return AlgebraElement(X.right_algebra, X.inner_R_vec(x.coeffs, y.coeffs))
    if side == "L":
        return AlgebraElement(X.left_algebra, X.inner_L_vec(x.coeffs, y.coeffs))
    raise ValueError(f"side must be 'L' or 'R', got {side!r}")


def module_norm(x: ModuleElement) -> float:
    """``||<x, x>_R||^{1/2}``."""
    X = x.owner
    val = X.right_algebra.norms(X.inner_R_vec(x.coeffs, x.coeffs))
    return float(np.sqrt(max(float(val), 0.0)))


def module_norms(X: Bimodule, coeffs: np.ndarray, side: str = "R") -> np.ndarray:
    """Module norms of a stack of coefficient vectors (trailing axis)."""
    if side == "R":
        vals = np.einsum("...i,...j,ijk->...k", np.conj(coeffs), coeffs, X.inner_R)
        return np.sqrt(np.maximum(X.right_algebra.norms(vals), 0.0))
    vals = np.einsum("...i,...j,ijk->...k", coeffs, np.conj(coeffs), X.inner_L)
    return np.sqrt(np.maximum(X.left_algebra.norms(vals), 0.0))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Residual:
    name: str
    value: float
    passed: bool


@dataclass(frozen=True)
class ValidationReport:
    module: str
    items: tuple[Residual, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.items)

    @property
    def failed(self) -> list[str]:
        return [r.name for r in self.items if not r.passed]

    def __getitem__(self, name: str) -> Residual:
        for r in self.items:
            if r.name == name:
                return r
        raise KeyError(name)

    def max_residual(self) -> float:
        return max(
            (r.value for r in self.items if not r.name.endswith(("definiteness", "rank"))),
            default=0.0,
        )


def _block_quadratic_forms(tensor: np.ndarray, alg: CStarAlgebra):
    """Hermitian matrices whose positivity is equivalent to ``<x, x> >= 0``."""
    d = tensor.shape[0]
    out = []
    for blk in alg.split(tensor):
        n = blk.shape[-1]
        # R: conj(x_a xi_p) (x_b xi_q); L: conj(conj(x_a) xi_p) (conj(x_b) xi_q)
        out.append(blk.transpose(0, 2, 1, 3).reshape(d * n, d * n))
    return out


def _psd_violation(mats) -> float:
    worst = 0.0
    for k in mats:
        herm = (k + k.conj().T) / 2
        worst = max(worst, -float(np.linalg.eigvalsh(herm).min()))
    return max(worst, 0.0)


def _span_rank(tensor: np.ndarray, tol: float) -> int:
    flat = tensor.reshape(-1, tensor.shape[-1])
    sv = np.linalg.svd(flat, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def validate_bimodule(X: Bimodule, tol: float = DEFAULT_TOL, seed: int = 0) -> ValidationReport:
    """Evaluate every Hilbert-bimodule axiom on basis data.

    Residuals are C*-norms (algebra-valued identities) or Euclidean
    coefficient norms (module-valued identities), maximised over basis
    triples.  Definiteness is reported as the smallest eigenvalue of the
    trace-scalarised Gram matrix relative to its largest; rank entries are
    compared against the algebra dimension.
    """
    A, B = X.left_algebra, X.right_algebra
    d = X.dim
    LA, RA, GL, GR = X.left_action, X.right_action, X.inner_L, X.inner_R
    cA, cB = A.structure_constants, B.structure_constants
    items: list[Residual] = []

    def add(name, value, ok=None):
        value = float(value)
        items.append(Residual(name, value, bool(value < tol) if ok is None else bool(ok)))

    rng = np.random.default_rng(seed)
    x, y, z = (random_complex(rng, d) for _ in range(3))
    lam, mu = random_complex(rng, 2)
    lin_R = X.inner_R_vec(x, lam * y + mu * z) - lam * X.inner_R_vec(x, y) - mu * X.inner_R_vec(x, z)
    lin_L = X.inner_L_vec(lam * x + mu * y, z) - lam * X.inner_L_vec(x, z) - mu * X.inner_L_vec(y, z)
    add("inner_R_linearity", B.norms(lin_R))
    add("inner_L_linearity", A.norms(lin_L))

    # <e_i, e_j b>_R - <e_i, e_j>_R b
    lhs = np.einsum("bmj,imk->ijbk", RA, GR)
    rhs = np.einsum("ijp,pbk->ijbk", GR, cB)
    add("inner_R_right_linear", B.norms(lhs - rhs).max())
    # <a e_i, e_j>_L - a <e_i, e_j>_L
    lhs = np.einsum("ami,mjk->ijak", LA, GL)
    rhs = np.einsum("ijp,apk->ijak", GL, cA)
    add("inner_L_left_linear", A.norms(lhs - rhs).max())

    add("inner_R_symmetry", B.norms(GR.transpose(1, 0, 2) - B.star_vec(GR)).max())
    add("inner_L_symmetry", A.norms(GL.transpose(1, 0, 2) - A.star_vec(GL)).max())

    add("inner_R_positivity", _psd_violation(_block_quadratic_forms(GR, B)))
    add("inner_L_positivity", _psd_violation(_block_quadratic_forms(GL, A)))

    for side, gram in (("R", X.gram_R), ("L", X.gram_L)):
        ev = np.linalg.eigvalsh((gram + gram.conj().T) / 2)
        ratio = ev.min() / ev.max() if ev.max() > 0 else -1.0
        add(f"inner_{side}_definiteness", ratio, ok=ratio > tol)

    # L(e_a e_b) = L(e_a) L(e_b)
    lhs = np.einsum("abk,kij->abij", cA, LA)
    rhs = np.einsum("aim,bmj->abij", LA, LA)
    add("left_action_homomorphism", np.abs(lhs - rhs).max(initial=0.0))
    add("left_unit", np.abs(X.left_matrix(A.unit_vector) - np.eye(d)).max())
    # x (e_a e_b) = (x e_a) e_b
    lhs = np.einsum("abk,kij->abij", cB, RA)
    rhs = np.einsum("bim,amj->abij", RA, RA)
    add("right_action_homomorphism", np.abs(lhs - rhs).max(initial=0.0))
    add("right_unit", np.abs(X.right_matrix(B.unit_vector) - np.eye(d)).max())
    comm = np.einsum("aim,bmj->abij", LA, RA) - np.einsum("bim,amj->abij", RA, LA)
    add("actions_commute", np.abs(comm).max(initial=0.0))

    # <e_i, e_j>_L e_k - e_i <e_j, e_k>_R
    lhs = np.einsum("ija,amk->ijkm", GL, LA)
    rhs = np.einsum("jkb,bmi->ijkm", GR, RA)
    add("imprimitivity", np.linalg.norm(lhs - rhs, axis=-1).max())

    # <x b, y>_L - <x, y b*>_L and <a x, y>_R - <x, a* y>_R
    RA_star = RA[B.star_index]
    lhs = np.einsum("bmi,mjk->bijk", RA, GL)
    rhs = np.einsum("bmj,imk->bijk", np.conj(RA_star), GL)
    add("adjointable_L", A.norms(lhs - rhs).max())
    LA_star = LA[A.star_index]
    lhs = np.einsum("ami,mjk->aijk", np.conj(LA), GR)
    rhs = np.einsum("amj,imk->aijk", LA_star, GR)
    add("adjointable_R", B.norms(lhs - rhs).max())

    rank_R, rank_L = _span_rank(GR, 1e-10), _span_rank(GL, 1e-10)
    add("fullness_R_rank", rank_R, ok=rank_R == B.dim)
    add("fullness_L_rank", rank_L, ok=rank_L == A.dim)

    samples = random_complex(rng, 20, d)
    gap = np.abs(module_norms(X, samples, "L") - module_norms(X, samples, "R"))
    add("norm_consistency", gap.max())
    return ValidationReport(X.name or repr(X), tuple(items))


def require_valid(X: Bimodule, tol: float = DEFAULT_TOL) -> ValidationReport:
    report = validate_bimodule(X, tol)
    if not report.passed:
        raise AxiomViolationError(report.failed, report)
    return report


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------
def algebra_as_bimodule(A: CStarAlgebra) -> Bimodule:
    """``A`` over itself with ``<a, b>_L = a b*`` and ``<a, b>_R = a* b``."""
    c = A.structure_constants
    left = c.transpose(0, 2, 1)  # left[a][k, j] = c[a, j, k]
    right = c.transpose(1, 2, 0)  # right[b][k, i] = c[i, b, k]
    # <e_i, e_j>_L = e_i e_j*,  <e_i, e_j>_R = e_i* e_j
    inner_L = c[:, A.star_index, :]
    inner_R = c[A.star_index, :, :]
    return Bimodule(A, A, left, right, inner_L, inner_R, name="A")


def dual_bimodule(X: Bimodule, validate: bool = False) -> Bimodule:
    """Conjugate bimodule with sides and inner products exchanged.

    Coefficients ``c`` in the dual represent the element ``conj(c)~`` of
    ``X``, which keeps the dual a linear coordinate space.
    """
    if validate:
        require_valid(X)
    A, B = X.left_algebra, X.right_algebra
    left = np.conj(X.right_action[B.star_index])
    right = np.conj(X.left_action[A.star_index])
    name = f"dual({X.name})" if X.name else ""
    return Bimodule(B, A, left, right, X.inner_R, X.inner_L, name=name)


@dataclass(frozen=True, eq=False)
class TensorQuotient:
    """Quotient of the algebraic tensor product onto a Gram-orthonormal basis.

    ``basis`` (D, r) holds representatives of the new basis vectors in the
    lexicographic algebraic basis ``e_i (x) f_j``; ``projection`` (r, D)
    sends any algebraic tensor to its coordinates.
    """

    left: Bimodule
    right: Bimodule
    basis: np.ndarray = field(repr=False)
    projection: np.ndarray = field(repr=False)
    gram: np.ndarray = field(repr=False)

    def image(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.projection @ np.kron(x, y)

    @property
    def tensor(self) -> np.ndarray:
        """``(r, dX, dY)`` array of basis-pair images."""
        return self.projection.reshape(-1, self.left.dim, self.right.dim)


def gram_schmidt_quotient(G: np.ndarray, factor: float = NULL_TOL_FACTOR, tol: float = DEFAULT_TOL):
    """Deterministic Gram-orthonormal basis of ``C^D / null(G)``.

    Walks the standard basis in order and keeps a vector when its squared
    ``G``-residual exceeds ``factor * lambda_max(G)``.
    """
    G = (G + G.conj().T) / 2
    ev = np.linalg.eigvalsh(G)
    lam_max = max(float(ev.max()), 0.0)
    if ev.min() < -tol * max(lam_max, 1.0):
        raise InvalidModuleError(f"Gram form has eigenvalue {ev.min():.3e} < 0")
    if lam_max == 0.0:
        raise InvalidModuleError("Gram form vanishes identically")
    cutoff = factor * lam_max
    D = G.shape[0]
    kept: list[np.ndarray] = []
    for i in range(D):
        v = np.zeros(D, dtype=complex)
        v[i] = 1.0
        for _ in range(2):
            for q in kept:
                v = v - q * (q.conj() @ G @ v)
        r2 = float(np.real(v.conj() @ G @ v))
        if r2 > cutoff:
            kept.append(v / np.sqrt(r2))
    Q = np.stack(kept, axis=1)
    return Q, Q.conj().T @ G


def tensor_product(X: Bimodule, Y: Bimodule, null_tol: float = NULL_TOL_FACTOR):
    """Interior tensor product ``X (x)_B Y`` as a quotient of ``X (.) Y``.

    Returns the new bimodule and the :class:`TensorQuotient` carrying the
    quotient map.
    """
    if X.right_algebra != Y.left_algebra:
        raise StructuralError(
            f"cannot tensor: {X.right_algebra!r} differs from {Y.left_algebra!r}"
        )
    A, C = X.left_algebra, Y.right_algebra
    dX, dY = X.dim, Y.dim
    D = dX * dY
    # <e_i f_j, e_k f_l>_R = <f_j, <e_i, e_k>_R f_l>_R
    gr = np.einsum("ikb,bml,jmg->ijklg", X.inner_R, Y.left_action, Y.inner_R).reshape(D, D, C.dim)
    # <e_i f_j, e_k f_l>_L = <e_i <f_j, f_l>_L, e_k>_L
    gl = np.einsum("jlb,bmi,mka->ijkla", Y.inner_L, X.right_action, X.inner_L).reshape(D, D, A.dim)
    G = gr @ C.trace_vector
    Q, P = gram_schmidt_quotient(G)
    eyeX, eyeY = np.eye(dX), np.eye(dY)
    left = np.stack([P @ np.kron(m, eyeY) @ Q for m in X.left_action])
    right = np.stack([P @ np.kron(eyeX, m) @ Q for m in Y.right_action])
    inner_R = np.einsum("ia,jb,ijk->abk", np.conj(Q), Q, gr)
    inner_L = np.einsum("ia,jb,ijk->abk", Q, np.conj(Q), gl)
    name = f"({X.name} (x) {Y.name})" if X.name and Y.name else ""
    Z = Bimodule(A, C, left, right, inner_L, inner_R, name=name)
    return Z, TensorQuotient(X, Y, Q, P, G)


def bimodule_isomorphism(X: Bimodule, Y: Bimodule, tol: float = DEFAULT_TOL, seed: int = 0):
    """Unitary bimodule isomorphism ``X -> Y`` as a matrix, or ``None``.

    Takes the unitary part of a generic bimodule intertwiner and checks that
    it carries both inner products of ``X`` onto those of ``Y``.
    """
    if X.left_algebra != Y.left_algebra or X.right_algebra != Y.right_algebra:
        return None
    if X.dim != Y.dim:
        return None
    d = X.dim
    eqs = []
    for mx, my in zip(X.left_action, Y.left_action):
        eqs.append(np.kron(np.eye(d), my) - np.kron(mx.T, np.eye(d)))
    for mx, my in zip(X.right_action, Y.right_action):
        eqs.append(np.kron(np.eye(d), my) - np.kron(mx.T, np.eye(d)))
    ns = null_space(np.concatenate(eqs, axis=0))
    if ns.shape[1] == 0:
        return None
    rng = np.random.default_rng(seed)
    T = (ns @ random_complex(rng, ns.shape[1])).reshape(d, d, order="F")
    gx, gy = sqrtm(X.gram_R), sqrtm(Y.gram_R)
    S = gy @ T @ np.linalg.inv(gx)
    u, _, vh = np.linalg.svd(S)
    U = np.linalg.inv(gy) @ (u @ vh) @ gx
    res_R = np.einsum("ai,bj,abk->ijk", np.conj(U), U, Y.inner_R) - X.inner_R
    res_L = np.einsum("ai,bj,abk->ijk", U, np.conj(U), Y.inner_L) - X.inner_L
    if max(np.abs(res_R).max(), np.abs(res_L).max()) > tol:
        return None
    return U
