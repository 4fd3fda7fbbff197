"""Generators for concrete imprimitivity bimodules and the builtin models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .algebra import CStarAlgebra
from .bimodule import Bimodule, algebra_as_bimodule
from .errors import StructuralError

DEFAULT_WINDOW = 4
DEFAULT_TOLERANCES = {
    "arithmetic": 1e-9,
    "toeplitz": 1e-8,
    "null": 1e-10,
}


def automorphism_bimodule(A: CStarAlgebra, theta: np.ndarray, name: str = "") -> Bimodule:
    """``A`` twisted on the right by a *-automorphism.

    ``theta`` is the matrix of the automorphism on coefficient vectors.  The
    module is ``A`` with ``x . a = x theta(a)``, ``<x, y>_L = x y*`` and
    ``<x, y>_R = theta^{-1}(x* y)``.
    """
    theta = np.asarray(theta, dtype=complex)
    if theta.shape != (A.dim, A.dim):
        raise StructuralError(f"automorphism must be {A.dim}x{A.dim}, got {theta.shape}")
    base = algebra_as_bimodule(A)
    right = np.einsum("kb,kij->bij", theta, base.right_action)
    inner_R = base.inner_R @ np.linalg.inv(theta).T
    return Bimodule(A, A, base.left_action, right, base.inner_L, inner_R, name=name)


def permutation_automorphism(A: CStarAlgebra, perm) -> np.ndarray:
    """Matrix of ``a -> (a_{perm[0]}, a_{perm[1]}, ...)`` on equal-sized blocks."""
    perm = [int(p) for p in perm]
    r = len(A.block_dims)
    if sorted(perm) != list(range(r)):
        raise StructuralError(f"{perm} is not a permutation of {r} blocks")
    if any(A.block_dims[i] != A.block_dims[p] for i, p in enumerate(perm)):
        raise StructuralError("permutation must map blocks to blocks of equal size")
    theta = np.zeros((A.dim, A.dim))
    for i, p in enumerate(perm):
        n = A.block_dims[i]
        src, dst = A.offsets[p], A.offsets[i]
        theta[dst + np.arange(n * n), src + np.arange(n * n)] = 1.0
    return theta


def inner_automorphism(A: CStarAlgebra, unitaries) -> np.ndarray:
    """Matrix of ``a -> u a u*`` with one unitary per block."""
    if len(unitaries) != len(A.block_dims):
        raise StructuralError("need one unitary per block")
    cols = []
    for e in np.eye(A.dim):
        blocks = A.split(e)
        out = []
        for u, b in zip(unitaries, blocks):
            u = np.asarray(u, dtype=complex)
            if u.shape != b.shape or not np.allclose(u @ u.conj().T, np.eye(len(u)), atol=1e-12):
                raise StructuralError("unitary has wrong shape or is not unitary")
            out.append(u @ b @ u.conj().T)
        cols.append(A.join(out))
    return np.stack(cols, axis=1)


def scalar_bimodule() -> Bimodule:
    """``C`` over itself with ``<l, m>_L = l conj(m)`` and ``<l, m>_R = conj(l) m``."""
    X = algebra_as_bimodule(CStarAlgebra((1,)))
    return Bimodule(
        X.left_algebra, X.right_algebra, X.left_action, X.right_action,
        X.inner_L, X.inner_R, name="scalar",
    )


@dataclass
class ModelSpec:
    """Parsed model description.

    ``bimodule`` is either ``{"generator": name, ...params}`` or
    ``{"explicit": {...structure tensors...}}``.
    """

    blocks: list[int]
    bimodule: dict[str, Any]
    window: int = DEFAULT_WINDOW
    tolerances: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    name: str = ""

    def __post_init__(self):
        if int(self.window) < 1:
            raise StructuralError(f"window radius must be >= 1, got {self.window}")
        self.window = int(self.window)
        self.tolerances = {**DEFAULT_TOLERANCES, **self.tolerances}

    def tol(self, key: str) -> float:
        return float(self.tolerances[key])


BUILTIN_MODELS = {
    "scalar": lambda: ModelSpec([1], {"generator": "scalar"}, name="scalar"),
    "flip": lambda: ModelSpec([1, 1], {"generator": "permutation", "permutation": [1, 0]}, name="flip"),
    "perm3": lambda: ModelSpec([1, 1, 1], {"generator": "permutation", "permutation": [1, 2, 0]}, name="perm3"),
    "m2-inner": lambda: ModelSpec(
        [2], {"generator": "inner-automorphism", "unitaries": [[[0, 1], [1, 0]]]}, name="m2-inner"
    ),
}


def builtin_models(name: str) -> ModelSpec:
    try:
        return BUILTIN_MODELS[name]()
    except KeyError:
        raise KeyError(f"unknown builtin model {name!r}; choose from {sorted(BUILTIN_MODELS)}") from None


def _complex_array(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1:] != (2,):
        raise StructuralError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def build_bimodule(spec: ModelSpec) -> Bimodule:
    A = CStarAlgebra(tuple(spec.blocks))
    desc = spec.bimodule
    label = spec.name
    if "explicit" in desc:
        ex = desc["explicit"]
        return Bimodule(
            A, A,
            _complex_array(ex["left_action"]),
            _complex_array(ex["right_action"]),
            _complex_array(ex["inner_L"]),
            _complex_array(ex["inner_R"]),
            name=label or "explicit",
        )
    gen = desc.get("generator")
    if gen == "scalar":
        if A.block_dims != (1,):
            raise StructuralError("the scalar generator needs blocks [1]")
        return scalar_bimodule()
    if gen == "flip":
        if A.block_dims != (1, 1):
            raise StructuralError("the flip generator needs blocks [1, 1]")
        return automorphism_bimodule(A, permutation_automorphism(A, [1, 0]), label or "flip")
    if gen == "permutation":
        theta = permutation_automorphism(A, desc["permutation"])
        return automorphism_bimodule(A, theta, label or "permutation")
    if gen == "inner-automorphism":
        us = desc["unitaries"]
        us = [np.asarray(u, dtype=complex) if np.ndim(u) == 2 else _complex_array(u) for u in us]
        return automorphism_bimodule(A, inner_automorphism(A, us), label or "inner-automorphism")
    raise StructuralError(f"unknown bimodule generator {gen!r}")
