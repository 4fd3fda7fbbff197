"""JSON formats for models, operators, cross-sections and reports.

Complex numbers are ``[re, im]`` pairs.  Operator and section coefficients
refer to the deterministic ladder bases: level 1 is the model's own basis,
level ``n + 1`` the Gram-Schmidt quotient of ``level(n) (x) X`` taken over
the lexicographic basis ``e_i (x) f_j``, level ``-n`` the conjugate basis of
level ``n``, and level 0 the matrix units of ``A`` (block order, row-major).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .adjointable import AdjointableMap
from .algebra import CStarAlgebra
from .bimodule import Bimodule
from .crossed_product import CrossSection
from .errors import StructuralError
from .l2 import OperatorMatrix
from .ladder import TensorLadder, build_ladder
from .models import BUILTIN_MODELS, ModelSpec, build_bimodule, builtin_models

MODEL_FORMAT = "bimodule-toeplitz/model"
OPERATOR_FORMAT = "bimodule-toeplitz/operator"
SECTION_FORMAT = "bimodule-toeplitz/section"


def to_pairs(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def from_pairs(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise StructuralError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def write_json(obj, path) -> None:
    text = json.dumps(obj, indent=1, sort_keys=True)
    if path is None or str(path) == "-":
        print(text)
    else:
        Path(path).write_text(text + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


# -- models ------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Model:
    spec: ModelSpec
    algebra: CStarAlgebra
    bimodule: Bimodule
    ladder: TensorLadder

    def __iter__(self):
        return iter((self.algebra, self.bimodule, self.ladder))


def model_to_dict(spec: ModelSpec) -> dict:
    return {
        "format": MODEL_FORMAT,
        "name": spec.name,
        "algebra": {"blocks": list(spec.blocks)},
        "bimodule": spec.bimodule,
        "window": spec.window,
        "tolerances": dict(spec.tolerances),
    }


def model_from_dict(data: dict) -> ModelSpec:
    try:
        blocks = data["algebra"]["blocks"]
        bimod = data["bimodule"]
    except (KeyError, TypeError) as exc:
        raise StructuralError(f"model file lacks field {exc}") from None
    return ModelSpec(
        blocks=[int(b) for b in blocks],
        bimodule=bimod,
        window=data.get("window", 4),
        tolerances=data.get("tolerances", {}),
        name=data.get("name", ""),
    )


def explicit_bimodule(X: Bimodule) -> dict:
    return {
        "explicit": {
            "left_action": to_pairs(X.left_action),
            "right_action": to_pairs(X.right_action),
            "inner_L": to_pairs(X.inner_L),
            "inner_R": to_pairs(X.inner_R),
        }
    }


def save_model(spec: ModelSpec, path) -> None:
    write_json(model_to_dict(spec), path)


def resolve_spec(source) -> ModelSpec:
    """A model path, or the name of a builtin model."""
    if isinstance(source, ModelSpec):
        return source
    text = str(source)
    if text.startswith("builtin:"):
        return builtin_models(text.split(":", 1)[1])
    if not Path(text).exists():
        if text in BUILTIN_MODELS:
            return builtin_models(text)
        raise FileNotFoundError(
            f"model {text!r} is neither a file nor a builtin name ({', '.join(sorted(BUILTIN_MODELS))})"
        )
    return model_from_dict(read_json(text))


def load_model(source, validate: bool = True, window: int | None = None) -> Model:
    """Parse, validate and build the ladder (levels ``-2N .. 2N``)."""
    spec = resolve_spec(source)
    if window is not None:
        spec = ModelSpec(spec.blocks, spec.bimodule, window, spec.tolerances, spec.name)
    X = build_bimodule(spec)
    ladder = build_ladder(X, spec.window, validate=validate, tol=spec.tol("arithmetic"))
    return Model(spec, X.left_algebra, X, ladder)


# -- operators ---------------------------------------------------------------
def operator_to_dict(M: OperatorMatrix) -> dict:
    return {
        "format": OPERATOR_FORMAT,
        "window": M.radius,
        "level_dims": {str(k): M.ladder.dim(k) for k in range(-M.radius, M.radius + 1)},
        "blocks": [
            {"i": i, "j": j, "matrix": to_pairs(M.blocks[(i, j)].matrix)} for (i, j) in M.indices()
        ],
    }


def operator_from_dict(data: dict, ladder: TensorLadder) -> OperatorMatrix:
    N = int(data["window"])
    blocks = {}
    for b in data["blocks"]:
        i, j = int(b["i"]), int(b["j"])
        blocks[(i, j)] = AdjointableMap(ladder.level(j), ladder.level(i), from_pairs(b["matrix"]))
    for i in range(-N, N + 1):
        for j in range(-N, N + 1):
            if (i, j) not in blocks:
                blocks[(i, j)] = AdjointableMap(
                    ladder.level(j), ladder.level(i), np.zeros((ladder.dim(i), ladder.dim(j)))
                )
    return OperatorMatrix(ladder, N, blocks)


def save_operator(M: OperatorMatrix, path) -> None:
    write_json(operator_to_dict(M), path)


def load_operator(path, ladder: TensorLadder) -> OperatorMatrix:
    return operator_from_dict(read_json(path), ladder)


# -- sections ----------------------------------------------------------------
def section_to_dict(f: CrossSection) -> dict:
    return {
        "format": SECTION_FORMAT,
        "values": [{"k": k, "coeffs": to_pairs(f.values[k].coeffs)} for k in f.support],
    }


def section_from_dict(data: dict, ladder: TensorLadder) -> CrossSection:
    return CrossSection.from_coeffs(ladder, {int(v["k"]): from_pairs(v["coeffs"]) for v in data["values"]})


def save_section(f: CrossSection, path) -> None:
    write_json(section_to_dict(f), path)


def load_section(path, ladder: TensorLadder) -> CrossSection:
    return section_from_dict(read_json(path), ladder)
