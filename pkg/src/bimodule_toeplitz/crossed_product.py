"""Finitely supported cross-sections of the bundle ``{X^{(x)n}}``.

Cross-sections form a *-algebra under graded convolution; ``lambda_rep``
is its left regular representation on the window and
``synthesize_section`` reads a cross-section back off a Toeplitz matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .adjointable import creation_left, extract_symbol
from .algebra import DEFAULT_TOL, random_complex
from .bimodule import ModuleElement, module_norm
from .errors import NotToeplitzError, OutOfRangeError, StructuralError
from .ladder import TensorLadder, contract_vec, involution_vec
from .l2 import TOEPLITZ_TOL, OperatorMatrix, sigma_seminorm


@dataclass(frozen=True, eq=False)
class CrossSection:
    ladder: TensorLadder
    values: Mapping[int, ModuleElement] = field(repr=False)

    def __post_init__(self):
        for k, v in self.values.items():
            if v.owner is not self.ladder.level(k):
                raise StructuralError(f"value at {k} is not in level {k}")

    @classmethod
    def from_coeffs(cls, ladder: TensorLadder, coeffs: Mapping[int, np.ndarray]) -> CrossSection:
        return cls(ladder, {int(k): ladder.element(int(k), c) for k, c in coeffs.items()})

    @classmethod
    def random(cls, ladder: TensorLadder, support: Iterable[int], rng: np.random.Generator) -> CrossSection:
        return cls(ladder, {k: ladder.random(k, rng) for k in support})

    @classmethod
    def delta(cls, ladder: TensorLadder, k: int, value: ModuleElement) -> CrossSection:
        return cls(ladder, {k: value})

    @classmethod
    def unit(cls, ladder: TensorLadder) -> CrossSection:
        return cls(ladder, {0: ladder.element(0, ladder.algebra.unit_vector)})

    @property
    def support(self) -> list[int]:
        return sorted(self.values)

    def __call__(self, k: int) -> ModuleElement:
        v = self.values.get(k)
        return v if v is not None else self.ladder.level(k).zero()

    def __repr__(self):
        return f"CrossSection(support={self.support})"

    def _combine(self, other: CrossSection, sign: float) -> CrossSection:
        if other.ladder is not self.ladder:
            raise StructuralError("sections over different ladders")
        keys = set(self.values) | set(other.values)
        return CrossSection(self.ladder, {k: self(k) + other(k) * sign for k in sorted(keys)})

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, scalar) -> CrossSection:
        return CrossSection(self.ladder, {k: v * scalar for k, v in self.values.items()})

    __rmul__ = __mul__

    def truncate(self, radius: int) -> CrossSection:
        return CrossSection(self.ladder, {k: v for k, v in self.values.items() if abs(k) <= radius})


def section_distance(f: CrossSection, g: CrossSection) -> float:
    """Largest module norm of ``f(k) - g(k)`` over the joint support."""
    return max((module_norm(v) for v in (f - g).values.values()), default=0.0)


def convolve(f: CrossSection, g: CrossSection, ladder: TensorLadder | None = None) -> CrossSection:
    """``(f * g)(l) = sum_k f(l - k) (x) g(k)``."""
    ladder = ladder or f.ladder
    if f.ladder is not ladder or g.ladder is not ladder:
        raise StructuralError("sections over different ladders")
    out: dict[int, np.ndarray] = {}
    for a, fa in f.values.items():
        for b, gb in g.values.items():
            if abs(a + b) > ladder.max_level:
                raise OutOfRangeError(f"support sum {a + b} outside ladder range")
            val = contract_vec(ladder, a, b, fa.coeffs, gb.coeffs)
            out[a + b] = out[a + b] + val if a + b in out else val
    return CrossSection.from_coeffs(ladder, out)


def involute(f: CrossSection, ladder: TensorLadder | None = None) -> CrossSection:
    """``f*(k) = iota(f(-k))``, the reversed conjugate of ``f(-k)``."""
    ladder = ladder or f.ladder
    return CrossSection.from_coeffs(
        ladder, {-k: involution_vec(ladder, k, v.coeffs) for k, v in f.values.items()}
    )


def lambda_rep(f: CrossSection, N: int, ladder: TensorLadder | None = None) -> OperatorMatrix:
    """``[Lambda_f]_{ij} = T^j_{f(i-j)}``, zero off the support."""
    ladder = ladder or f.ladder
    if N > ladder.radius:
        raise OutOfRangeError(f"window {N} exceeds ladder radius {ladder.radius}")

    def block(i, j):
        v = f.values.get(i - j)
        return None if v is None else creation_left(v, j, ladder)

    return OperatorMatrix.from_function(ladder, N, block)


def truncation_safe(f: CrossSection, g: CrossSection, N: int) -> list[tuple[int, int]]:
    """Indices where the windowed product ``[Lambda_f][Lambda_g]`` misses no term."""
    out = []
    for i in range(-N, N + 1):
        for j in range(-N, N + 1):
            ls = [j + b for b in g.values if (i - j - b) in f.values]
            if all(abs(l) <= N for l in ls):
                out.append((i, j))
    return out


@dataclass(frozen=True)
class SynthesisReport:
    spreads: dict[int, float]
    columns: dict[int, list[int]]
    max_spread: float
    worst_diagonal: int | None
    tol: float

    @property
    def consistent(self) -> bool:
        return self.max_spread <= self.tol


def synthesize_section(
    M: OperatorMatrix,
    N_syn: int,
    ladder: TensorLadder | None = None,
    tol: float = TOEPLITZ_TOL,
    strict: bool = True,
) -> tuple[CrossSection, SynthesisReport]:
    """Read ``u_k`` off every admissible block of diagonal ``k``, ``|k| <= N_syn``.

    ``u_k`` is the mean of the symbols extracted from the blocks
    ``[M]_{j+k, j}``; the report records each diagonal's spread (largest
    module-norm deviation from the mean).  With ``strict`` a spread above
    ``tol`` raises :class:`NotToeplitzError`.
    """
    ladder = ladder or M.ladder
    N = M.radius
    values, spreads, columns = {}, {}, {}
    for k in range(-min(N_syn, 2 * N), min(N_syn, 2 * N) + 1):
        cols = [j for j in range(-N, N + 1) if abs(j + k) <= N]
        syms = np.stack(
            [extract_symbol(M.blocks[(j + k, j)], ladder, DEFAULT_TOL).coeffs for j in cols]
        )
        mean = syms.mean(axis=0)
        X = ladder.level(k)
        dev = [module_norm(ModuleElement(X, s - mean)) for s in syms]
        values[k] = ModuleElement(X, mean)
        spreads[k] = max(dev)
        columns[k] = cols
    worst = max(spreads, key=lambda k: spreads[k]) if spreads else None
    report = SynthesisReport(spreads, columns, spreads[worst] if spreads else 0.0, worst, tol)
    if strict and not report.consistent:
        raise NotToeplitzError(report)
    return CrossSection(ladder, values), report


@dataclass(frozen=True)
class ProbeRow:
    j: int
    probe_norm: float
    seminorm: float


def convergence_report(M: OperatorMatrix, f: CrossSection, probes) -> list[ProbeRow]:
    """``p_v(M - Lambda_f)`` for each probe ``(v, j)``."""
    D = M - lambda_rep(f, M.radius, M.ladder)
    return [ProbeRow(j, module_norm(v), sigma_seminorm(D, v, j)) for v, j in probes]


def random_probes(ladder: TensorLadder, N: int, rng: np.random.Generator, per_level: int = 1):
    return [
        (ladder.element(j, random_complex(rng, ladder.dim(j))), j)
        for j in range(-N, N + 1)
        for _ in range(per_level)
    ]
