"""Seeded property suite behind ``report``.

Each check draws from its own generator ``default_rng([seed, index])`` so
adding or reordering samples in one check never shifts another.  Residuals
are absolute; module-valued ones use the module norm, algebra-valued ones
the C*-norm and map-valued ones the operator norm.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .adjointable import (
    AdjointableMap,
    adjoint,
    alpha_shift,
    alpha_shift_inverse,
    creation_left,
    creation_right,
    extract_symbol,
    map_norm,
    multiplier_H,
    multiplier_J,
    random_right_linear_map,
)
from .bimodule import ModuleElement, evaluate_inner, module_norm
from .crossed_product import (
    CrossSection,
    convergence_report,
    convolve,
    involute,
    lambda_rep,
    random_probes,
    section_distance,
    synthesize_section,
    truncation_safe,
)
from .ladder import TensorLadder, contract
from .l2 import OperatorMatrix, is_toeplitz

REPORT_FORMAT = "bimodule-toeplitz/report"
SAMPLES = 20
ALPHA_RANGE = 3
SECTION_SUPPORT = range(-2, 3)
PERTURBATION = 1e-3
SPREAD_FLOOR = 1e-4


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    passed: bool
    samples: int
    runtime: float = 0.0


@dataclass(frozen=True)
class Context:
    ladder: TensorLadder
    window: int
    samples: int
    tol: float
    toeplitz_tol: float


def _levels(ctx: Context, rng, count=1, bound=None):
    L = bound if bound is not None else ctx.ladder.max_level
    return [int(v) for v in rng.integers(-L, L + 1, size=count)]


# -- checks -------------------------------------------------------------------
def check_axioms(ctx, rng):
    worst, ok, count = 0.0, True, 0
    for n, rep in ctx.ladder.validate(ctx.tol).items():
        if abs(n) > 4:
            continue
        worst = max(worst, rep.max_residual())
        ok = ok and rep.passed
        count += 1
    return worst, ok, count


def check_adjoint_identity(ctx, rng):
    worst = 0.0
    for _ in range(ctx.samples):
        n, m = _levels(ctx, rng, 2)
        T = random_right_linear_map(ctx.ladder.level(n), ctx.ladder.level(m), rng)
        S = adjoint(T, ctx.tol)
        x, y = ctx.ladder.random(n, rng), ctx.ladder.random(m, rng)
        lhs = evaluate_inner("R", T(x), y)
        rhs = evaluate_inner("R", x, S(y))
        worst = max(worst, (lhs - rhs).norm(), map_norm(adjoint(S) - T))
    return worst, None, ctx.samples


def check_contraction_associativity(ctx, rng):
    L, worst, count = ctx.ladder.max_level, 0.0, 0
    while count < ctx.samples:
        a, b, c = _levels(ctx, rng, 3, bound=ctx.window)
        if max(abs(a + b), abs(b + c), abs(a + b + c)) > L:
            continue
        s, t, u = (ctx.ladder.random(k, rng) for k in (a, b, c))
        left = contract(a + b, c, contract(a, b, s, t, ctx.ladder), u, ctx.ladder)
        right = contract(a, b + c, s, contract(b, c, t, u, ctx.ladder), ctx.ladder)
        worst = max(worst, module_norm(left - right))
        count += 1
    return worst, None, count


def _pair(ctx, rng):
    """Levels ``p, n`` with ``n + p`` in range."""
    L = ctx.ladder.max_level
    while True:
        p, n = _levels(ctx, rng, 2)
        if abs(n + p) <= L:
            return p, n


def check_creation_isometry(ctx, rng):
    worst = 0.0
    for _ in range(ctx.samples):
        p, n = _pair(ctx, rng)
        y = ctx.ladder.random(p, rng)
        worst = max(
            worst,
            abs(creation_left(y, n, ctx.ladder).norm() - module_norm(y)),
            abs(creation_right(y, n, ctx.ladder).norm() - module_norm(y)),
        )
    return worst, None, ctx.samples


def check_creation_adjoints(ctx, rng):
    """``T_{y0}^*(y (x) z) = <y0, y>_R z`` and ``R_{z0}^*(y (x) z) = y <z, z0>_L``."""
    lad, worst = ctx.ladder, 0.0
    for _ in range(ctx.samples):
        p, n = _pair(ctx, rng)
        y0, y, z = lad.random(p, rng), lad.random(p, rng), lad.random(n, rng)
        yz = contract(p, n, y, z, lad)
        got = adjoint(creation_left(y0, n, lad))(yz)
        want = z.left_act(evaluate_inner("R", y0, y))
        worst = max(worst, module_norm(got - want))

        n, q = _pair(ctx, rng)
        y, z, z0 = lad.random(n, rng), lad.random(q, rng), lad.random(q, rng)
        yz = contract(n, q, y, z, lad)
        got = adjoint(creation_right(z0, n, lad))(yz)
        want = y.right_act(evaluate_inner("L", z, z0))
        worst = max(worst, module_norm(got - want))
    return worst, None, ctx.samples


def check_rstar(ctx, rng):
    """``R_z^*(eta) (x) w = eta <z, w>_R``."""
    lad, worst = ctx.ladder, 0.0
    for _ in range(ctx.samples):
        n, q = _pair(ctx, rng)
        z, w, eta = lad.random(q, rng), lad.random(q, rng), lad.random(n + q, rng)
        lhs = contract(n, q, adjoint(creation_right(z, n, lad))(eta), w, lad)
        rhs = eta.right_act(evaluate_inner("R", z, w))
        worst = max(worst, module_norm(lhs - rhs))
    return worst, None, ctx.samples


def _alpha_pairs(ctx):
    L, R = ctx.ladder.max_level, min(ALPHA_RANGE, ctx.ladder.max_level - 1)
    return [
        (n, m)
        for n in range(-R, R + 1)
        for m in range(-R, R + 1)
        if abs(m - n) <= L and abs(n - 1) <= L and abs(m - 1) <= L
    ]


def check_alpha_shift(ctx, rng):
    lad, worst, count = ctx.ladder, 0.0, 0
    pairs = _alpha_pairs(ctx)
    per = max(1, ctx.samples // 4)
    for n, m in pairs:
        for _ in range(per):
            eta = lad.random(m - n, rng)
            shifted = alpha_shift(creation_left(eta, n, lad), lad)
            worst = max(worst, map_norm(shifted - creation_left(eta, n - 1, lad)))
            count += 1
    return worst, None, count


def check_alpha_bimodule(ctx, rng):
    lad, worst = ctx.ladder, 0.0
    pairs = _alpha_pairs(ctx)
    for _ in range(ctx.samples):
        n, m = pairs[int(rng.integers(len(pairs)))]
        T = random_right_linear_map(lad.level(n), lad.level(m), rng)
        a = lad.algebra.random(rng)
        worst = max(
            worst,
            map_norm(alpha_shift(T.left_mul(a), lad) - alpha_shift(T, lad).left_mul(a)),
            map_norm(alpha_shift(T.right_mul(a), lad) - alpha_shift(T, lad).right_mul(a)),
            map_norm(alpha_shift_inverse(alpha_shift(T, lad), lad) - T),
        )
    return worst, None, ctx.samples


def check_mofy(ctx, rng):
    """``H J = id`` on random maps and ``J H = id`` on random ``phi``."""
    lad, worst = ctx.ladder, 0.0
    for _ in range(ctx.samples):
        p, n = _pair(ctx, rng)
        T = random_right_linear_map(lad.level(n), lad.level(n + p), rng)
        worst = max(worst, map_norm(multiplier_H(multiplier_J(T, lad), n, lad) - T))
        phi = random_right_linear_map(lad.level(0), lad.level(p), rng)
        worst = max(worst, map_norm(multiplier_J(multiplier_H(phi, n, lad), lad) - phi))
    return worst, None, ctx.samples


def check_symbol_roundtrip(ctx, rng):
    lad, worst = ctx.ladder, 0.0
    for _ in range(ctx.samples):
        p, n = _pair(ctx, rng)
        y = lad.random(p, rng)
        worst = max(worst, module_norm(extract_symbol(creation_left(y, n, lad), lad) - y))
    return worst, None, ctx.samples


def _sections(ctx, rng, count):
    return [CrossSection.random(ctx.ladder, SECTION_SUPPORT, rng) for _ in range(count)]


def check_toeplitz_forward(ctx, rng):
    worst, ok = 0.0, True
    for f in _sections(ctx, rng, ctx.samples):
        res = is_toeplitz(lambda_rep(f, ctx.window), ctx.toeplitz_tol)
        worst = max(worst, res.max_residual)
        ok = ok and res.is_toeplitz
    return worst, ok and worst < ctx.tol, ctx.samples


def check_synthesis_roundtrip(ctx, rng):
    worst = 0.0
    for f in _sections(ctx, rng, ctx.samples):
        g, _ = synthesize_section(lambda_rep(f, ctx.window), 2 * ctx.window, tol=ctx.toeplitz_tol)
        worst = max(worst, section_distance(f, g))
    return worst, None, ctx.samples


def alpha_consistent_matrix(ladder: TensorLadder, N: int, rng) -> OperatorMatrix:
    """Each diagonal seeded by one random right-linear block, propagated with alpha."""
    blocks = {}
    for k in range(-2 * N, 2 * N + 1):
        cols = [j for j in range(-N, N + 1) if abs(j + k) <= N]
        j0 = cols[0]
        B = random_right_linear_map(ladder.level(j0), ladder.level(j0 + k), rng)
        blocks[(j0 + k, j0)] = B
        for j in cols[1:]:
            B = alpha_shift_inverse(B, ladder)
            blocks[(j + k, j)] = B
    return OperatorMatrix(ladder, N, blocks)


def check_converse_convergence(ctx, rng):
    lad, N, worst = ctx.ladder, ctx.window, 0.0
    count = max(1, ctx.samples // 4)
    for _ in range(count):
        M = alpha_consistent_matrix(lad, N, rng)
        f, _ = synthesize_section(M, 2 * N, tol=ctx.toeplitz_tol)
        rows = convergence_report(M, f, random_probes(lad, N, rng))
        worst = max(worst, max(r.seminorm for r in rows))
    return worst, worst < ctx.toeplitz_tol, count


def perturb(M: OperatorMatrix, rng, size: float = PERTURBATION) -> tuple[OperatorMatrix, tuple[int, int]]:
    """Add a random right-linear map to one block off the corner diagonals.

    The perturbation's norm is ``size`` times the largest block norm of ``M``.
    """
    N, lad = M.radius, M.ladder
    while True:
        i, j = (int(v) for v in rng.integers(-N, N + 1, size=2))
        if abs(i - j) < 2 * N:
            break
    scale = max(b.norm() for b in M.blocks.values())
    B = M.blocks[(i, j)]
    E = random_right_linear_map(B.domain, B.codomain, rng)
    E = E * (size * scale / E.norm())
    blocks = dict(M.blocks)
    blocks[(i, j)] = B + E
    return OperatorMatrix(lad, N, blocks), (i, j)


def check_perturbation_rejection(ctx, rng):
    """Returns the smallest spread seen; passes when every one exceeds the floor."""
    smallest, ok = np.inf, True
    for f in _sections(ctx, rng, ctx.samples):
        M, _ = perturb(lambda_rep(f, ctx.window), rng)
        _, rep = synthesize_section(M, 2 * ctx.window, strict=False)
        smallest = min(smallest, rep.max_spread)
        ok = ok and rep.max_spread > SPREAD_FLOOR and not is_toeplitz(M, ctx.toeplitz_tol)
    return float(smallest), ok, ctx.samples


def check_fell_bundle(ctx, rng):
    lad, worst = ctx.ladder, 0.0
    unit = CrossSection.unit(lad)
    for _ in range(ctx.samples):
        f, g, h = (CrossSection.random(lad, range(-1, 2), rng) for _ in range(3))
        worst = max(
            worst,
            section_distance(convolve(convolve(f, g), h), convolve(f, convolve(g, h))),
            section_distance(convolve(unit, f), f),
            section_distance(convolve(f, unit), f),
            section_distance(involute(convolve(f, g)), convolve(involute(g), involute(f))),
            section_distance(involute(involute(f)), f),
        )
    return worst, None, ctx.samples


def check_lambda_multiplicative(ctx, rng):
    N, worst = ctx.window, 0.0
    for _ in range(ctx.samples):
        f, g = _sections(ctx, rng, 2)
        P = lambda_rep(f, N) @ lambda_rep(g, N)
        Q = lambda_rep(convolve(f, g), N)
        worst = max(worst, max(map_norm(P[ij] - Q[ij]) for ij in truncation_safe(f, g, N)))
        S, T = lambda_rep(involute(f), N), lambda_rep(f, N).adjoint()
        worst = max(worst, max(map_norm(S[ij] - T[ij]) for ij in S.indices()))
    return worst, None, ctx.samples


CHECKS: list[tuple[str, Callable]] = [
    ("axioms", check_axioms),
    ("adjoint_identity", check_adjoint_identity),
    ("contraction_associativity", check_contraction_associativity),
    ("creation_isometry", check_creation_isometry),
    ("creation_adjoints", check_creation_adjoints),
    ("rstar", check_rstar),
    ("alpha_shift", check_alpha_shift),
    ("alpha_bimodule", check_alpha_bimodule),
    ("mofy_roundtrip", check_mofy),
    ("symbol_roundtrip", check_symbol_roundtrip),
    ("toeplitz_forward", check_toeplitz_forward),
    ("synthesis_roundtrip", check_synthesis_roundtrip),
    ("converse_convergence", check_converse_convergence),
    ("perturbation_rejection", check_perturbation_rejection),
    ("fell_bundle", check_fell_bundle),
    ("lambda_multiplicative", check_lambda_multiplicative),
]


def run_suite(
    ladder: TensorLadder,
    seed: int,
    window: int | None = None,
    samples: int = SAMPLES,
    tol: float = 1e-9,
    toeplitz_tol: float = 1e-8,
) -> list[CheckResult]:
    ctx = Context(ladder, window or ladder.radius, samples, tol, toeplitz_tol)
    out = []
    for index, (name, fn) in enumerate(CHECKS):
        rng = np.random.default_rng([seed, index])
        start = time.perf_counter()
        residual, passed, count = fn(ctx, rng)
        if passed is None:
            passed = residual < tol
        out.append(CheckResult(name, float(residual), bool(passed), int(count), time.perf_counter() - start))
    return out


def report_dict(model_name: str, seed: int, window: int, results: list[CheckResult]) -> dict:
    """The deterministic part of a report; runtimes live in the timing sidecar."""
    return {
        "format": REPORT_FORMAT,
        "header": {"model": model_name, "seed": seed, "window": window, "rng": "numpy.PCG64 [seed, check]"},
        "passed": all(r.passed for r in results),
        "checks": [
            {"name": r.name, "residual": repr(r.residual), "passed": r.passed, "samples": r.samples}
            for r in results
        ],
    }


def timing_dict(results: list[CheckResult]) -> dict:
    return {
        "total_seconds": sum(r.runtime for r in results),
        "checks": {r.name: r.runtime for r in results},
    }
