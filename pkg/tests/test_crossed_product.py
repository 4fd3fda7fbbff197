import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bimodule_toeplitz import (
    CrossSection,
    NotToeplitzError,
    OperatorMatrix,
    OutOfRangeError,
    contract,
    convergence_report,
    convolve,
    involute,
    is_toeplitz,
    lambda_rep,
    l2_norm,
    map_norm,
    section_distance,
    synthesize_section,
    truncation_safe,
)
from bimodule_toeplitz.l2 import WindowedL2Element
from bimodule_toeplitz.suite import alpha_consistent_matrix, perturb

from conftest import MODEL_NAMES


def scalar_section(lad, coeffs: dict):
    return CrossSection.from_coeffs(lad, {k: [c] for k, c in coeffs.items()})


def test_scalar_convolution_is_sequence_convolution(ladders):
    lad = ladders["scalar"]
    a, b = [1, 2j, -1], [0.5, 3]
    f = scalar_section(lad, dict(zip(range(-1, 2), a)))
    g = scalar_section(lad, dict(zip(range(0, 2), b)))
    h = convolve(f, g)
    want = np.convolve(a, b)
    assert np.allclose([h(k).coeffs[0] for k in range(-1, 3)], want)


def test_scalar_involution(ladders):
    lad = ladders["scalar"]
    f = scalar_section(lad, {-1: 1 + 2j, 2: -3j})
    fs = involute(f)
    assert fs.support == [-2, 1]
    assert fs(1).coeffs[0] == pytest.approx(1 - 2j)
    assert fs(-2).coeffs[0] == pytest.approx(3j)


def test_scalar_lambda_is_laurent_matrix(ladders):
    lad = ladders["scalar"]
    coeffs = {-1: 2.0, 0: 1j, 2: -0.5}
    M = lambda_rep(scalar_section(lad, coeffs), 3)
    for (i, j), b in M.blocks.items():
        assert b.matrix[0, 0] == pytest.approx(coeffs.get(i - j, 0.0))


def test_unit_section(ladder):
    M = lambda_rep(CrossSection.unit(ladder), 3)
    for (i, j), b in M.blocks.items():
        want = np.eye(ladder.dim(i)) if i == j else np.zeros_like(b.matrix)
        assert np.allclose(b.matrix, want)


@pytest.mark.parametrize("name", MODEL_NAMES)
@settings(max_examples=15, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_fell_bundle_laws(ladders, name, seed):
    lad = ladders[name]
    rng = np.random.default_rng(seed)
    f, g, h = (CrossSection.random(lad, range(-1, 2), rng) for _ in range(3))
    unit = CrossSection.unit(lad)
    assert section_distance(convolve(convolve(f, g), h), convolve(f, convolve(g, h))) < 1e-9
    assert section_distance(convolve(unit, f), f) < 1e-9
    assert section_distance(convolve(f, unit), f) < 1e-9
    assert section_distance(involute(involute(f)), f) < 1e-12
    assert section_distance(involute(convolve(f, g)), convolve(involute(g), involute(f))) < 1e-9


def test_convolution_out_of_range(ladder):
    rng = np.random.default_rng(0)
    L = ladder.max_level
    f = CrossSection.random(ladder, [L], rng)
    with pytest.raises(OutOfRangeError):
        convolve(f, f)


def test_lambda_multiplicative_and_star(ladder):
    rng = np.random.default_rng(1)
    N = 4
    for _ in range(10):
        f = CrossSection.random(ladder, range(-2, 3), rng)
        g = CrossSection.random(ladder, range(-2, 3), rng)
        P = lambda_rep(f, N) @ lambda_rep(g, N)
        Q = lambda_rep(convolve(f, g), N)
        safe = truncation_safe(f, g, N)
        assert len(safe) > 40
        assert max(map_norm(P[ij] - Q[ij]) for ij in safe) < 1e-9
        S, T = lambda_rep(involute(f), N), lambda_rep(f, N).adjoint()
        assert max(map_norm(S[ij] - T[ij]) for ij in S.indices()) < 1e-9


def test_truncation_flags_edge_indices(ladders):
    """Outside the safe set the windowed product genuinely misses terms."""
    lad = ladders["scalar"]
    f = scalar_section(lad, {-1: 1.0})
    g = scalar_section(lad, {1: 1.0})
    N = 2
    safe = set(truncation_safe(f, g, N))
    # [f * g] passes through level j + 1, which leaves the window at j = N
    assert (0, 0) in safe and (N, N) not in safe
    P = lambda_rep(f, N) @ lambda_rep(g, N)
    Q = lambda_rep(convolve(f, g), N)
    assert P[(0, 0)].matrix[0, 0] == pytest.approx(Q[(0, 0)].matrix[0, 0])
    assert P[(N, N)].matrix[0, 0] == 0.0
    assert Q[(N, N)].matrix[0, 0] == pytest.approx(1.0)


def test_synthesis_roundtrip(ladder):
    rng = np.random.default_rng(2)
    for _ in range(10):
        f = CrossSection.random(ladder, range(-3, 4), rng)
        g, rep = synthesize_section(lambda_rep(f, 4), 8)
        assert rep.consistent and rep.max_spread < 1e-9
        assert section_distance(f, g) < 1e-9


def test_alpha_consistent_diagonals_are_recovered(ladder):
    rng = np.random.default_rng(3)
    N = 3
    M = alpha_consistent_matrix(ladder, N, rng)
    assert is_toeplitz(M).max_residual < 1e-9
    f, rep = synthesize_section(M, 2 * N)
    for k in range(-2 * N, 2 * N + 1):
        j0 = max(-N, -N - k)
        block = M[(j0 + k, j0)]
        assert map_norm(lambda_rep(f, N)[(j0 + k, j0)] - block) < 1e-9
    rows = convergence_report(M, f, [(ladder.random(j, rng), j) for j in range(-N, N + 1)])
    assert max(r.seminorm for r in rows) < 1e-8


def test_non_toeplitz_rejected(ladder):
    rng = np.random.default_rng(4)
    M, _ = perturb(lambda_rep(CrossSection.random(ladder, range(-2, 3), rng), 3), rng)
    with pytest.raises(NotToeplitzError):
        synthesize_section(M, 6)
    _, rep = synthesize_section(M, 6, strict=False)
    assert rep.max_spread > 1e-4


def test_scalar_geometric_tail(ladders):
    """Truncated synthesis leaves exactly the geometric tail of the symbol."""
    lad = ladders["scalar"]
    N, r = 4, 0.6
    f = scalar_section(lad, {k: r**k for k in range(0, 2 * N + 1)})
    M = lambda_rep(f, N)
    previous = np.inf
    for n_syn in range(0, 2 * N + 1):
        fs, _ = synthesize_section(M, n_syn)
        (row,) = convergence_report(M, fs, [(lad.element(-N, [1.0]), -N)])
        # sum_{k = n_syn + 1}^{2N} r^{2k}
        tail = r ** (2 * (n_syn + 1)) * (1 - r ** (2 * (2 * N - n_syn))) / (1 - r**2)
        assert row.seminorm == pytest.approx(np.sqrt(tail), abs=1e-12)
        assert row.seminorm <= previous
        previous = row.seminorm
    assert previous < 1e-12


def test_tail_matches_direct_evaluation(ladder):
    rng = np.random.default_rng(5)
    N = 3
    f = CrossSection.random(ladder, range(-2 * N, 2 * N + 1), rng)
    M = lambda_rep(f, N)
    n_syn = 2
    fs, _ = synthesize_section(M, n_syn)
    for j in range(-N, N + 1):
        v = ladder.random(j, rng)
        (row,) = convergence_report(M, fs, [(v, j)])
        comps = {i: ladder.level(i).zero() for i in range(-N, N + 1)}
        for k in f.support:
            if abs(k) > n_syn and abs(j + k) <= N:
                comps[j + k] = comps[j + k] + contract(k, j, f(k), v, ladder)
        direct = l2_norm(WindowedL2Element(ladder, N, comps))
        assert row.seminorm == pytest.approx(direct, abs=1e-9)
        # the proof's bound ||sum_{|k| > n_syn} <u_k, u_k>_R|| ||v||^2
        tail = sum(
            ladder.level(k).inner_R_vec(f(k).coeffs, f(k).coeffs)
            for k in f.support
            if abs(k) > n_syn
        )
        bound = np.sqrt(ladder.algebra.norms(tail)) * v.norm()
        assert row.seminorm <= bound * (1 + 1e-9)


def test_lambda_of_lambda_is_zero_table(ladder):
    rng = np.random.default_rng(6)
    f = CrossSection.random(ladder, range(-2, 3), rng)
    M = lambda_rep(f, 3)
    rows = convergence_report(M, f, [(ladder.random(j, rng), j) for j in range(-3, 4)])
    assert max(r.seminorm for r in rows) < 1e-12


def test_zero_matrix_synthesizes_zero(ladder):
    f, rep = synthesize_section(OperatorMatrix.zeros(ladder, 2), 4)
    assert rep.max_spread == 0.0
    assert all(not v.coeffs.any() for v in f.values.values())
