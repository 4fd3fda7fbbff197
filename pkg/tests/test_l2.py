import numpy as np
import pytest

from bimodule_toeplitz import (
    AdjointableMap,
    OperatorMatrix,
    OutOfRangeError,
    WindowedL2Element,
    apply_matrix,
    embed,
    is_toeplitz,
    l2_inner,
    l2_norm,
    map_norm,
    module_norm,
    project,
    random_right_linear_map,
    sigma_seminorm,
)
from bimodule_toeplitz.crossed_product import CrossSection, lambda_rep


def random_operator(lad, N, rng):
    return OperatorMatrix.from_function(
        lad, N, lambda i, j: random_right_linear_map(lad.level(j), lad.level(i), rng)
    )


def scalar_operator(lad, mat):
    N = (mat.shape[0] - 1) // 2
    return OperatorMatrix.from_function(
        lad,
        N,
        lambda i, j: AdjointableMap(lad.level(j), lad.level(i), np.array([[mat[i + N, j + N]]])),
    )


def test_embed_project(ladder):
    rng = np.random.default_rng(0)
    N = 3
    for k in range(-N, N + 1):
        v = ladder.random(k, rng)
        xi = embed(v, k, N, ladder)
        assert np.array_equal(project(xi, k).coeffs, v.coeffs)
        for j in range(-N, N + 1):
            if j != k:
                assert not project(xi, j).coeffs.any()
        assert l2_norm(xi) == pytest.approx(module_norm(v))
    xi = WindowedL2Element.random(ladder, N, rng)
    rebuilt = WindowedL2Element.zeros(ladder, N)
    for k in range(-N, N + 1):
        rebuilt = rebuilt + embed(project(xi, k), k, N, ladder)
    assert all(np.array_equal(rebuilt[k].coeffs, xi[k].coeffs) for k in range(-N, N + 1))


def test_window_bounds(ladder):
    v = ladder.random(3, np.random.default_rng(0))
    with pytest.raises(OutOfRangeError):
        embed(v, 3, 2, ladder)
    with pytest.raises(OutOfRangeError):
        project(WindowedL2Element.zeros(ladder, 2), -3)


def test_scalar_embed_and_norm(ladders):
    lad = ladders["scalar"]
    xi = embed(lad.element(0, [1.0]), 0, 2, lad)
    assert [xi[k].coeffs[0] for k in range(-2, 3)] == [0, 0, 1, 0, 0]
    seq = np.array([1, 2j, -3, 0.5, 1 - 1j])
    eta = WindowedL2Element(lad, 2, {k: lad.element(k, [seq[k + 2]]) for k in range(-2, 3)})
    assert l2_norm(eta) == pytest.approx(np.linalg.norm(seq))


def test_scalar_apply_is_matvec(ladders):
    lad = ladders["scalar"]
    rng = np.random.default_rng(1)
    mat = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    M = scalar_operator(lad, mat)
    xi = WindowedL2Element.random(lad, 2, rng)
    vec = np.array([xi[k].coeffs[0] for k in range(-2, 3)])
    out = apply_matrix(M, xi)
    assert np.allclose([out[k].coeffs[0] for k in range(-2, 3)], mat @ vec)


def test_identity_fixes_vectors(ladder):
    rng = np.random.default_rng(2)
    xi = WindowedL2Element.random(ladder, 3, rng)
    out = apply_matrix(OperatorMatrix.identity(ladder, 3), xi)
    assert all(np.allclose(out[k].coeffs, xi[k].coeffs) for k in range(-3, 4))


def test_matrix_adjoint_pairing(ladder):
    rng = np.random.default_rng(3)
    N = 2
    M = random_operator(ladder, N, rng)
    Ms = M.adjoint()
    for _ in range(10):
        xi, zeta = WindowedL2Element.random(ladder, N, rng), WindowedL2Element.random(ladder, N, rng)
        lhs = l2_inner(apply_matrix(M, xi), zeta)
        rhs = l2_inner(xi, apply_matrix(Ms, zeta))
        assert (lhs - rhs).norm() < 1e-9


def test_triangle_inequality(ladder):
    rng = np.random.default_rng(4)
    for _ in range(100):
        xi, zeta = WindowedL2Element.random(ladder, 2, rng), WindowedL2Element.random(ladder, 2, rng)
        assert l2_norm(xi + zeta) <= l2_norm(xi) + l2_norm(zeta) + 1e-12


def test_scalar_toeplitz_examples(ladders):
    lad = ladders["scalar"]
    rng = np.random.default_rng(5)
    t = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    idx = np.arange(-2, 3)
    mat = t[idx[:, None] - idx[None, :] + 4]
    assert is_toeplitz(scalar_operator(lad, mat)).is_toeplitz
    bad = mat.copy()
    bad[2, 2] += 1.0  # [T]_{00} differs from [T]_{-1,-1}
    res = is_toeplitz(scalar_operator(lad, bad))
    assert not res.is_toeplitz
    assert res.offending_index == (0, 0)
    assert res.max_residual == pytest.approx(1.0)


def test_toeplitz_is_linear_and_right_invariant(ladder):
    rng = np.random.default_rng(6)
    f = CrossSection.random(ladder, range(-2, 3), rng)
    g = CrossSection.random(ladder, range(-1, 2), rng)
    M1, M2 = lambda_rep(f, 3), lambda_rep(g, 3)
    combo = M1 * (0.3 - 2j) + M2 * (1.5 + 0.5j)
    assert is_toeplitz(combo).max_residual < 1e-9
    a = ladder.algebra.random(rng)
    assert is_toeplitz(M1.right_mul(a)).max_residual < 1e-9


def test_sigma_seminorm_properties(ladder):
    rng = np.random.default_rng(7)
    N = 2
    M, K = random_operator(ladder, N, rng), random_operator(ladder, N, rng)
    for j in range(-N, N + 1):
        v = ladder.random(j, rng)
        assert sigma_seminorm(OperatorMatrix.identity(ladder, N), v, j) == pytest.approx(module_norm(v))
        assert sigma_seminorm(M - M, v, j) == 0.0
        # block-norm bound: ||sum_i <M_ij v, M_ij v>|| <= sum_i ||M_ij||^2 ||v||^2
        bound = np.sqrt(sum(map_norm(M[(i, j)]) ** 2 for i in range(-N, N + 1))) * module_norm(v)
        assert sigma_seminorm(M, v, j) <= bound * (1 + 1e-12)
        assert sigma_seminorm(M * (2 - 1j), v, j) == pytest.approx(abs(2 - 1j) * sigma_seminorm(M, v, j))
        assert sigma_seminorm(M + K, v, j) <= sigma_seminorm(M, v, j) + sigma_seminorm(K, v, j) + 1e-12


def test_truncated_product_matches_dense_scalar(ladders):
    lad = ladders["scalar"]
    rng = np.random.default_rng(8)
    a = rng.standard_normal((5, 5)) + 0j
    b = rng.standard_normal((5, 5)) + 0j
    P = scalar_operator(lad, a) @ scalar_operator(lad, b)
    got = np.array([[P[(i, j)].matrix[0, 0] for j in range(-2, 3)] for i in range(-2, 3)])
    assert np.allclose(got, a @ b)
