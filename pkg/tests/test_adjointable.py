import numpy as np
import pytest

from bimodule_toeplitz import (
    AdjointableMap,
    NotAdjointableError,
    NotCreationOperatorError,
    adjoint,
    alpha_shift,
    alpha_shift_inverse,
    contract,
    creation_left,
    creation_right,
    evaluate_inner,
    extract_symbol,
    identity_map,
    linearity_residual,
    map_norm,
    module_norm,
    multiplier_H,
    multiplier_J,
    random_right_linear_map,
    unit_decomposition,
)
from bimodule_toeplitz.adjointable import right_linear_basis
from bimodule_toeplitz.ladder import as_level_zero


def scalar_map(lad, n, m, c):
    return AdjointableMap(lad.level(n), lad.level(m), np.array([[c]]))


def test_scalar_adjoint_is_conjugate(ladders):
    lad = ladders["scalar"]
    T = scalar_map(lad, 2, -1, 2 + 3j)
    assert adjoint(T).matrix[0, 0] == pytest.approx(2 - 3j)
    assert map_norm(T) == pytest.approx(abs(2 + 3j))


def test_scalar_alpha_and_multipliers_are_identity(ladders):
    lad = ladders["scalar"]
    c = 0.3 - 1.7j
    T = scalar_map(lad, 2, 3, c)
    assert alpha_shift(T, lad).matrix[0, 0] == pytest.approx(c)
    assert multiplier_J(T, lad).matrix[0, 0] == pytest.approx(c)
    phi = scalar_map(lad, 0, 1, c)
    assert multiplier_H(phi, 2, lad).matrix[0, 0] == pytest.approx(c)
    assert creation_left(lad.element(1, [c]), 3, lad).matrix[0, 0] == pytest.approx(c)
    assert creation_right(lad.element(1, [c]), 3, lad).matrix[0, 0] == pytest.approx(c)


def test_right_linear_space_dimension(ladder):
    """dim L_R(level n, level m) equals dim of level m - n."""
    for n in range(-2, 3):
        for m in range(-2, 3):
            basis = right_linear_basis(ladder.level(n), ladder.level(m))
            assert basis.shape[1] == ladder.dim(m - n)


def test_adjoint_is_involutive(ladder):
    rng = np.random.default_rng(0)
    for _ in range(100):
        n, m = (int(v) for v in rng.integers(-3, 4, size=2))
        T = random_right_linear_map(ladder.level(n), ladder.level(m), rng)
        assert linearity_residual(T) < 1e-10
        S = adjoint(T)
        assert np.abs(adjoint(S).matrix - T.matrix).max() < 1e-10
        x, y = ladder.random(n, rng), ladder.random(m, rng)
        assert (evaluate_inner("R", T(x), y) - evaluate_inner("R", x, S(y))).norm() < 1e-9
        # C*-identity for the operator norm
        assert map_norm(S @ T) == pytest.approx(map_norm(T) ** 2, rel=1e-9)


def test_non_module_map_is_not_adjointable(ladders):
    lad = ladders["flip"]
    X = lad.level(1)
    T = AdjointableMap(X, X, np.array([[1.0, 0.0], [0.0, 0.0]]) + np.array([[0, 1.0], [0, 0]]))
    assert linearity_residual(T) > 1e-3
    with pytest.raises(NotAdjointableError):
        adjoint(T)
    with pytest.raises(NotCreationOperatorError):
        extract_symbol(T, lad)


def test_creation_left_at_level_zero_is_action(ladder):
    rng = np.random.default_rng(1)
    for n in range(-3, 4):
        a = ladder.algebra.random(rng)
        T = creation_left(as_level_zero(a, ladder), n, ladder)
        assert np.allclose(T.matrix, ladder.level(n).left_matrix(a.vec))


def test_creation_isometric(ladder):
    rng = np.random.default_rng(2)
    for n in range(-4, 5):
        for p in range(-4, 5):
            y = ladder.random(p, rng)
            assert map_norm(creation_left(y, n, ladder)) == pytest.approx(module_norm(y), abs=1e-9)
            assert map_norm(creation_right(y, n, ladder)) == pytest.approx(module_norm(y), abs=1e-9)


def test_creation_left_adjoint_formula(ladder):
    rng = np.random.default_rng(3)
    for _ in range(100):
        p, n = (int(v) for v in rng.integers(-3, 4, size=2))
        y0, y, z = ladder.random(p, rng), ladder.random(p, rng), ladder.random(n, rng)
        got = adjoint(creation_left(y0, n, ladder))(contract(p, n, y, z, ladder))
        want = z.left_act(evaluate_inner("R", y0, y))
        assert module_norm(got - want) < 1e-9


def test_creation_right_adjoint_and_rstar(ladder):
    rng = np.random.default_rng(4)
    for _ in range(100):
        n, q = (int(v) for v in rng.integers(-3, 4, size=2))
        y, z, z0, w = ladder.random(n, rng), ladder.random(q, rng), ladder.random(q, rng), ladder.random(q, rng)
        R = creation_right(z0, n, ladder)
        got = adjoint(R)(contract(n, q, y, z, ladder))
        assert module_norm(got - y.right_act(evaluate_inner("L", z, z0))) < 1e-9
        eta = ladder.random(n + q, rng)
        lhs = contract(n, q, adjoint(R)(eta), w, ladder)
        assert module_norm(lhs - eta.right_act(evaluate_inner("R", z0, w))) < 1e-9


def test_unit_decomposition_sums_to_one(ladder):
    for n in range(-4, 5):
        Z = ladder.level(n)
        total = sum(evaluate_inner("L", u, v).vec for u, v in unit_decomposition(Z))
        assert np.allclose(total, ladder.algebra.unit_vector)


def test_symbol_roundtrip(ladder):
    rng = np.random.default_rng(5)
    for n in range(-3, 4):
        for p in range(-3, 4):
            y = ladder.random(p, rng)
            assert module_norm(extract_symbol(creation_left(y, n, ladder), ladder) - y) < 1e-9


def test_H_of_creation_and_J_of_creation(ladder):
    rng = np.random.default_rng(6)
    for _ in range(50):
        p, n = (int(v) for v in rng.integers(-3, 4, size=2))
        y = ladder.random(p, rng)
        TB, TZ = creation_left(y, 0, ladder), creation_left(y, n, ladder)
        assert map_norm(multiplier_H(TB, n, ladder) - TZ) < 1e-9
        assert map_norm(multiplier_J(TZ, ladder) - TB) < 1e-9


def test_H_and_J_are_bimodule_maps(ladder):
    rng = np.random.default_rng(7)
    for _ in range(30):
        p, n = (int(v) for v in rng.integers(-3, 4, size=2))
        phi = random_right_linear_map(ladder.level(0), ladder.level(p), rng)
        a, b = ladder.algebra.random(rng), ladder.algebra.random(rng)
        lhs = multiplier_H(phi.left_mul(a).right_mul(b), n, ladder)
        rhs = multiplier_H(phi, n, ladder).left_mul(a).right_mul(b)
        assert map_norm(lhs - rhs) < 1e-9


def test_alpha_bimodule_and_inverse(ladder):
    rng = np.random.default_rng(8)
    for _ in range(50):
        n, m = (int(v) for v in rng.integers(-3, 4, size=2))
        T = random_right_linear_map(ladder.level(n), ladder.level(m), rng)
        a = ladder.algebra.random(rng)
        assert map_norm(alpha_shift(T.left_mul(a), ladder) - alpha_shift(T, ladder).left_mul(a)) < 1e-9
        assert map_norm(alpha_shift(T.right_mul(a), ladder) - alpha_shift(T, ladder).right_mul(a)) < 1e-9
        assert map_norm(alpha_shift_inverse(alpha_shift(T, ladder), ladder) - T) < 1e-9
        assert map_norm(alpha_shift(T, ladder)) == pytest.approx(map_norm(T), abs=1e-9)


def test_alpha_preserves_composition(ladder):
    """alpha(S T) = alpha(S) alpha(T): the shift is a family of algebra maps."""
    rng = np.random.default_rng(9)
    for _ in range(30):
        n, m, k = (int(v) for v in rng.integers(-3, 4, size=3))
        T = random_right_linear_map(ladder.level(n), ladder.level(m), rng)
        S = random_right_linear_map(ladder.level(m), ladder.level(k), rng)
        lhs = alpha_shift(S @ T, ladder)
        rhs = alpha_shift(S, ladder) @ alpha_shift(T, ladder)
        assert map_norm(lhs - rhs) < 1e-9


def test_identity_shifts_to_identity(ladder):
    for n in range(-3, 4):
        shifted = alpha_shift(identity_map(ladder.level(n)), ladder)
        assert np.allclose(shifted.matrix, np.eye(ladder.dim(n - 1)))
