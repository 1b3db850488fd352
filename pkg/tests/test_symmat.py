import math

import numpy as np
import pytest

from spdmetric import (
    NotPositiveDefinite,
    assert_spd,
    eigh,
    expm,
    frob_inner,
    frob_norm,
    invsqrtm,
    logm,
    random_orthonormal,
    random_spd,
    spectral_map,
    sqrtm,
    sym,
)

DIMS = (2, 3, 6, 8)


class TestEigh:
    def test_identity(self):
        lam, vec = eigh(np.eye(2))
        np.testing.assert_allclose(lam, [1.0, 1.0])
        np.testing.assert_allclose(vec @ vec.T, np.eye(2), atol=1e-14)

    def test_diagonal_sorted_ascending(self):
        lam, vec = eigh(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(lam, [1.0, 3.0])
        # axis eigenvectors, up to sign
        np.testing.assert_allclose(np.abs(vec), [[0.0, 1.0], [1.0, 0.0]], atol=1e-14)

    def test_2x2_closed_form(self):
        # characteristic polynomial of [[2,1],[1,2]]: (2-t)^2 - 1 = 0
        lam, vec = eigh(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(lam, [1.0, 3.0], atol=1e-14)
        s = 1.0 / math.sqrt(2.0)
        np.testing.assert_allclose(np.abs(vec[:, 0]), [s, s], atol=1e-14)
        np.testing.assert_allclose(np.abs(vec[:, 1]), [s, s], atol=1e-14)
        assert np.sign(vec[0, 0]) != np.sign(vec[1, 0])  # (1,-1) direction
        assert np.sign(vec[0, 1]) == np.sign(vec[1, 1])  # (1, 1) direction

    def test_reconstruction_and_orthonormality(self):
        rng = np.random.default_rng(11)
        for d in DIMS:
            for _ in range(25):
                x = random_spd(rng, d)
                lam, vec = eigh(x)
                assert np.all(np.diff(lam) >= 0)
                assert frob_norm(vec.T @ vec - np.eye(d)) <= 1e-10 * d
                assert frob_norm((vec * lam) @ vec.T - x) <= 1e-10 * frob_norm(x)

    def test_rejects_nonsymmetric(self):
        with pytest.raises(ValueError, match="not symmetric"):
            eigh(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestSpectralMap:
    def test_identity_matrix_square(self):
        np.testing.assert_array_equal(spectral_map(np.eye(2), np.square), np.eye(2))

    def test_diagonal_sqrt(self):
        out = spectral_map(np.diag([4.0, 9.0]), np.sqrt)
        np.testing.assert_allclose(out, np.diag([2.0, 3.0]), atol=1e-14)

    def test_identity_function(self):
        x = np.array([[2.0, 1.0], [1.0, 2.0]])
        np.testing.assert_allclose(spectral_map(x, lambda v: v), x, atol=1e-14)

    def test_commutes_with_orthogonal_conjugation(self):
        rng = np.random.default_rng(7)
        for d in DIMS:
            x = random_spd(rng, d)
            q = random_orthonormal(rng, d)
            left = spectral_map(sym(q @ x @ q.T), np.log)
            right = q @ spectral_map(x, np.log) @ q.T
            assert frob_norm(left - right) <= 1e-9 * max(1.0, frob_norm(right))

    def test_undefined_on_eigenvalue(self):
        with pytest.raises(ValueError, match="undefined"):
            spectral_map(np.diag([1.0, -1.0]), np.log)


class TestLogExp:
    def test_logm_identity_is_zero(self):
        np.testing.assert_array_equal(logm(np.eye(3)), np.zeros((3, 3)))

    def test_logm_diagonal(self):
        out = logm(np.diag([math.e, math.e**2]))
        np.testing.assert_allclose(out, np.diag([1.0, 2.0]), atol=1e-14)

    def test_logm_2x2(self):
        # eigendecomposition oracle: lam = (1, 3), log -> (log 3 / 2) * ones
        out = logm(np.array([[2.0, 1.0], [1.0, 2.0]]))
        expect = (math.log(3.0) / 2.0) * np.ones((2, 2))
        np.testing.assert_allclose(out, expect, atol=1e-14)

    def test_expm_zero_is_identity(self):
        np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))

    def test_expm_diagonal(self):
        out = expm(np.diag([1.0, -1.0]))
        np.testing.assert_allclose(out, np.diag([math.e, 1.0 / math.e]), atol=1e-14)

    def test_expm_inverts_logm_2x2(self):
        s = (math.log(3.0) / 2.0) * np.ones((2, 2))
        np.testing.assert_allclose(
            expm(s), np.array([[2.0, 1.0], [1.0, 2.0]]), atol=1e-12
        )

    def test_expm_overflow_reported(self):
        with pytest.raises(ValueError, match="overflow|undefined"):
            expm(np.diag([1000.0, 0.0]))

    def test_round_trips(self):
        rng = np.random.default_rng(23)
        for d in DIMS:
            for _ in range(25):
                x = random_spd(rng, d, eig_log_range=(-2.0, 2.0))
                nx = frob_norm(x)
                assert frob_norm(expm(logm(x)) - x) <= 1e-9 * nx
                w = invsqrtm(x)
                assert frob_norm(sym(w @ x @ w) - np.eye(d)) <= 1e-9 * math.sqrt(d)

    def test_logm_of_inverse_is_negated(self):
        rng = np.random.default_rng(5)
        for d in DIMS:
            x = random_spd(rng, d)
            inv = np.linalg.inv(x)
            assert frob_norm(logm(sym(inv)) + logm(x)) <= 1e-9 * frob_norm(logm(x))


class TestSqrt:
    def test_identity(self):
        np.testing.assert_array_equal(sqrtm(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        np.testing.assert_allclose(sqrtm(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]))
        np.testing.assert_allclose(
            invsqrtm(np.diag([4.0, 9.0])), np.diag([0.5, 1.0 / 3.0])
        )

    def test_square_round_trip(self):
        rng = np.random.default_rng(31)
        for d in DIMS:
            x = random_spd(rng, d)
            r = sqrtm(x)
            assert frob_norm(r @ r - x) <= 1e-10 * frob_norm(x)
            np.testing.assert_allclose(
                invsqrtm(x), np.linalg.inv(r), atol=1e-12 * frob_norm(invsqrtm(x))
            )


class TestSym:
    def test_symmetric_unchanged(self):
        x = np.array([[1.0, 2.0], [2.0, 5.0]])
        np.testing.assert_array_equal(sym(x), x)

    def test_forced_by_definition(self):
        np.testing.assert_array_equal(
            sym(np.array([[0.0, 2.0], [0.0, 0.0]])),
            np.array([[0.0, 1.0], [1.0, 0.0]]),
        )

    def test_skew_maps_to_zero(self):
        skew = np.array([[0.0, -3.0], [3.0, 0.0]])
        np.testing.assert_array_equal(sym(skew), np.zeros((2, 2)))

    def test_outputs_bitwise_symmetric(self):
        rng = np.random.default_rng(2)
        for d in DIMS:
            x = random_spd(rng, d)
            for out in (logm(x), sqrtm(x), invsqrtm(x), expm(logm(x))):
                np.testing.assert_array_equal(out, out.T)


class TestFrobenius:
    def test_inner_identity(self):
        assert frob_inner(np.eye(2), np.eye(2)) == 2.0

    def test_norm_zero(self):
        assert frob_norm(np.zeros((3, 3))) == 0.0

    def test_elementwise_sum(self):
        a = np.array([[1.0, 2.0], [2.0, 3.0]])
        b = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert frob_inner(a, b) == 4.0

    def test_inner_is_squared_norm(self):
        rng = np.random.default_rng(13)
        a = sym(rng.standard_normal((4, 4)))
        assert frob_inner(a, a) >= 0
        assert math.isclose(frob_inner(a, a), frob_norm(a) ** 2, rel_tol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            frob_inner(np.eye(2), np.eye(3))


class TestAssertSpd:
    def test_identity_ok(self):
        np.testing.assert_array_equal(assert_spd(np.eye(3)), np.eye(3))

    def test_singular_rejected_with_lambda_min(self):
        with pytest.raises(NotPositiveDefinite) as exc:
            assert_spd(np.diag([1.0, 0.0]))
        assert exc.value.lambda_min == pytest.approx(0.0, abs=1e-15)

    def test_slightly_negative_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            assert_spd(np.diag([1.0, -1e-3]))

    def test_threshold_relative_to_lambda_max(self):
        # lambda_min / lambda_max = 1e-10 passes at tol 1e-12, fails at 1e-8
        x = np.diag([1e-10, 1.0])
        assert_spd(x)
        with pytest.raises(NotPositiveDefinite):
            assert_spd(x, tol=1e-8)
