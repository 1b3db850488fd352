import math

import numpy as np
import pytest

from spdmetric import (
    dlog,
    dlog_fd_oracle,
    frob_inner,
    frob_norm,
    logm,
    random_orthonormal,
    random_spd,
    random_sym,
    sym,
)


def clustered_spd(rng, d, spread=1e-8):
    """SPD matrix whose eigenvalues all lie within ``spread`` relatively."""
    center = float(np.exp(rng.uniform(-1.0, 1.0)))
    lam = center * (1.0 + rng.uniform(0.0, spread, size=d))
    q = random_orthonormal(rng, d)
    return sym((q * lam) @ q.T)


class TestDlog:
    def test_identity_base_point(self):
        rng = np.random.default_rng(0)
        h = random_sym(rng, 3)
        np.testing.assert_allclose(dlog(np.eye(3), h), h, atol=1e-14)

    def test_diagonal_divided_differences(self):
        # first divided differences of log at (1, e), computed by hand:
        # D[0,0] = H00 / 1, D[1,1] = H11 / e, D[0,1] = H01 / (e - 1)
        x = np.diag([1.0, math.e])
        h = np.array([[0.4, -1.1], [-1.1, 0.8]])
        expect = np.array(
            [
                [0.4, -1.1 / (math.e - 1.0)],
                [-1.1 / (math.e - 1.0), 0.8 / math.e],
            ]
        )
        np.testing.assert_allclose(dlog(x, h), expect, atol=1e-14)

    def test_commuting_direction_reduces_to_inverse(self):
        rng = np.random.default_rng(8)
        x = random_spd(rng, 5)
        h = sym(x @ x + 2.0 * x)  # polynomial in x, commutes
        expect = np.linalg.solve(x, h)
        assert frob_norm(dlog(x, h) - expect) <= 1e-12 * frob_norm(expect)

    def test_agrees_with_fd_oracle(self):
        rng = np.random.default_rng(17)
        for d in (2, 4, 8):
            for _ in range(10):
                x = random_spd(rng, d)
                h = random_sym(rng, d)
                got = dlog(x, h)
                want = dlog_fd_oracle(x, h)
                assert frob_norm(got - want) <= 1e-6 * frob_norm(want)

    def test_clustered_eigenvalues(self):
        rng = np.random.default_rng(19)
        for d in (2, 4, 8):
            x = clustered_spd(rng, d)
            h = random_sym(rng, d)
            got = dlog(x, h)
            want = dlog_fd_oracle(x, h)
            assert frob_norm(got - want) <= 1e-6 * frob_norm(want)

    def test_linearity(self):
        rng = np.random.default_rng(29)
        x = random_spd(rng, 4)
        h1 = random_sym(rng, 4)
        h2 = random_sym(rng, 4)
        combo = dlog(x, 0.7 * h1 - 1.3 * h2)
        parts = 0.7 * dlog(x, h1) - 1.3 * dlog(x, h2)
        assert frob_norm(combo - parts) <= 1e-12 * max(1.0, frob_norm(parts))

    def test_output_bitwise_symmetric(self):
        rng = np.random.default_rng(37)
        x = random_spd(rng, 5)
        out = dlog(x, random_sym(rng, 5))
        np.testing.assert_array_equal(out, out.T)

    def test_chain_consistency(self):
        # (d/dt) tr(log(X + tH) C) at t=0 vs <dlog(X,H), C>
        rng = np.random.default_rng(41)
        x = random_spd(rng, 4)
        h = random_sym(rng, 4)
        c = random_sym(rng, 4)
        analytic = frob_inner(dlog(x, h), c)
        t = 1e-5
        numeric = (
            frob_inner(logm(sym(x + t * h)), c) - frob_inner(logm(sym(x - t * h)), c)
        ) / (2.0 * t)
        assert abs(analytic - numeric) <= 1e-6 * max(abs(numeric), 1e-12)

    def test_adjoint_self_consistency(self):
        rng = np.random.default_rng(43)
        x = random_spd(rng, 5)
        h = random_sym(rng, 5)
        c = random_sym(rng, 5)
        assert abs(
            frob_inner(dlog(x, h), c) - frob_inner(h, dlog(x, c))
        ) <= 1e-10 * max(1.0, abs(frob_inner(dlog(x, h), c)))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            dlog(np.eye(3), np.eye(2))


class TestFdOracle:
    def test_identity_base_point(self):
        rng = np.random.default_rng(3)
        h = random_sym(rng, 3)
        got = dlog_fd_oracle(np.eye(3), h, step=1e-5)
        assert frob_norm(got - h) <= 1e-9 * frob_norm(h)

    def test_reproduces_diagonal_case(self):
        x = np.diag([1.0, math.e])
        h = np.array([[0.4, -1.1], [-1.1, 0.8]])
        assert frob_norm(dlog_fd_oracle(x, h) - dlog(x, h)) <= 1e-8

    def test_linearity_to_truncation_order(self):
        rng = np.random.default_rng(53)
        x = random_spd(rng, 4)
        h = random_sym(rng, 4)
        one = dlog_fd_oracle(x, h, step=1e-5)
        two = dlog_fd_oracle(x, 2.0 * h, step=1e-5)
        assert frob_norm(two - 2.0 * one) <= 1e-8 * frob_norm(one)

    def test_step_shrinks_until_spd(self):
        # direction so large that the default step would leave the cone
        x = np.diag([1.0, 1e-4])
        h = np.diag([0.0, -1.0]) * 1e3
        got = dlog_fd_oracle(x, h)
        want = dlog(x, sym(h))
        assert frob_norm(got - want) <= 1e-5 * frob_norm(want)
