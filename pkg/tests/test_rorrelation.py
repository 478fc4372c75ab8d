import numpy as np
import pytest

from forrlab.boolfun import TruthTable, forrelation
from forrlab.rorrelation import (
    hadamard_normalized,
    is_orthogonal,
    l1_concentration,
    max_over_g,
    max_rorr,
    rorr,
    sample_haar_orthogonal,
)

IP2 = TruthTable.from_signs([1, 1, 1, -1])
CONST2 = TruthTable.from_signs([1, 1, 1, 1])


class TestRorr:
    def test_hadamard_on_bent_pair(self):
        assert rorr(hadamard_normalized(2), IP2, IP2) == pytest.approx(1.0, abs=1e-12)

    def test_identity_diagonal_sum(self):
        assert rorr(np.eye(4), CONST2, CONST2) == pytest.approx(1.0)

    def test_identity_sign_flip(self):
        assert rorr(np.eye(4), CONST2, CONST2.negate()) == pytest.approx(-1.0)

    def test_matches_forrelation_on_all_pairs(self):
        h = hadamard_normalized(2)
        for fb in range(16):
            for gb in range(16):
                f, g = TruthTable(2, fb), TruthTable(2, gb)
                assert abs(rorr(h, f, g) - float(forrelation(f, g))) <= 1e-9

    def test_bounded_for_orthogonal_u(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            u = sample_haar_orthogonal(16, rng)
            f = TruthTable(4, int(rng.integers(0, 1 << 16)))
            g = TruthTable(4, int(rng.integers(0, 1 << 16)))
            assert abs(rorr(u, f, g)) <= 1.0 + 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            rorr(np.eye(8), IP2, IP2)


class TestMaxOverG:
    def test_matches_brute_force_at_dim4(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            u = sample_haar_orthogonal(4, rng)
            for fb in range(16):
                f = TruthTable(2, fb)
                g_star, value = max_over_g(u, f)
                brute = max(rorr(u, f, TruthTable(2, gb)) for gb in range(16))
                assert abs(value - brute) <= 1e-12
                assert rorr(u, f, g_star) == pytest.approx(value, abs=1e-12)

    def test_hadamard_bent_attains_one(self):
        _, value = max_over_g(hadamard_normalized(2), IP2)
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_identity_returns_f_itself(self):
        f = TruthTable(2, 0b0110)
        g_star, value = max_over_g(np.eye(4), f)
        assert g_star == f and value == pytest.approx(1.0)

    def test_zero_ties_break_positive(self):
        u = np.zeros((2, 2))
        u[0, 0] = 1.0  # second output coordinate is exactly zero
        g_star, _ = max_over_g(u, np.array([1.0, 1.0]))
        assert g_star.sign(1) == 1


class TestMaxRorr:
    def test_hadamard_exhaustive_attains_one(self):
        _, _, value = max_rorr(hadamard_normalized(2), "exhaustive")
        assert value == pytest.approx(1.0, abs=1e-12)

    def test_haar_dim16_strictly_below_one(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            u = sample_haar_orthogonal(16, rng)
            _, _, value = max_rorr(u, "exhaustive")
            assert value < 1.0

    def test_local_search_lower_bounds_exhaustive(self):
        rng = np.random.default_rng(3)
        u = sample_haar_orthogonal(16, rng)
        _, _, exact = max_rorr(u, "exhaustive")
        _, _, heuristic = max_rorr(u, "local-search", restarts=8, rng=rng)
        assert heuristic <= exact + 1e-12

    def test_exhaustive_cap(self):
        with pytest.raises(ValueError):
            max_rorr(np.eye(32), "exhaustive")

    def test_consistency_of_returned_triple(self):
        rng = np.random.default_rng(4)
        u = sample_haar_orthogonal(8, rng)
        f, g, value = max_rorr(u, "exhaustive")
        assert rorr(u, f, g) == pytest.approx(value, abs=1e-12)


class TestHaarSampling:
    def test_orthogonality(self):
        rng = np.random.default_rng(5)
        for dim in (4, 16, 64):
            assert is_orthogonal(sample_haar_orthogonal(dim, rng))

    def test_determinant_is_unit(self):
        rng = np.random.default_rng(6)
        for dim in (4, 16, 64):
            det = np.linalg.det(sample_haar_orthogonal(dim, rng))
            assert abs(abs(det) - 1.0) <= 1e-6

    def test_first_column_moments(self):
        # Haar marginal: coordinates of any column are mean 0, variance 1/N,
        # same law as a normalized Gaussian vector.  Fixed seed keeps the
        # 3-sigma bands deterministic.
        rng = np.random.default_rng(7)
        dim = 16
        draws = 10_000
        firsts = np.array([sample_haar_orthogonal(dim, rng)[:, 0] for _ in range(draws)])
        sigma_mean = (1 / dim) ** 0.5 / draws ** 0.5
        assert np.all(np.abs(firsts.mean(axis=0)) <= 3 * sigma_mean)
        var = firsts.var(axis=0)
        # a squared coordinate has variance close to 2/N^2 per draw
        sigma_var = (2 / dim ** 2) ** 0.5 / draws ** 0.5
        assert np.all(np.abs(var - 1 / dim) <= 3 * sigma_var)


class TestL1Concentration:
    def test_dim2_ratio_within_plane_bounds(self):
        rng = np.random.default_rng(8)
        rep = l1_concentration(2, 2_000, rng)
        assert rep.max_ratio <= 1.0 + 1e-12
        assert rep.mean_ratio >= 1 / np.sqrt(2) - 1e-12

    def test_dim256_no_exceedances_and_gaussian_mean(self):
        rng = np.random.default_rng(9)
        rep = l1_concentration(256, 20_000, rng)
        assert rep.exceedances == 0
        # independent oracle: fresh normalized-Gaussian sampler
        orng = np.random.default_rng(10)
        vecs = orng.standard_normal((20_000, 256))
        oracle = float(
            (np.abs(vecs).sum(axis=1) / np.linalg.norm(vecs, axis=1)).mean()
        ) / np.sqrt(256)
        assert abs(rep.mean_ratio - oracle) <= 0.01

    def test_dim_validation(self):
        with pytest.raises(ValueError):
            l1_concentration(1, 10, np.random.default_rng(0))
