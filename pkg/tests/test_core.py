import numpy as np
import pytest

from modematch import (
    CovarianceMatrix,
    SpectrumVector,
    SymplecticForm,
    SymplecticTransform,
    euler_decompose,
    random_symplectic,
    symplectic_eigenvalues,
    symplectic_form,
    symplectic_trace,
    williamson,
)
from modematch.core import interleaved_diagonal, symplectic_inverse
from modematch.errors import NotPositive, NotSorted, NotSymplectic
from modematch.marginals import local_diagonal, local_normal_form

R3 = np.sqrt(3.0)
TMS = np.array([
    [2.0, 0.0, R3, 0.0],
    [0.0, 2.0, 0.0, -R3],
    [R3, 0.0, 2.0, 0.0],
    [0.0, -R3, 0.0, 2.0],
])


def random_physical(rng, n, squeeze_bound=5.0, d_high=3.0):
    d = np.sort(rng.uniform(1.0, d_high, n))
    S = random_symplectic(n, squeeze_bound, rng)
    return CovarianceMatrix(S.entries @ interleaved_diagonal(d) @ S.entries.T), d, S


def skew_eigen_oracle(gamma):
    """Independent route: square roots of the eigenvalues of -g s g s."""
    n = gamma.shape[0] // 2
    sig = symplectic_form(n)
    ev = np.linalg.eigvals(-gamma @ sig @ gamma @ sig)
    return np.sqrt(np.sort(ev.real))


class TestSymplecticForm:
    def test_antisymmetric_and_squares_to_minus_identity(self):
        for n in (1, 2, 5):
            sig = SymplecticForm(n).matrix
            assert np.array_equal(sig, -sig.T)
            assert np.array_equal(sig @ sig, -np.eye(2 * n))

    def test_rejects_nonpositive_mode_count(self):
        with pytest.raises(ValueError):
            SymplecticForm(0)


class TestCovarianceMatrix:
    def test_rejects_asymmetric(self):
        bad = np.eye(4)
        bad[0, 1] = 1e-3
        with pytest.raises(ValueError):
            CovarianceMatrix(bad)

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositive):
            CovarianceMatrix(np.diag([1.0, -1.0]))

    def test_physicality_checks_agree(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            # mix physical and unphysical scales
            scale = rng.uniform(0.4, 1.5)
            gamma, _, _ = random_physical(rng, n)
            cov = CovarianceMatrix(scale * gamma.entries)
            assert cov.is_physical(1e-9) == cov.is_physical_by_spectrum(1e-9)

    def test_vacuum_is_physical(self):
        assert CovarianceMatrix.identity(3).is_physical()


class TestSpectrumVector:
    def test_requires_sorted(self):
        with pytest.raises(NotSorted):
            SpectrumVector(np.array([2.0, 1.0]))

    def test_requires_positive(self):
        with pytest.raises(NotPositive):
            SpectrumVector(np.array([0.0, 1.0]))

    def test_from_unsorted_records_permutation(self):
        vec, order = SpectrumVector.from_unsorted([3.0, 1.0, 2.0])
        assert np.array_equal(vec.values, [1.0, 2.0, 3.0])
        assert np.array_equal(order, [1, 2, 0])


class TestSymplecticEigenvalues:
    def test_vacuum(self):
        d = symplectic_eigenvalues(np.eye(4))
        np.testing.assert_allclose(d.values, [1.0, 1.0])

    def test_diagonal_input(self):
        d = symplectic_eigenvalues(np.diag([2.0, 2.0, 3.0, 3.0]))
        np.testing.assert_allclose(d.values, [2.0, 3.0])

    def test_round_trip_through_random_orbit(self):
        S = random_symplectic(2, 3.0, seed=11)
        target = np.diag([1.5, 1.5, 2.5, 2.5])
        gamma = S.entries @ target @ S.entries.T
        d = symplectic_eigenvalues(gamma)
        np.testing.assert_allclose(d.values, [1.5, 2.5], atol=1e-10)

    def test_matches_independent_eigenvalue_route(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            n = int(rng.integers(1, 6))
            gamma, _, _ = random_physical(rng, n)
            d = np.repeat(symplectic_eigenvalues(gamma).values, 2)
            np.testing.assert_allclose(d, skew_eigen_oracle(gamma.entries),
                                       rtol=0, atol=1e-8)

    def test_congruence_invariance(self):
        rng = np.random.default_rng(9)
        for _ in range(30):
            n = int(rng.integers(1, 6))
            gamma, _, _ = random_physical(rng, n)
            S = random_symplectic(n, 4.0, rng)
            moved = S.entries @ gamma.entries @ S.entries.T
            np.testing.assert_allclose(
                symplectic_eigenvalues(moved).values,
                symplectic_eigenvalues(gamma).values,
                rtol=0, atol=1e-8,
            )

    def test_rejects_indefinite(self):
        with pytest.raises(NotPositive):
            symplectic_eigenvalues(np.diag([1.0, -0.5]))


class TestWilliamson:
    def test_single_mode_diagonal_gives_identity_transform(self):
        S, d = williamson(np.diag([3.0, 3.0]))
        np.testing.assert_allclose(d.values, [3.0])
        np.testing.assert_allclose(S.entries, np.eye(2), atol=1e-12)

    def test_two_mode_squeezed_is_pure(self):
        S, d = williamson(TMS)
        np.testing.assert_allclose(d.values, [1.0, 1.0], atol=1e-12)
        np.testing.assert_allclose(S.entries @ TMS @ S.entries.T, np.eye(4), atol=1e-12)

    def test_round_trip_random(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            n = int(rng.integers(1, 9))
            gamma, d_in, _ = random_physical(rng, n, squeeze_bound=5.0)
            S, d = williamson(gamma)
            np.testing.assert_allclose(d.values, d_in, rtol=0, atol=1e-9)
            recon = S.entries @ gamma.entries @ S.entries.T
            assert np.max(np.abs(recon - interleaved_diagonal(d.values))) <= 1e-8
            assert np.max(np.abs(S.entries @ symplectic_form(n) @ S.entries.T
                                 - symplectic_form(n))) <= 1e-9


class TestSymplecticTrace:
    def test_vacuum(self):
        assert symplectic_trace(np.eye(6)) == pytest.approx(3.0)

    def test_diagonal(self):
        assert symplectic_trace(np.diag([2.0, 2.0, 5.0, 5.0])) == pytest.approx(7.0)

    def test_bounded_by_local_values(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            gamma, _, _ = random_physical(rng, 3)
            c = local_diagonal(gamma).values.values
            assert symplectic_trace(gamma) <= np.sum(c) + 1e-9

    def test_bounded_by_half_trace_in_normal_form(self):
        rng = np.random.default_rng(29)
        for _ in range(40):
            n = int(rng.integers(1, 6))
            gamma, _, _ = random_physical(rng, n)
            normal, _ = local_normal_form(gamma)
            assert symplectic_trace(normal) <= 0.5 * np.trace(normal.entries) + 1e-9


class TestEulerDecompose:
    def test_identity(self):
        factors = euler_decompose(np.eye(4))
        np.testing.assert_allclose(factors.O.entries, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(factors.V.entries, np.eye(4), atol=1e-12)
        np.testing.assert_allclose(factors.z, [1.0, 1.0])

    def test_already_in_squeeze_form(self):
        z = 2.5
        factors = euler_decompose(np.diag([z, 1.0 / z]))
        np.testing.assert_allclose(factors.O.entries, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(factors.V.entries, np.eye(2), atol=1e-12)
        np.testing.assert_allclose(factors.z, [z])

    def test_reconstruction_random(self):
        rng = np.random.default_rng(31)
        for _ in range(60):
            n = int(rng.integers(1, 7))
            S = random_symplectic(n, 5.0, rng)
            factors = euler_decompose(S)
            assert np.max(np.abs(factors.reconstruct() - S.entries)) <= 1e-8
            assert np.all(factors.z >= 1.0)
            for block in (factors.O.entries, factors.V.entries):
                assert np.max(np.abs(block @ block.T - np.eye(2 * n))) <= 1e-9
                sig = symplectic_form(n)
                assert np.max(np.abs(block @ sig @ block.T - sig)) <= 1e-9

    def test_passive_blocks_have_rotation_structure(self):
        # 2x2 blocks of the passive factors follow the complex embedding
        # [[re, im], [-im, re]], the determinant-positive rotation family
        rng = np.random.default_rng(37)
        for _ in range(20):
            n = int(rng.integers(1, 6))
            factors = euler_decompose(random_symplectic(n, 4.0, rng))
            for M in (factors.O.entries, factors.V.entries):
                xx, pp = M[0::2, 0::2], M[1::2, 1::2]
                xp, px = M[0::2, 1::2], M[1::2, 0::2]
                assert np.max(np.abs(xx - pp)) <= 1e-9
                assert np.max(np.abs(xp + px)) <= 1e-9

    def test_rejects_nonsymplectic(self):
        with pytest.raises(NotSymplectic):
            euler_decompose(2.0 * np.eye(4))


class TestRandomSymplectic:
    def test_symplectic_invariant(self):
        for n in (1, 3, 6):
            S = random_symplectic(n, 4.0, seed=5)
            sig = symplectic_form(n)
            assert np.max(np.abs(S.entries @ sig @ S.entries.T - sig)) <= 1e-10

    def test_passive_when_no_squeezing(self):
        S = random_symplectic(4, 1.0, seed=8)
        assert np.max(np.abs(S.entries @ S.entries.T - np.eye(8))) <= 1e-10

    def test_deterministic_per_seed(self):
        a = random_symplectic(3, 3.0, seed=42)
        b = random_symplectic(3, 3.0, seed=42)
        assert np.array_equal(a.entries, b.entries)

    def test_rejects_bad_squeeze_bound(self):
        with pytest.raises(ValueError):
            random_symplectic(2, 0.5, seed=1)


class TestSymplecticTransform:
    def test_inverse(self):
        S = random_symplectic(3, 4.0, seed=13)
        inv = symplectic_inverse(S.entries)
        np.testing.assert_allclose(S.entries @ inv, np.eye(6), atol=1e-12)

    def test_rejects_nonsymplectic(self):
        with pytest.raises(NotSymplectic):
            SymplecticTransform(np.diag([2.0, 2.0]))
