import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermiwalk import fock, onebody, shift_exact, twobody
from fermiwalk.core import gamma_on_wedge
from fermiwalk.errors import InvalidArgument, ResourceLimit
from fermiwalk.model import ReservoirSymbol, build_effective, shift_matrix
from helpers import random_density

BAND = ReservoirSymbol.banded([0.5, 0.2])


class TestSigmaBand:
    def test_uniform(self):
        s = ReservoirSymbol.uniform(0.4)
        assert np.array_equal(shift_exact.sigma_band(s, 3, 0).matrix, 0.4 * np.eye(3))
        assert shift_exact.sigma_band(s, 3, 1).is_zero
        assert shift_exact.sigma_band(s, 3, -2).is_zero

    def test_band_blocks(self):
        assert np.allclose(shift_exact.sigma_band(BAND, 2, 0).matrix, [[0.5, 0.2], [0.2, 0.5]])
        assert np.allclose(shift_exact.sigma_band(BAND, 2, 1).matrix, [[0, 0], [0.2, 0]])
        assert np.allclose(shift_exact.sigma_band(BAND, 2, -1).matrix, [[0, 0.2], [0, 0]])

    def test_block_hermitian_pairing(self):
        s = ReservoirSymbol.banded([0.4, 0.1 + 0.05j, 0.05j, 0.02])
        for u in range(3):
            A = shift_exact.sigma_band(s, 2, u).matrix
            B = shift_exact.sigma_band(s, 2, -u).matrix
            assert np.allclose(A.conj().T, B)


class TestOneBodyAt:
    def test_uniform_m1(self):
        r = shift_exact.one_body_at(0.5, np.zeros((3, 3)), np.pi / 3, 1)
        assert np.allclose(r.rho, 0.375 * np.eye(3))

    def test_cos_zero(self):
        rho0 = random_density(2, 1)
        r = shift_exact.one_body_at(BAND, rho0, np.pi / 2, 3)
        assert np.allclose(r.rho, [[0.5, 0.2], [0.2, 0.5]], atol=1e-15)

    def test_band_m2_frozen(self):
        r = shift_exact.one_body_at(BAND, np.zeros((2, 2)), np.pi / 3, 2)
        assert np.allclose(r.rho, [[0.46875, 0.2625], [0.2625, 0.46875]], atol=1e-15)

    def test_matches_history_sum(self):
        rho0 = random_density(3, 2)
        s = ReservoirSymbol.banded([0.45, 0.1, 0.08, 0.05, 0.02])
        a = 1.1
        c2 = np.cos(a) ** 2
        for m in range(6):
            ref = c2**m * rho0 + (1 - c2) * shift_exact.history_sum(s, 3, a, m)
            assert np.allclose(shift_exact.one_body_at(s, rho0, a, m).rho, ref, atol=1e-14)

    def test_period_recursion_with_B(self):
        # rho_{m+1} = cos^2 rho_m + sin^2 B(m)
        s = ReservoirSymbol.banded([0.45, 0.1, 0.08, 0.05, 0.02])
        a, d = 0.7, 2
        rho = random_density(d, 3)
        c2 = np.cos(a) ** 2
        for m in range(8):
            got = shift_exact.one_body_at(s, random_density(d, 3), a, m + 1).rho
            rho = c2 * rho + (1 - c2) * shift_exact.b_of_m(s, a, d, m)
            assert np.allclose(got, rho, atol=1e-14)

    def test_negative_m(self):
        with pytest.raises(InvalidArgument):
            shift_exact.one_body_at(0.5, np.zeros((2, 2)), 0.3, -1)


class TestBofM:
    def test_uniform(self):
        for m in range(4):
            assert np.allclose(shift_exact.b_of_m(0.3, 0.4, 3, m), 0.3 * np.eye(3))

    def test_band_m1(self):
        assert np.allclose(shift_exact.b_of_m(BAND, np.pi / 3, 2, 1), [[0.5, 0.3], [0.3, 0.5]])

    def test_stabilizes_to_limit(self):
        s = ReservoirSymbol.banded([0.45, 0.1, 0.08, 0.05, 0.02])
        lim = shift_exact.one_body_limit(s, 0.9, 2).rho
        assert np.allclose(shift_exact.b_of_m(s, 0.9, 2, 50), lim, atol=1e-15)


class TestLimit:
    def test_uniform(self):
        assert np.allclose(shift_exact.one_body_limit(0.3, 1.0, 4).rho, 0.3 * np.eye(4))

    def test_band_d2(self):
        assert np.allclose(shift_exact.one_body_limit(BAND, np.pi / 3, 2).rho, [[0.5, 0.3], [0.3, 0.5]])

    def test_band_narrower_than_sample(self):
        # sigma(u d) = 0 for u >= 1, yet the corner of sigma^{(1)} still
        # carries sigma(1): the last site sees the next period's first mode
        lim = shift_exact.one_body_limit(BAND, np.pi / 3, 4).rho
        ref = BAND.toeplitz(4)
        ref[3, 0] += 0.5 * 0.2
        ref[0, 3] += 0.5 * 0.2
        assert np.allclose(lim, ref)

    def test_uniform_limit_is_sigma0_block(self):
        lim = shift_exact.one_body_limit(0.3, np.pi / 3, 4).rho
        assert np.array_equal(lim, shift_exact.sigma_band(0.3, 4, 0).matrix)

    def test_geometric_accumulation(self):
        s = ReservoirSymbol.banded([0.45, 0.1, 0.08, 0.05, 0.02])
        c = np.cos(0.9)
        ref = np.array(shift_exact.sigma_band(s, 2, 0).matrix)
        for u in (1, 2):
            ref += c**u * (shift_exact.sigma_band(s, 2, u).matrix + shift_exact.sigma_band(s, 2, -u).matrix)
        assert np.allclose(shift_exact.one_body_limit(s, 0.9, 2).rho, ref)

    def test_no_coupling(self):
        with pytest.raises(InvalidArgument):
            shift_exact.one_body_limit(0.3, 0.0, 2)
        with pytest.raises(InvalidArgument):
            shift_exact.one_body_limit(0.3, np.pi, 2)

    def test_p_body(self):
        for p in (1, 2, 3):
            assert np.allclose(shift_exact.p_body_limit(0.4, 1.0, 3, p), 0.4**p * np.eye([3, 3, 1][p - 1]))
        lim = shift_exact.one_body_limit(BAND, np.pi / 3, 2).rho
        assert np.allclose(shift_exact.p_body_limit(BAND, np.pi / 3, 2, 1), lim)
        assert shift_exact.p_body_limit(BAND, np.pi / 3, 2, 2)[0, 0] == pytest.approx(0.16)
        with pytest.raises(InvalidArgument):
            shift_exact.p_body_limit(BAND, np.pi / 3, 2, 3)


class TestTwoBodyAt:
    def test_m0(self):
        rho1 = random_density(3, 4)
        rho2 = gamma_on_wedge(rho1, 2)
        assert np.array_equal(shift_exact.two_body_at(0.5, rho1, rho2, 0.4, 0).rho2, rho2)

    def test_uniform_vacuum_is_binomial_square(self):
        a, sigma = 0.8, 0.6
        for m in range(1, 5):
            q = (1 - np.cos(a) ** (2 * m)) * sigma
            r2 = shift_exact.two_body_at(sigma, np.zeros((3, 3)), np.zeros((3, 3)), a, m).rho2
            assert np.allclose(r2, q**2 * np.eye(3), atol=1e-14)

    def test_band_frozen(self):
        z1, z2 = np.zeros((2, 2)), np.zeros((1, 1))
        assert shift_exact.two_body_at(BAND, z1, z2, np.pi / 3, 1).rho2[0, 0].real == pytest.approx(0.118125, abs=1e-15)
        assert shift_exact.two_body_at(BAND, z1, z2, np.pi / 3, 2).rho2[0, 0].real == pytest.approx(0.1508203125, abs=1e-15)

    @given(st.integers(2, 4), st.integers(0, 12), st.integers(0, 10**4))
    @settings(max_examples=20, deadline=None)
    def test_matches_recursion(self, d, m, seed):
        a, sigma = 0.4 + (seed % 5) * 0.5, 0.3 + (seed % 3) * 0.2
        rho1 = random_density(d, seed)
        rho2 = gamma_on_wedge(rho1, 2)
        eff = build_effective(shift_matrix(d), a, sigma)
        tr = twobody.evolve_pair(rho1, rho2, eff, m * d, record_every=max(m * d, 1))
        assert np.abs(shift_exact.two_body_at(sigma, rho1, rho2, a, m).rho2 - tr.rho2[-1].rho2).max() < 1e-12
        assert np.abs(shift_exact.one_body_at(sigma, rho1, a, m).rho - tr.rho1[-1].rho).max() < 1e-12


class TestProfile:
    def test_uniform_flat(self):
        prof = shift_exact.asymptotic_density_and_correlations(0.3, 1.2, 4)
        assert prof.density == pytest.approx(0.3)
        off = prof.corr[~np.eye(4, dtype=bool)]
        assert np.allclose(off, 0.09)
        assert np.allclose(np.diag(prof.corr), 0.3)
        assert prof.mean_density_ratio == pytest.approx(0.3)

    def test_band_reaching_next_period(self):
        s = ReservoirSymbol.banded([0.4, 0.1, 0.1])
        a = np.pi / 3
        prof = shift_exact.asymptotic_density_and_correlations(s, a, 2)
        # sigma(0) + 2 sum_u cos^u Re sigma(u d)
        assert prof.density == pytest.approx(0.4 + 2 * np.cos(a) * 0.1)
        assert np.allclose(prof.profile, prof.density)

    def test_toeplitz_correlations(self):
        s = ReservoirSymbol.banded([0.45, 0.1, 0.08, 0.05, 0.02])
        C = shift_exact.asymptotic_density_and_correlations(s, 0.9, 4).corr
        for j in range(4):
            for k in range(j + 1, 4):
                assert C[j, k] == pytest.approx(C[0, k - j])
        assert set(shift_exact.AsymptoticProfile(0.1, C, 0.1, np.zeros(4)).to_dict()) == {
            "density", "corr", "mean_density_ratio", "profile",
        }


class TestFullState:
    def test_half_filling(self):
        st_ = shift_exact.quasifree_full_state(0.5 * np.eye(2))
        assert np.allclose(st_, np.eye(4) / 4)

    def test_gibbs_form(self):
        sigma, d = 0.3, 3
        mu = np.log((1 - sigma) / sigma)
        N = np.array([bin(i).count("1") for i in range(2**d)])
        ref = np.diag(np.exp(-mu * N))
        ref /= np.trace(ref)
        assert np.allclose(shift_exact.quasifree_full_state(sigma * np.eye(d)), ref, atol=1e-14)

    def test_generic_two_by_two(self):
        rng = np.random.default_rng(5)
        Q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        rho = Q @ np.diag([0.3, 0.6]) @ Q.conj().T
        state = shift_exact.quasifree_full_state(rho)
        assert np.trace(state).real == pytest.approx(1.0)
        # sector weights from eigenmode products
        w = [0.7 * 0.4, 0.3 * 0.4 + 0.7 * 0.6, 0.3 * 0.6]
        for p in range(3):
            assert np.trace(shift_exact.sector_block(state, p)).real == pytest.approx(w[p])
        # p-sector block = det(1 - rho) Gamma_p(rho (1 - rho)^{-1})
        X = rho @ np.linalg.inv(np.eye(2) - rho)
        det = np.linalg.det(np.eye(2) - rho).real
        assert np.allclose(shift_exact.sector_block(state, 1), det * X)
        assert shift_exact.sector_block(state, 2)[0, 0] == pytest.approx(det * np.linalg.det(X))

    def test_reduced_matrices_recovered(self):
        rho = random_density(3, 9)
        state = shift_exact.quasifree_full_state(rho)
        a = [op.toarray() for op in fock.annihilators(3)]
        r1 = np.array([[np.trace(state @ a[k].conj().T @ a[j]) for k in range(3)] for j in range(3)])
        assert np.allclose(r1, rho, atol=1e-13)
        pairs = [(0, 1), (0, 2), (1, 2)]
        r2 = np.array(
            [
                [np.trace(state @ a[k1].conj().T @ a[k2].conj().T @ a[j2] @ a[j1]) for (k1, k2) in pairs]
                for (j1, j2) in pairs
            ]
        )
        assert np.allclose(r2, gamma_on_wedge(rho, 2), atol=1e-13)

    def test_pure_eigenmodes(self):
        state = shift_exact.quasifree_full_state(np.diag([1.0, 0.0]))
        expected = np.zeros((4, 4))
        expected[2, 2] = 1.0  # site 0 occupied is the most significant bit
        assert np.allclose(state, expected)

    def test_resource_limit(self):
        with pytest.raises(ResourceLimit):
            shift_exact.quasifree_full_state(0.5 * np.eye(13))


def test_second_quantized_is_multiplicative():
    rng = np.random.default_rng(0)
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    lhs = shift_exact.second_quantized(A @ B)
    rhs = shift_exact.second_quantized(A) @ shift_exact.second_quantized(B)
    assert np.allclose(lhs, rhs)
    assert np.allclose(shift_exact.second_quantized(np.eye(3)), np.eye(8))


def test_onebody_limit_matches_general_fixed_point_for_uniform():
    eff = build_effective(shift_matrix(3), 0.9, 0.35)
    assert np.allclose(onebody.fixed_point(eff).rho, shift_exact.one_body_limit(0.35, 0.9, 3).rho)
