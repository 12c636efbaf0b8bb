import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermiwalk import onebody
from fermiwalk.core import opnorm, spectral_report
from fermiwalk.errors import InvalidArgument, PreconditionViolation
from fermiwalk.model import build_effective, shift_matrix
from fermiwalk.onebody import OneBodyDensity
from fermiwalk.walks import build_walk, random_coins
from helpers import haar_unitary, random_density


def _walk_d4(seed=3):
    return build_walk(random_coins(2, seed))


class TestDensity:
    def test_validation(self):
        with pytest.raises(InvalidArgument):
            OneBodyDensity(np.array([[0.5, 0.1], [0.0, 0.5]]))
        with pytest.raises(InvalidArgument):
            OneBodyDensity(np.diag([1.2, 0.1]))
        with pytest.raises(InvalidArgument):
            OneBodyDensity(np.diag([-0.1, 0.1]))
        assert OneBodyDensity(np.diag([1.2, 0.1]), check=False).d == 2

    def test_vacuum_density(self):
        v = OneBodyDensity.vacuum(3)
        assert np.array_equal(v.density(), np.zeros(3))
        assert not v.rho.flags.writeable


class TestStep:
    def test_zero_gives_B(self):
        eff = build_effective(haar_unitary(3, 0), 0.9, 0.4)
        out = onebody.step(np.zeros((3, 3)), eff)
        assert np.allclose(out.rho, eff.B, atol=1e-15)

    def test_alpha_zero_is_conjugation(self):
        W = haar_unitary(3, 4)
        rho = random_density(3, 5)
        out = onebody.step(rho, build_effective(W, 0.0, 0.4))
        assert np.allclose(out.rho, W @ rho @ W.conj().T, atol=1e-14)

    def test_shift_two_steps(self):
        eff = build_effective(shift_matrix(2), np.pi / 3, 0.5)
        rho = onebody.evolve(OneBodyDensity.vacuum(2), eff, 2).final
        assert np.allclose(rho.rho, 0.375 * np.eye(2), atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidArgument):
            onebody.step(np.zeros((3, 3)), build_effective(shift_matrix(2), 0.3, 0.5))


class TestEvolve:
    def test_t0(self):
        rho0 = random_density(3, 1)
        tr = onebody.evolve(rho0, build_effective(shift_matrix(3), 0.5, 0.3), 0)
        assert tr.times == [0] and np.array_equal(tr.final.rho, rho0)

    def test_record_every_keeps_last(self):
        tr = onebody.evolve(np.zeros((2, 2)), build_effective(shift_matrix(2), 0.5, 0.3), 7, record_every=3)
        assert tr.times == [0, 3, 6, 7]

    @pytest.mark.parametrize("d,m", [(2, 3), (3, 2), (4, 5)])
    def test_shift_period_formula(self, d, m):
        alpha, sigma = 0.8, 0.35
        rho0 = random_density(d, d + m)
        eff = build_effective(shift_matrix(d), alpha, sigma)
        got = onebody.evolve(rho0, eff, m * d, record_every=m * d).final.rho
        c2m = np.cos(alpha) ** (2 * m)
        assert np.allclose(got, c2m * rho0 + (1 - c2m) * sigma * np.eye(d), atol=1e-13)

    def test_distances_decrease_on_tail(self):
        eff = build_effective(_walk_d4(), np.pi / 3, 0.3)
        tr = onebody.evolve(np.zeros((4, 4)), eff, 120)
        tail = np.array(tr.distances_to_limit[40:])
        # not strictly monotone step to step, but monotone over a few steps
        assert np.all(tail[8:] < tail[:-8])

    def test_bad_args(self):
        eff = build_effective(shift_matrix(2), 0.5, 0.3)
        with pytest.raises(InvalidArgument):
            onebody.evolve(np.zeros((2, 2)), eff, -1)
        with pytest.raises(InvalidArgument):
            onebody.evolve(np.zeros((2, 2)), eff, 3, record_every=0)

    @given(st.integers(2, 5), st.integers(0, 25), st.integers(0, 10**5))
    @settings(max_examples=25, deadline=None)
    def test_closed_form_matches_iteration(self, d, t, seed):
        eff = build_effective(haar_unitary(d, seed), 0.4 + seed % 5 * 0.5, 0.6)
        rho0 = random_density(d, seed + 1)
        it = onebody.evolve(rho0, eff, t, record_every=max(t, 1)).final.rho
        assert np.abs(it - onebody.closed_form(rho0, eff, t)).max() < 1e-12

    @given(st.integers(2, 5), st.integers(0, 10**5))
    @settings(max_examples=25, deadline=None)
    def test_order_interval_preserved(self, d, seed):
        eff = build_effective(haar_unitary(d, seed), 1.1, 0.8)
        rho = OneBodyDensity(random_density(d, seed))
        for _ in range(10):
            rho = onebody.step(rho, eff)
            ev = np.linalg.eigvalsh(rho.rho)
            assert ev[0] > -1e-12 and ev[-1] < 1 + 1e-12


class TestFixedPoint:
    def test_generic_walk(self):
        eff = build_effective(_walk_d4(), np.pi / 3, 0.3)
        assert spectral_report(eff.M).condition_ok
        assert np.abs(onebody.fixed_point(eff).rho - 0.3 * np.eye(4)).max() < 1e-10

    def test_stagnant_raises(self):
        with pytest.raises(PreconditionViolation):
            onebody.fixed_point(build_effective(np.eye(3), np.pi / 3, 0.3))

    def test_shift_half_pi(self):
        fp = onebody.fixed_point(build_effective(shift_matrix(2), np.pi / 2, 0.45))
        assert np.allclose(fp.rho, 0.45 * np.eye(2), atol=1e-14)


class TestStagnant:
    def test_vacuum(self):
        limit, _ = onebody.stagnant_limit_demo(np.zeros((3, 3)), np.pi / 3, 0.4, 10)
        assert np.allclose(limit.rho, np.diag([0.4, 0, 0]))

    def test_full(self):
        limit, _ = onebody.stagnant_limit_demo(np.eye(3), np.pi / 3, 0.4, 10)
        assert np.allclose(limit.rho, np.diag([0.4, 1, 1]))

    def test_random_converges(self):
        limit, it = onebody.stagnant_limit_demo(random_density(4, 8), np.pi / 3, 0.4, 400)
        assert opnorm(limit.rho - it.rho) < 1e-8

    def test_no_coupling(self):
        with pytest.raises(InvalidArgument):
            onebody.stagnant_limit_demo(np.zeros((2, 2)), 0.0, 0.4, 3)


class TestDecayFit:
    def test_exact_geometric(self):
        t = np.arange(50)
        assert onebody.fit_decay_rate(t, 0.8 ** t) == pytest.approx(0.8)

    def test_floor_and_short(self):
        assert np.isnan(onebody.fit_decay_rate([0, 1], [1.0, 0.5]))
        t = np.arange(30)
        y = np.where(t < 20, 0.5 ** t, 0.0)
        assert onebody.fit_decay_rate(t, y) == pytest.approx(0.5)

    def test_rate_matches_spectral_radius_squared(self):
        eff = build_effective(_walk_d4(), np.pi / 3, 0.3)
        tr = onebody.evolve(np.zeros((4, 4)), eff, 300)
        r = spectral_report(eff.M).spectral_radius
        assert abs(onebody.fit_decay_rate(tr.times, tr.distances_to_limit) / r**2 - 1) < 0.1
