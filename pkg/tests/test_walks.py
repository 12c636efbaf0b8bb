import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fermiwalk import walks
from fermiwalk.errors import InvalidArgument
from fermiwalk.model import shift_matrix
from fermiwalk.walks import DIRICHLET, HADAMARD, PERIODIC, SWAP, CoinConfig

IDENT = np.eye(2, dtype=complex)


def _is_permutation(W):
    A = np.abs(W)
    return np.all((A == 0) | (A == 1)) and np.all(A.sum(0) == 1) and np.all(A.sum(1) == 1)


class TestCoinConfig:
    def test_rejects_nonunitary(self):
        with pytest.raises(InvalidArgument):
            CoinConfig(2, (IDENT, np.ones((2, 2))))
        with pytest.raises(InvalidArgument):
            CoinConfig(2, (IDENT,))
        with pytest.raises(InvalidArgument):
            CoinConfig(2, (IDENT, IDENT), boundary="open")
        with pytest.raises(InvalidArgument):
            CoinConfig.uniform(2, IDENT, DIRICHLET)
        with pytest.raises(InvalidArgument):
            CoinConfig.uniform(1, IDENT)

    def test_dirichlet_ends_forced(self):
        c = CoinConfig.uniform(4, HADAMARD, DIRICHLET)
        assert np.array_equal(c.coins[0], SWAP) and np.array_equal(c.coins[-1], SWAP)
        assert np.array_equal(c.coins[1], HADAMARD)
        assert c.d == 6

    def test_json_roundtrip(self):
        c = walks.random_coins(3, 11)
        back = CoinConfig.from_dict(json.loads(json.dumps(c.to_dict())))
        assert back == c

    def test_angles_form(self):
        c = CoinConfig.from_dict({"n": 2, "coins": [[0.3, 0.1, 0.2, 0.0], [0.7, 0.0, 0.0, 1.0]]})
        assert np.allclose(c.coins[0], walks.coin_from_angles(0.3, 0.1, 0.2, 0.0))


class TestPeriodic:
    def test_swap_coins_permutation(self):
        W = walks.build_periodic(CoinConfig.uniform(3, SWAP)).W
        assert _is_permutation(W)

    def test_identity_coins_chiral(self):
        W = walks.build_periodic(CoinConfig.uniform(3, IDENT)).W
        assert _is_permutation(W)
        # |+, x> -> |+, x+1>
        assert W[2, 0] == 1 and W[4, 2] == 1 and W[0, 4] == 1

    def test_hadamard_n2(self):
        W = walks.build_periodic(CoinConfig.uniform(2, HADAMARD)).W
        h = 1 / np.sqrt(2)
        # basis |+,0>, |-,0>, |+,1>, |-,1>; on a 2-ring x+1 = x-1
        ref = np.array(
            [
                [0, 0, h, h],
                [0, 0, h, -h],
                [h, h, 0, 0],
                [h, -h, 0, 0],
            ]
        )
        assert np.allclose(W, ref)
        assert np.abs(W.conj().T @ W - np.eye(4)).max() < 1e-14

    @given(st.integers(3, 7), st.integers(0, 10**5))
    @settings(max_examples=25, deadline=None)
    def test_two_nonzeros_per_column(self, n, seed):
        W = walks.build_periodic(walks.random_coins(n, seed)).W
        assert np.all((np.abs(W) > 0).sum(axis=0) == 2)
        assert np.all((np.abs(W) > 0).sum(axis=1) == 2)
        assert np.abs(W.conj().T @ W - np.eye(2 * n)).max() < 1e-13

    def test_wrong_boundary(self):
        with pytest.raises(InvalidArgument):
            walks.build_periodic(CoinConfig.uniform(3, IDENT, DIRICHLET))
        with pytest.raises(InvalidArgument):
            walks.build_dirichlet(CoinConfig.uniform(3, IDENT))


class TestDirichlet:
    def test_identity_interior_reflects(self):
        W = walks.build_dirichlet(CoinConfig.uniform(4, IDENT, DIRICHLET)).W
        assert W.shape == (6, 6) and _is_permutation(W)
        # e0 = |-,0> is sent to |+,1> = e1 by the boundary swap
        assert W[1, 0] == 1
        # some power returns e0 after visiting every state
        v = np.eye(6)[0]
        seen = set()
        for _ in range(6):
            seen.add(int(np.argmax(np.abs(v))))
            v = W @ v
        assert seen == set(range(6))

    def test_hadamard_n3(self):
        W = walks.build_dirichlet(CoinConfig.uniform(3, HADAMARD, DIRICHLET)).W
        h = 1 / np.sqrt(2)
        # basis |-,0>, |+,1>, |-,1>, |+,2>
        ref = np.array(
            [
                [0, h, -h, 0],
                [1, 0, 0, 0],
                [0, 0, 0, 1],
                [0, h, h, 0],
            ]
        )
        assert np.allclose(W, ref)
        assert np.abs(W.conj().T @ W - np.eye(4)).max() < 1e-14

    @given(st.integers(3, 7), st.integers(0, 10**5))
    @settings(max_examples=25, deadline=None)
    def test_block_decomposition(self, n, seed):
        coins = walks.random_coins(n, seed, DIRICHLET)
        full = walks.full_periodic_matrix(coins)
        d = coins.d
        W = walks.build_dirichlet(coins).W
        assert np.array_equal(W, full[1 : d + 1, 1 : d + 1])
        outside = [0, d + 1]
        assert np.all(full[np.ix_(outside, range(1, d + 1))] == 0)
        assert np.all(full[np.ix_(range(1, d + 1), outside)] == 0)
        assert np.abs(W.conj().T @ W - np.eye(d)).max() < 1e-13


class TestRandomCoins:
    def test_deterministic(self):
        a, b = walks.random_coins(4, 99), walks.random_coins(4, 99)
        assert a == b
        assert walks.random_coins(4, 100) != a

    def test_generic_over_many_seeds(self):
        assert all(walks.is_generic(walks.random_coins(3, s)) for s in range(1000))

    def test_margin_bound(self):
        c = walks.random_coins(50, 1, margin=0.2)
        m = walks.is_generic(c).min_margin
        assert m >= np.sin(2 * 0.2) / 2 - 1e-12

    def test_zero_margin_allowed(self):
        assert walks.random_coins(3, 0, margin=0.0).n == 3

    def test_rejects(self):
        with pytest.raises(InvalidArgument):
            walks.random_coins(1, 0)
        with pytest.raises(InvalidArgument):
            walks.random_coins(3, 0, margin=1.0)


class TestGenericity:
    def test_identity_coins(self):
        rep = walks.is_generic(CoinConfig.uniform(3, IDENT))
        assert not rep and rep.offending == (0, 1, 2)

    def test_hadamard(self):
        rep = walks.is_generic(CoinConfig.uniform(3, HADAMARD))
        assert rep and rep.min_margin == pytest.approx(0.5)

    def test_mixed(self):
        rep = walks.is_generic(CoinConfig(3, (HADAMARD, IDENT, HADAMARD)))
        assert rep.offending == (1,)

    def test_dirichlet_interior_only(self):
        rep = walks.is_generic(CoinConfig(4, (IDENT, HADAMARD, HADAMARD, IDENT), DIRICHLET))
        assert rep and set(rep.margins) == {1, 2}
        diag = np.diag([1.0, 1.0j])  # beta = 0
        assert not walks.is_generic(CoinConfig(4, (IDENT, HADAMARD, diag, IDENT), DIRICHLET))


class TestCyclicity:
    def test_identity(self):
        assert not walks.is_cyclic(np.eye(4))

    def test_shift(self):
        assert walks.is_cyclic(shift_matrix(5))

    def test_hadamard_d4(self):
        W = walks.build_dirichlet(CoinConfig.uniform(3, HADAMARD, DIRICHLET))
        assert walks.is_cyclic(W)
        assert walks.krylov_singular_values(W).min() > 1e-3

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_generic_but_not_cyclic(self, n):
        # translation invariant ring with an even number of cells: every coin
        # has |alpha beta| = 1/2, yet e0 is not cyclic and M keeps a unit eigenvalue
        coins = CoinConfig.uniform(n, HADAMARD)
        W = walks.build_periodic(coins)
        assert walks.is_generic(coins)
        assert not walks.is_cyclic(W)
        assert not walks.thermalization_certificate(W, np.pi / 3).condition_ok

    @pytest.mark.parametrize("n", [3, 5])
    def test_odd_hadamard_ring_cyclic(self, n):
        W = walks.build_periodic(CoinConfig.uniform(n, HADAMARD))
        assert walks.is_cyclic(W)
        assert walks.thermalization_certificate(W, np.pi / 3).condition_ok


class TestCertificate:
    def test_hadamard(self):
        W = walks.build_periodic(CoinConfig.uniform(3, HADAMARD))
        rep = walks.thermalization_certificate(W, np.pi / 3)
        assert rep.condition_ok and rep.spectral_radius < 1

    def test_identity_walk(self):
        rep = walks.thermalization_certificate(np.eye(3), np.pi / 3)
        assert not rep.condition_ok
        assert sorted(np.abs(rep.eigenvalues)) == pytest.approx([0.5, 1, 1])

    @pytest.mark.parametrize("alpha", [0.0, np.pi])
    def test_trivial_coupling(self, alpha):
        W = walks.build_walk(walks.random_coins(3, 5))
        assert not walks.thermalization_certificate(W, alpha).condition_ok

    def test_power_iteration_cross_check(self):
        W = walks.build_walk(walks.random_coins(2, 4))
        rep = walks.thermalization_certificate(W, np.pi / 3)
        M = np.array(W.W)
        M[:, 0] *= 0.5
        n = np.linalg.norm(np.linalg.matrix_power(M, 400), 2)
        assert n ** (1 / 400) == pytest.approx(rep.spectral_radius, rel=2e-2)
