"""Coined quantum walks on a ring or a segment as sample unitaries.

The walk acts on ``C^2 x C^n`` (spin x position) as

    W = sum_x  P_+ C_x x |x+1><x|  +  P_- C_x x |x-1><x|

with ``C_x = [[alpha_x, beta_x], [gamma_x, delta_x]]`` in the spin basis
``(|+1>, |-1>)``.  Basis of ``C^d``:

* periodic: ``e_{2x} = |+1, x>``, ``e_{2x+1} = |-1, x>``, ``d = 2n``; the
  reservoir couples to ``e_0 = |+1, 0>``;
* Dirichlet: the end coins are forced to the spin flip, the two states
  ``|+1, 0>`` and ``|-1, n-1>`` decouple and the remaining
  ``|-1, 0>, |+1, 1>, |-1, 1>, ..., |-1, n-2>, |+1, n-1>`` give ``d = 2(n-1)``;
  the reservoir couples to ``e_0 = |-1, 0>``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import SpectralReport, spectral_report
from .errors import InvalidArgument
from .model import CouplingParams, SampleUnitary, matrix_from_json, matrix_to_json

__all__ = [
    "PERIODIC",
    "DIRICHLET",
    "SWAP",
    "GENERIC_TOL",
    "CoinConfig",
    "GenericityReport",
    "coin_from_angles",
    "build_periodic",
    "build_dirichlet",
    "build_walk",
    "full_periodic_matrix",
    "random_coins",
    "is_generic",
    "krylov_singular_values",
    "is_cyclic",
    "thermalization_certificate",
]

PERIODIC = "periodic"
DIRICHLET = "dirichlet"
SWAP = np.array([[0, 1], [1, 0]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
GENERIC_TOL = 1e-8


def coin_from_angles(theta: float, phi1: float, phi2: float, phi3: float) -> np.ndarray:
    """``e^{i phi3} [[e^{i phi1} cos t, e^{i phi2} sin t], [-e^{-i phi2} sin t, e^{-i phi1} cos t]]``."""
    ct, st = np.cos(theta), np.sin(theta)
    C = np.array(
        [
            [np.exp(1j * phi1) * ct, np.exp(1j * phi2) * st],
            [-np.exp(-1j * phi2) * st, np.exp(-1j * phi1) * ct],
        ]
    )
    return np.exp(1j * phi3) * C


@dataclass(frozen=True)
class CoinConfig:
    """Site-dependent coins and a boundary condition.

    For ``boundary == "dirichlet"`` the first and last coins are replaced by
    the spin flip on construction, whatever was passed in.
    """

    n: int
    coins: tuple
    boundary: str = PERIODIC
    tol: float = field(default=1e-12, compare=False, repr=False)

    def __post_init__(self):
        if self.boundary not in (PERIODIC, DIRICHLET):
            raise InvalidArgument(f"boundary must be '{PERIODIC}' or '{DIRICHLET}', got {self.boundary!r}")
        coins = [np.array(C, dtype=complex) for C in self.coins]
        if len(coins) != self.n:
            raise InvalidArgument(f"need {self.n} coins, got {len(coins)}")
        for x, C in enumerate(coins):
            if C.shape != (2, 2):
                raise InvalidArgument(f"coin {x} must be 2x2, got {C.shape}")
            err = np.abs(C.conj().T @ C - np.eye(2)).max()
            if err > self.tol:
                raise InvalidArgument(f"coin {x} is not unitary (max |C*C - 1| = {err:.3g})")
        if self.boundary == DIRICHLET:
            if self.n < 3:
                raise InvalidArgument(f"Dirichlet walks need n >= 3, got {self.n}")
            coins[0] = SWAP.copy()
            coins[-1] = SWAP.copy()
        elif self.n < 2:
            raise InvalidArgument(f"periodic walks need n >= 2, got {self.n}")
        for C in coins:
            C.setflags(write=False)
        object.__setattr__(self, "coins", tuple(coins))

    @property
    def d(self) -> int:
        return 2 * self.n if self.boundary == PERIODIC else 2 * (self.n - 1)

    @classmethod
    def uniform(cls, n: int, coin, boundary: str = PERIODIC) -> "CoinConfig":
        return cls(n, tuple(np.asarray(coin) for _ in range(n)), boundary)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "boundary": self.boundary,
            "coins": [matrix_to_json(C) for C in self.coins],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CoinConfig":
        """Inverse of :meth:`to_dict`; coins may also be given as four angles."""
        coins = []
        for c in data["coins"]:
            arr = np.asarray(c, dtype=float)
            coins.append(coin_from_angles(*arr) if arr.shape == (4,) else matrix_from_json(c))
        return cls(int(data["n"]), tuple(coins), data.get("boundary", PERIODIC))

    def __eq__(self, other):
        if not isinstance(other, CoinConfig):
            return NotImplemented
        return (
            self.n == other.n
            and self.boundary == other.boundary
            and all(np.array_equal(a, b) for a, b in zip(self.coins, other.coins))
        )

    __hash__ = None


def full_periodic_matrix(coins: CoinConfig) -> np.ndarray:
    """The ``2n x 2n`` ring walk for the given coins (no boundary applied)."""
    n = coins.n
    W = np.zeros((2 * n, 2 * n), dtype=complex)
    for x, C in enumerate(coins.coins):
        up, down = 2 * ((x + 1) % n), 2 * ((x - 1) % n) + 1
        # spin up moves right, spin down moves left
        W[up, 2 * x] = C[0, 0]
        W[down, 2 * x] = C[1, 0]
        W[up, 2 * x + 1] = C[0, 1]
        W[down, 2 * x + 1] = C[1, 1]
    return W


def build_periodic(coins: CoinConfig) -> SampleUnitary:
    """Ring walk with ``d = 2n``."""
    if coins.boundary != PERIODIC:
        raise InvalidArgument("build_periodic needs a periodic CoinConfig")
    return SampleUnitary(full_periodic_matrix(coins))


def build_dirichlet(coins: CoinConfig) -> SampleUnitary:
    """Reflecting walk with ``d = 2(n - 1)``.

    With spin flips at both ends the ring walk leaves
    ``span{|+1, 0>, |-1, n-1>}`` invariant; its complement is the
    contiguous block of basis indices ``1 .. 2n-2``.
    """
    if coins.boundary != DIRICHLET:
        raise InvalidArgument("build_dirichlet needs a Dirichlet CoinConfig")
    full = full_periodic_matrix(coins)
    d = 2 * (coins.n - 1)
    block = full[1 : d + 1, 1 : d + 1]
    leak = max(np.abs(full[1 : d + 1, [0, d + 1]]).max(), np.abs(full[[0, d + 1], 1 : d + 1]).max())
    if leak != 0.0:
        raise InvalidArgument("boundary coins do not decouple the reflecting block")
    return SampleUnitary(block)


def build_walk(coins: CoinConfig) -> SampleUnitary:
    return build_periodic(coins) if coins.boundary == PERIODIC else build_dirichlet(coins)


def random_coins(n: int, seed, boundary: str = PERIODIC, margin: float = 0.05) -> CoinConfig:
    """Seeded coins with ``theta`` uniform in ``[margin, pi/2 - margin]``.

    Phases are uniform in ``[0, 2 pi)``.  A positive margin keeps
    ``|alpha_x beta_x| = |sin(2 theta)| / 2`` bounded away from zero.
    """
    if n < 2:
        raise InvalidArgument(f"n must be >= 2, got {n}")
    if not 0.0 <= margin < np.pi / 4:
        raise InvalidArgument(f"margin must lie in [0, pi/4), got {margin}")
    rng = np.random.default_rng(seed)
    coins = []
    for _ in range(n):
        theta = rng.uniform(margin, np.pi / 2 - margin)
        phases = rng.uniform(0.0, 2 * np.pi, size=3)
        coins.append(coin_from_angles(theta, *phases))
    return CoinConfig(n, tuple(coins), boundary)


@dataclass(frozen=True)
class GenericityReport:
    """Per-site ``|alpha_x beta_x|`` over the sites that matter."""

    generic: bool
    margins: dict
    offending: tuple

    def __bool__(self) -> bool:
        return self.generic

    @property
    def min_margin(self) -> float:
        return min(self.margins.values()) if self.margins else float("inf")


def is_generic(coins: CoinConfig, tol: float = GENERIC_TOL) -> GenericityReport:
    """``|alpha_x beta_x| > tol`` at every site (interior sites for Dirichlet)."""
    sites = range(coins.n) if coins.boundary == PERIODIC else range(1, coins.n - 1)
    margins = {x: float(abs(coins.coins[x][0, 0] * coins.coins[x][0, 1])) for x in sites}
    bad = tuple(x for x, m in margins.items() if m <= tol)
    return GenericityReport(not bad, margins, bad)


def krylov_singular_values(W) -> np.ndarray:
    """Singular values of ``[e0, W e0, ..., W^{d-1} e0]``."""
    W = W.W if isinstance(W, SampleUnitary) else np.asarray(W, dtype=complex)
    d = W.shape[0]
    K = np.zeros((d, d), dtype=complex)
    v = np.zeros(d, dtype=complex)
    v[0] = 1.0
    for k in range(d):
        K[:, k] = v
        v = W @ v
    return np.linalg.svd(K, compute_uv=False)


def is_cyclic(W, tol: float = 1e-8) -> bool:
    """Whether ``e0`` is cyclic for ``W`` (smallest Krylov singular value above ``tol``)."""
    return bool(krylov_singular_values(W).min() > tol)


def thermalization_certificate(W, alpha) -> SpectralReport:
    """Spectral report on ``M = W (1 + (cos(alpha) - 1)|e0><e0|)``."""
    W = W.W if isinstance(W, SampleUnitary) else SampleUnitary(np.asarray(W)).W
    cp = alpha if isinstance(alpha, CouplingParams) else CouplingParams(float(alpha))
    M = np.array(W)
    M[:, 0] *= cp.cos_alpha
    return spectral_report(M)
