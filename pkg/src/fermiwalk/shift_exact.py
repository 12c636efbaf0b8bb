"""Closed forms for the periodic shift sample at stroboscopic times ``t = m d``.

With ``W = S`` (``S e_j = e_{j-1}``, ``S e_0 = e_{d-1}``) every site of the
sample meets the coupled reservoir site once per period of ``d`` steps, and the
reduced states at times ``m d`` are explicit sums over the blocks

    sigma^{(s)}[j, k] = sigma(k - j + s d)

of the reservoir two-point function.  Correlated reservoirs are allowed here,
as long as the symbol is banded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    antisymmetric_sandwich,
    gamma_on_wedge,
    hermitian_part,
    wedge_basis,
)
from .errors import InvalidArgument, NumericFailure, ResourceLimit
from .model import ReservoirSymbol
from .onebody import OneBodyDensity
from .twobody import TwoBodyDensity

__all__ = [
    "SigmaBand",
    "sigma_band",
    "history_sum",
    "one_body_at",
    "b_of_m",
    "one_body_limit",
    "two_body_at",
    "p_body_limit",
    "AsymptoticProfile",
    "asymptotic_density_and_correlations",
    "quasifree_full_state",
    "second_quantized",
    "sector_block",
    "MAX_FULL_STATE_D",
    "TRUNCATION_TOL",
]

#: Largest sample for which the full ``2^d x 2^d`` state is built.
MAX_FULL_STATE_D = 12
#: Terms with ``|cos(alpha)|^u * max|sigma|`` below this are dropped.
TRUNCATION_TOL = 1e-15


def _symbol(symbol) -> ReservoirSymbol:
    if isinstance(symbol, ReservoirSymbol):
        return symbol
    if np.isscalar(symbol):
        return ReservoirSymbol.uniform(float(symbol))
    return ReservoirSymbol.banded(symbol)


@dataclass(frozen=True)
class SigmaBand:
    """Block ``sigma^{(s)}`` of the reservoir density seen by a ``d``-site sample."""

    d: int
    s: int
    matrix: np.ndarray

    @property
    def is_zero(self) -> bool:
        return not np.any(self.matrix)


def sigma_band(symbol, d: int, s: int) -> SigmaBand:
    """``sigma^{(s)}[j, k] = sigma(k - j + s d)`` for ``0 <= j, k < d``."""
    symbol = _symbol(symbol)
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    s = int(s)
    mat = np.zeros((d, d), dtype=complex)
    # offsets range over s*d - (d-1) ... s*d + (d-1)
    if abs(s) * d - (d - 1) <= symbol.band:
        for j in range(d):
            for k in range(d):
                mat[j, k] = symbol(k - j + s * d)
    mat.setflags(write=False)
    return SigmaBand(d, s, mat)


def _max_block(symbol: ReservoirSymbol, d: int) -> int:
    """Largest ``|s|`` with a possibly non-zero ``sigma^{(s)}``."""
    return (symbol.band + d - 1) // d


def history_sum(symbol, d: int, alpha: float, m: int) -> np.ndarray:
    """``S_m = sum_{r,s<m} cos(alpha)^{2(m-1)-r-s} sigma^{(r-s)}``.

    This is the reservoir contribution accumulated over ``m`` periods; the
    one-body state is ``cos^{2m} rho0 + sin^2 S_m``.
    """
    symbol = _symbol(symbol)
    c = float(np.cos(alpha))
    out = np.zeros((d, d), dtype=complex)
    if m <= 0:
        return out
    umax = min(m - 1, _max_block(symbol, d))
    # group the double sum by u = r - s
    for u in range(-umax, umax + 1):
        blk = sigma_band(symbol, d, u).matrix
        if not blk.any():
            continue
        a = abs(u)
        # sum over s of c^{2(m-1) - a - 2 s} for s = 0 .. m-1-a
        coef = sum(c ** (2 * (m - 1) - a - 2 * s) for s in range(m - a))
        out += coef * blk
    return out


def one_body_at(symbol, rho1_0, alpha: float, m: int) -> OneBodyDensity:
    """One-body state at time ``m d`` for the shift sample.

    ``cos^{2m} rho0 + (1 - cos^{2m}) sigma^{(0)}
    + sum_{u=1}^{m-1} (cos^u - cos^{2m-u}) (sigma^{(u)} + sigma^{(-u)})``.
    """
    symbol = _symbol(symbol)
    if m < 0:
        raise InvalidArgument(f"m must be >= 0, got {m}")
    rho0 = rho1_0 if isinstance(rho1_0, OneBodyDensity) else OneBodyDensity(np.asarray(rho1_0))
    d = rho0.d
    c = float(np.cos(alpha))
    c2m = c ** (2 * m)
    out = c2m * rho0.rho + (1.0 - c2m) * sigma_band(symbol, d, 0).matrix
    for u in range(1, min(m - 1, _max_block(symbol, d)) + 1):
        pair = sigma_band(symbol, d, u).matrix + sigma_band(symbol, d, -u).matrix
        out = out + (c**u - c ** (2 * m - u)) * pair
    return OneBodyDensity(hermitian_part(out))


def b_of_m(symbol, alpha: float, d: int, m: int) -> np.ndarray:
    """Source ``B(m) = sigma^{(0)} + sum_{u=1}^{m} cos^u (sigma^{(u)} + sigma^{(-u)})``.

    One period maps ``rho_m`` to ``cos^2 rho_m + sin^2 B(m)``.
    """
    symbol = _symbol(symbol)
    if m < 0:
        raise InvalidArgument(f"m must be >= 0, got {m}")
    c = float(np.cos(alpha))
    out = np.array(sigma_band(symbol, d, 0).matrix)
    for u in range(1, min(m, _max_block(symbol, d)) + 1):
        out += c**u * (sigma_band(symbol, d, u).matrix + sigma_band(symbol, d, -u).matrix)
    return out


def one_body_limit(symbol, alpha: float, d: int) -> OneBodyDensity:
    """``lim_m B(m)``, truncated at the band edge or where ``|cos|^u max|sigma|`` < 1e-15.

    Raises
    ------
    InvalidArgument
        For ``alpha`` in ``{0, pi}`` (no relaxation).
    NumericFailure
        If the limit leaves ``0 <= rho <= 1``.
    """
    symbol = _symbol(symbol)
    c = float(np.cos(alpha))
    if abs(c) >= 1.0 - 1e-15:
        raise InvalidArgument("the limit needs |cos(alpha)| < 1")
    smax = max(abs(z) for z in symbol.coefficients)
    out = np.array(sigma_band(symbol, d, 0).matrix)
    for u in range(1, _max_block(symbol, d) + 1):
        if abs(c) ** u * smax < TRUNCATION_TOL:
            break
        out += c**u * (sigma_band(symbol, d, u).matrix + sigma_band(symbol, d, -u).matrix)
    out = hermitian_part(out)
    ev = np.linalg.eigvalsh(out)
    if ev[0] < -1e-10 or ev[-1] > 1 + 1e-10:
        raise NumericFailure(f"asymptotic one-body state has spectrum [{ev[0]:.3g}, {ev[-1]:.3g}]")
    return OneBodyDensity(out)


def two_body_at(symbol, rho1_0, rho2_0, alpha: float, m: int) -> TwoBodyDensity:
    """Two-body state at time ``m d`` for the shift sample.

    ``cos^{4m} rho2 + 2 sin^2 cos^{2m} P(rho1 x S_m)P + sin^4 P(S_m x S_m)P``
    with ``S_m`` from :func:`history_sum`.
    """
    symbol = _symbol(symbol)
    if m < 0:
        raise InvalidArgument(f"m must be >= 0, got {m}")
    rho1 = rho1_0 if isinstance(rho1_0, OneBodyDensity) else OneBodyDensity(np.asarray(rho1_0))
    d = rho1.d
    rho2 = rho2_0 if isinstance(rho2_0, TwoBodyDensity) else TwoBodyDensity(d, np.asarray(rho2_0))
    if rho2.d != d:
        raise InvalidArgument(f"rho1 has d={d} but rho2 has d={rho2.d}")
    if m == 0:
        return rho2
    c = float(np.cos(alpha))
    s2 = 1.0 - c * c
    S = history_sum(symbol, d, alpha, m)
    out = (
        c ** (4 * m) * rho2.rho2
        + 2.0 * s2 * c ** (2 * m) * antisymmetric_sandwich(rho1.rho, S)
        + s2 * s2 * antisymmetric_sandwich(S, S)
    )
    return TwoBodyDensity(d, hermitian_part(out))


def p_body_limit(symbol, alpha: float, d: int, p: int) -> np.ndarray:
    """Asymptotic ``p``-body matrix: the ``p x p`` minors of :func:`one_body_limit`."""
    if not 1 <= p <= d:
        raise InvalidArgument(f"p must lie in [1, {d}], got {p}")
    return gamma_on_wedge(one_body_limit(symbol, alpha, d).rho, p)


@dataclass(frozen=True)
class AsymptoticProfile:
    """Long-time site occupation and pair correlations of the shift sample.

    ``corr[j, k] = <n_j n_k>``; the diagonal holds ``<n_j^2> = <n_j>``.
    """

    density: float
    corr: np.ndarray
    mean_density_ratio: float
    profile: np.ndarray

    def to_dict(self) -> dict:
        return {
            "density": self.density,
            "corr": self.corr.tolist(),
            "mean_density_ratio": self.mean_density_ratio,
            "profile": self.profile.tolist(),
        }


def asymptotic_density_and_correlations(symbol, alpha: float, d: int) -> AsymptoticProfile:
    """Flat density ``<e0, rho_inf e0>`` and Wick pair correlations.

    ``<n_j n_k> = rho[j,j] rho[k,k] - |rho[j,k]|^2`` for ``j != k``; these
    depend on ``k - j`` only because the limit is Toeplitz.
    """
    rho = one_body_limit(symbol, alpha, d).rho
    prof = rho.diagonal().real.copy()
    corr = np.outer(prof, prof) - np.abs(rho) ** 2
    corr[np.diag_indices(d)] = prof
    # N_s / d tends to the same value for a flat profile
    return AsymptoticProfile(
        density=float(prof[0]),
        corr=corr,
        mean_density_ratio=float(prof.mean()),
        profile=prof,
    )


def _mask(combo, d: int) -> int:
    """Occupation-basis index of ``a*_{k1} ... a*_{kp} |0>``, site 0 most significant."""
    return sum(1 << (d - 1 - k) for k in combo)


def second_quantized(V, sectors=None) -> np.ndarray:
    """Dense ``Gamma(V)`` on the ``2^d`` occupation basis.

    On the ``p``-particle sector the matrix elements are ``det V[J, K]``.
    """
    V = np.asarray(V, dtype=complex)
    d = V.shape[0]
    G = np.zeros((2**d, 2**d), dtype=complex)
    for p in range(d + 1) if sectors is None else sectors:
        idx = _sector_indices(d, p)
        G[np.ix_(idx, idx)] = gamma_on_wedge(V, p)
    return G


def quasifree_full_state(rho1_inf) -> np.ndarray:
    """Gauge-invariant quasifree density matrix with one-body state ``rho1_inf``.

    Built as ``Gamma(V) (x_i diag(1 - l_i, l_i)) Gamma(V)^*`` from the
    eigen-decomposition ``rho = V diag(l) V^*``; eigenvalues ``0`` and ``1``
    simply give empty or filled eigenmodes.

    Raises
    ------
    ResourceLimit
        For ``d > MAX_FULL_STATE_D``.
    """
    rho = rho1_inf.rho if isinstance(rho1_inf, OneBodyDensity) else OneBodyDensity(np.asarray(rho1_inf)).rho
    d = rho.shape[0]
    if d > MAX_FULL_STATE_D:
        raise ResourceLimit(f"full state on 2^{d} dimensions exceeds the limit 2^{MAX_FULL_STATE_D}")
    lam, V = np.linalg.eigh(hermitian_part(rho))
    lam = np.clip(lam, 0.0, 1.0)
    diag = np.ones(1)
    for l in lam:
        diag = np.kron(diag, np.array([1.0 - l, l]))
    G = second_quantized(V)
    out = (G * diag) @ G.conj().T
    return hermitian_part(out)


def _sector_indices(d: int, p: int) -> np.ndarray:
    combos = wedge_basis(d, p).pairs if p > 0 else ((),)
    return np.array([_mask(c, d) for c in combos])


def sector_block(state: np.ndarray, p: int) -> np.ndarray:
    """Restriction of a ``2^d`` operator to the ``p``-particle sector in wedge order."""
    d = int(round(np.log2(state.shape[0])))
    idx = _sector_indices(d, p)
    return state[np.ix_(idx, idx)]
