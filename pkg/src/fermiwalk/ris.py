"""Repeated interactions: shift sample coupled to an uncorrelated reservoir.

Every result here assumes ``W = S`` (the periodic shift) and ``Sigma = sigma * 1``.
Functions that accept a walk reject anything else, since the formulas are
specific to the shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .core import wedge_basis, wedge_embed
from .errors import InvalidArgument
from .model import shift_matrix

__all__ = [
    "NumberDistribution",
    "FluxRecord",
    "p_body_at",
    "number_expectation",
    "number_distribution",
    "flux_expectation",
    "flux_series",
    "gibbs_limit",
    "require_shift",
]


def require_shift(W, d: int) -> None:
    """Raise unless ``W`` is ``None`` or the ``d``-site periodic shift."""
    if W is None:
        return
    W = np.asarray(W)
    if W.shape != (d, d) or not np.allclose(W, shift_matrix(d), atol=1e-14, rtol=0):
        raise InvalidArgument("repeated-interaction formulas hold only for the periodic shift sample")


def _check_sigma(sigma: float) -> float:
    sigma = float(sigma)
    if not 0.0 <= sigma <= 1.0:
        raise InvalidArgument(f"sigma must lie in [0, 1], got {sigma}")
    return sigma


@dataclass(frozen=True)
class NumberDistribution:
    """Binomial law ``B(d, q)`` of the sample particle number."""

    d: int
    q: float
    pmf: tuple[float, ...]

    @property
    def mean(self) -> float:
        return self.d * self.q

    def to_dict(self) -> dict:
        return {"d": self.d, "q": self.q, "pmf": list(self.pmf)}


@dataclass(frozen=True)
class FluxRecord:
    """Expected reservoir particle change in step ``t`` and its running sum.

    ``cumulative`` sums ``expectation(j)`` over ``j < t``.  ``balance`` is the
    same quantity from particle number conservation, ``<N_s>_0 - <N_s>_t``.
    ``closed_form`` is ``(<N_s>_0 - sigma d)(1 - cos^{2m})`` when ``t = m d``
    and ``None`` otherwise.
    """

    t: int
    expectation: float
    cumulative: float
    balance: float
    closed_form: float | None = None


def p_body_at(m: int, p: int, initial_reduced, sigma: float, alpha: float, d: int, W=None) -> np.ndarray:
    """``p``-body state at time ``m d`` as a binomial mixture.

    ``sum_k C(p,k) (1 - c^{2m})^{p-k} c^{2mk} sigma^{p-k} P(rho^{(k)} x 1 x ... x 1)P``
    with ``c = cos(alpha)``.

    Parameters
    ----------
    initial_reduced : sequence
        ``rho^{(k)}`` for ``k = 0 .. p`` as wedge-space matrices;
        ``rho^{(0)}`` is the scalar ``1`` (a ``1 x 1`` array or a number).
    """
    require_shift(W, d)
    sigma = _check_sigma(sigma)
    if not 1 <= p <= d:
        raise InvalidArgument(f"p must lie in [1, {d}], got {p}")
    if m < 0:
        raise InvalidArgument(f"m must be >= 0, got {m}")
    if len(initial_reduced) < p + 1:
        raise InvalidArgument(f"need initial reduced matrices for k = 0..{p}, got {len(initial_reduced)}")
    c2m = float(np.cos(alpha)) ** (2 * m)
    out = np.zeros((wedge_basis(d, p).dim,) * 2, dtype=complex)
    for k in range(p + 1):
        coef = comb(p, k) * (1.0 - c2m) ** (p - k) * c2m**k * sigma ** (p - k)
        if coef == 0.0:
            continue
        X = np.atleast_2d(np.asarray(initial_reduced[k], dtype=complex))
        out += coef * wedge_embed(X, k, p, d)
    return 0.5 * (out + out.conj().T)


def number_expectation(j: int, t: int, sigma: float, alpha: float, d: int, n0) -> float:
    """``<n_j>`` at time ``t = m d + r`` from initial occupations ``n0``.

    The shift brings site ``j + r`` to ``j``; when that wraps past site ``0``
    the occupation has met the reservoir once more.
    """
    if not 0 <= j < d:
        raise InvalidArgument(f"site {j} outside 0..{d - 1}")
    if t < 0:
        raise InvalidArgument(f"t must be >= 0, got {t}")
    sigma = _check_sigma(sigma)
    n0 = np.asarray(n0, dtype=float)
    if n0.shape != (d,):
        raise InvalidArgument(f"need {d} initial occupations, got shape {n0.shape}")
    m, r = divmod(t, d)
    c2 = float(np.cos(alpha)) ** 2
    if j + r <= d - 1:
        w = c2**m
        return float(w * n0[j + r] + (1.0 - w) * sigma)
    w = c2 ** (m + 1)
    return float(w * n0[j + r - d] + (1.0 - w) * sigma)


def number_distribution(m: int, sigma: float, alpha: float, d: int) -> NumberDistribution:
    """Law of ``N_s`` at time ``m d`` from the empty sample: ``B(d, (1 - c^{2m}) sigma)``."""
    if m < 0:
        raise InvalidArgument(f"m must be >= 0, got {m}")
    sigma = _check_sigma(sigma)
    q = (1.0 - float(np.cos(alpha)) ** (2 * m)) * sigma
    pmf = tuple(comb(d, p) * q**p * (1.0 - q) ** (d - p) for p in range(d + 1))
    return NumberDistribution(d, q, pmf)


def _flux_at(t: int, sigma: float, alpha: float, d: int, n0: np.ndarray) -> float:
    m, u = divmod(t, d)
    return float(np.sin(alpha) ** 2 * np.cos(alpha) ** (2 * m) * (n0[u] - sigma))


def flux_expectation(t: int, sigma: float, alpha: float, d: int, n0) -> FluxRecord:
    """Expected one-step change of the reservoir particle number at step ``t``.

    ``sin^2 cos^{2m} (<n_u>_0 - sigma)`` for ``t = m d + u``.  Negative
    values mean particles flow into the sample.
    """
    if t < 0:
        raise InvalidArgument(f"t must be >= 0, got {t}")
    sigma = _check_sigma(sigma)
    n0 = np.asarray(n0, dtype=float)
    if n0.shape != (d,):
        raise InvalidArgument(f"need {d} initial occupations, got shape {n0.shape}")
    cum = 0.0
    for j in range(t):
        cum += _flux_at(j, sigma, alpha, d, n0)
    N_t = sum(number_expectation(j, t, sigma, alpha, d, n0) for j in range(d))
    N0 = float(n0.sum())
    closed = None
    if t % d == 0:
        closed = (N0 - sigma * d) * (1.0 - float(np.cos(alpha)) ** (2 * (t // d)))
    return FluxRecord(
        t=t,
        expectation=_flux_at(t, sigma, alpha, d, n0),
        cumulative=cum,
        balance=N0 - N_t,
        closed_form=closed,
    )


def flux_series(t_max: int, sigma: float, alpha: float, d: int, n0) -> list[FluxRecord]:
    """:func:`flux_expectation` for ``t = 0 .. t_max``."""
    return [flux_expectation(t, sigma, alpha, d, n0) for t in range(t_max + 1)]


def gibbs_limit(sigma: float, d: int) -> np.ndarray:
    """Asymptotic sample state ``exp(-mu N_s) / Z``, ``mu = ln((1 - sigma)/sigma)``.

    Diagonal in the occupation basis with weight ``sigma^N (1 - sigma)^{d - N}``
    for a pattern with ``N`` particles.  ``sigma = 0`` and ``sigma = 1`` give
    the vacuum and full-filling projectors exactly.
    """
    sigma = _check_sigma(sigma)
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    N = np.array([bin(i).count("1") for i in range(2**d)])
    if sigma == 0.0:
        w = (N == 0).astype(float)
    elif sigma == 1.0:
        w = (N == d).astype(float)
    else:
        w = sigma**N * (1.0 - sigma) ** (d - N)
    return np.diag(w).astype(complex)
