"""One-body reduced density matrix of the sample for an uncorrelated reservoir.

The reduced state obeys the affine recursion ``rho -> M rho M^* + B`` with the
matrices of :class:`fermiwalk.model.EffectiveMatrices`.  Under the spectral
condition on ``M`` the unique fixed point is ``sigma * 1``, whatever the walk
and the coupling strength.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import as_square, hermitian_part, opnorm, spectral_report
from .errors import InvalidArgument, NumericFailure, PreconditionViolation
from .model import EffectiveMatrices, build_effective

__all__ = [
    "OneBodyDensity",
    "EvolutionTrace",
    "step",
    "evolve",
    "closed_form",
    "fixed_point",
    "stagnant_limit_demo",
    "fit_decay_rate",
]

HERM_TOL = 1e-12
EIG_TOL = 1e-10


@dataclass(frozen=True)
class OneBodyDensity:
    """Hermitian ``d x d`` matrix with spectrum in ``[0, 1]``.

    Entries are ``rho[j, k] = tr(rho a_k^* a_j)``.
    """

    rho: np.ndarray
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        rho = as_square(self.rho, "rho")
        if self.check:
            herm = np.abs(rho - rho.conj().T).max() if rho.size else 0.0
            if herm > HERM_TOL:
                raise InvalidArgument(f"one-body matrix not Hermitian (deviation {herm:.3g})")
            ev = np.linalg.eigvalsh(hermitian_part(rho))
            if ev[0] < -EIG_TOL or ev[-1] > 1 + EIG_TOL:
                raise InvalidArgument(
                    f"one-body spectrum [{ev[0]:.3g}, {ev[-1]:.3g}] leaves [0, 1]"
                )
        rho = np.array(rho)
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def d(self) -> int:
        return self.rho.shape[0]

    @classmethod
    def vacuum(cls, d: int) -> "OneBodyDensity":
        return cls(np.zeros((d, d), dtype=complex))

    def density(self) -> np.ndarray:
        """Site occupations ``<n_j>``."""
        return self.rho.diagonal().real.copy()


@dataclass
class EvolutionTrace:
    times: list[int]
    snapshots: list[OneBodyDensity]
    distances_to_limit: list[float]

    @property
    def final(self) -> OneBodyDensity:
        return self.snapshots[-1]


def _as_density(rho) -> OneBodyDensity:
    return rho if isinstance(rho, OneBodyDensity) else OneBodyDensity(np.asarray(rho))


def step(rho, eff: EffectiveMatrices) -> OneBodyDensity:
    """One time step ``M rho M^* + B``.

    Raises
    ------
    NumericFailure
        If Hermiticity drifts by more than ``1e-12`` before symmetrisation,
        or the output leaves the order interval ``0 <= rho <= 1``.
    """
    rho = _as_density(rho)
    if rho.d != eff.d:
        raise InvalidArgument(f"dimension mismatch: rho is {rho.d}, walk is {eff.d}")
    out = eff.M @ rho.rho @ eff.M.conj().T + eff.B
    drift = np.abs(out - out.conj().T).max()
    if drift > HERM_TOL:
        raise NumericFailure(f"Hermiticity drift {drift:.3g} in one-body step")
    out = hermitian_part(out)
    ev = np.linalg.eigvalsh(out)
    if ev[0] < -EIG_TOL or ev[-1] > 1 + EIG_TOL:
        raise NumericFailure(f"one-body step left [0, 1]: spectrum [{ev[0]:.3g}, {ev[-1]:.3g}]")
    return OneBodyDensity(out, check=False)


def evolve(rho0, eff: EffectiveMatrices, t: int, record_every: int = 1) -> EvolutionTrace:
    """Iterate :func:`step` ``t`` times, keeping every ``record_every``-th state.

    The state at ``t`` is always recorded.  Distances are operator norms of
    ``rho_t - sigma * 1``.
    """
    if t < 0:
        raise InvalidArgument(f"t must be >= 0, got {t}")
    if record_every < 1:
        raise InvalidArgument(f"record_every must be >= 1, got {record_every}")
    rho = _as_density(rho0)
    target = eff.sigma * np.eye(eff.d)
    times, snaps, dist = [0], [rho], [opnorm(rho.rho - target)]
    for n in range(1, t + 1):
        rho = step(rho, eff)
        if n % record_every == 0 or n == t:
            times.append(n)
            snaps.append(rho)
            dist.append(opnorm(rho.rho - target))
    return EvolutionTrace(times, snaps, dist)


def closed_form(rho0, eff: EffectiveMatrices, t: int) -> np.ndarray:
    """``M^t rho0 M^{*t} + sum_{r<t} M^r B M^{*r}`` evaluated as a sum."""
    rho0 = _as_density(rho0).rho
    d = eff.d
    Mt = np.eye(d, dtype=complex)
    acc = np.zeros((d, d), dtype=complex)
    for _ in range(t):
        acc += Mt @ eff.B @ Mt.conj().T
        Mt = eff.M @ Mt
    return Mt @ rho0 @ Mt.conj().T + acc


def fixed_point(eff: EffectiveMatrices) -> OneBodyDensity:
    """Unique solution of ``X = M X M^* + B``.

    Solved as a ``d^2``-dimensional linear system.

    Raises
    ------
    PreconditionViolation
        If ``M`` has spectrum on (or within ``1e-9`` of) the unit circle.
    """
    rep = spectral_report(eff.M)
    if not rep.condition_ok:
        raise PreconditionViolation(
            f"spectral condition fails for M; eigenvalues near the unit circle: {rep.offending()}"
        )
    d = eff.d
    L = np.eye(d * d) - np.kron(eff.M, eff.M.conj())
    X = np.linalg.solve(L, eff.B.reshape(-1)).reshape(d, d)
    return OneBodyDensity(hermitian_part(X))


def stagnant_limit_demo(rho0, alpha: float, sigma: float, t: int):
    """Frozen sample (``W = 1``): analytic limit next to the ``t``-step iterate.

    Without sample dynamics only site ``0`` relaxes, so the limit
    ``sigma |e0><e0| + P rho0 P`` (``P`` projecting away from site ``0``)
    remembers the initial state.

    Returns
    -------
    limit, iterate : OneBodyDensity
    """
    c = float(np.cos(alpha))
    if abs(abs(c) - 1.0) < 1e-15:
        raise InvalidArgument("alpha in {0, pi} gives no coupling to relax site 0")
    rho0 = _as_density(rho0)
    d = rho0.d
    P = np.eye(d)
    P[0, 0] = 0.0
    limit = P @ rho0.rho @ P
    limit[0, 0] += sigma
    eff = build_effective(np.eye(d), alpha, sigma)
    iterate = evolve(rho0, eff, t, record_every=max(t, 1)).final
    return OneBodyDensity(limit), iterate


def fit_decay_rate(times, distances, floor: float = 1e-13, tail: float = 0.5) -> float:
    """Per-step contraction factor from a log-linear fit of the distance tail.

    Uses the last ``tail`` fraction of the points whose distance exceeds
    ``floor``; returns ``exp(slope)``.  Returns ``nan`` with fewer than three
    usable points.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(distances, dtype=float)
    keep = y > floor
    t, y = t[keep], y[keep]
    if t.size < 3:
        return float("nan")
    start = int(np.floor((1.0 - tail) * t.size))
    t, y = t[start:], y[start:]
    if t.size < 3:
        return float("nan")
    slope = np.polyfit(t, np.log(y), 1)[0]
    return float(np.exp(slope))
