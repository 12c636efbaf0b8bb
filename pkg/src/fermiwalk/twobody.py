"""Two-body reduced density matrix on the wedge space ``C^d ^ C^d``.

The two-body state is advanced jointly with the one-body state:

    rho2_{t+1} = G rho2_t G^* + 2 P (B x N rho1_t N^*) P,    G = P M^{x2} P,

where ``P`` is the antisymmetric projection.  Its fixed point under the
spectral condition is ``sigma^2 * 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import onebody
from .core import (
    antisymmetric_sandwich,
    as_square,
    gamma_on_wedge,
    hermitian_part,
    opnorm,
    spectral_report,
    wedge_basis,
)
from .errors import InvalidArgument, NumericFailure, PreconditionViolation
from .model import EffectiveMatrices
from .onebody import OneBodyDensity

__all__ = [
    "TwoBodyDensity",
    "PairTrace",
    "step2",
    "evolve_pair",
    "closed_form_pair",
    "fixed_point2",
    "check_identity_2body",
    "number_correlations",
    "MAX_DIRECT_D",
]

HERM_TOL = 1e-12
EIG_TOL = 1e-10
# Largest d for which the fixed point is found by a dense D2^2 solve.
MAX_DIRECT_D = 10


@dataclass(frozen=True)
class TwoBodyDensity:
    """Hermitian PSD matrix on the two-particle wedge space with norm <= 1.

    Entry ``(J, K)`` for pairs ``J = (j1, j2)``, ``K = (k1, k2)`` is
    ``tr(rho a_{k1}^* a_{k2}^* a_{j2} a_{j1})``.
    """

    d: int
    rho2: np.ndarray
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        rho2 = as_square(self.rho2, "rho2")
        basis = wedge_basis(self.d, 2)
        if rho2.shape[0] != basis.dim:
            raise InvalidArgument(f"expected {basis.dim}x{basis.dim} wedge matrix for d={self.d}")
        if self.check:
            herm = np.abs(rho2 - rho2.conj().T).max()
            if herm > HERM_TOL:
                raise InvalidArgument(f"two-body matrix not Hermitian (deviation {herm:.3g})")
            ev = np.linalg.eigvalsh(hermitian_part(rho2))
            if ev[0] < -EIG_TOL or ev[-1] > 1 + EIG_TOL:
                raise InvalidArgument(f"two-body spectrum [{ev[0]:.3g}, {ev[-1]:.3g}] invalid")
        rho2 = np.array(rho2)
        rho2.setflags(write=False)
        object.__setattr__(self, "rho2", rho2)

    @property
    def basis(self):
        return wedge_basis(self.d, 2)

    @classmethod
    def vacuum(cls, d: int) -> "TwoBodyDensity":
        n = wedge_basis(d, 2).dim
        return cls(d, np.zeros((n, n), dtype=complex))


@dataclass
class PairTrace:
    times: list[int]
    rho1: list[OneBodyDensity]
    rho2: list[TwoBodyDensity]


def _as_two(rho2, d) -> TwoBodyDensity:
    return rho2 if isinstance(rho2, TwoBodyDensity) else TwoBodyDensity(d, np.asarray(rho2))


def _as_one(rho1) -> OneBodyDensity:
    return rho1 if isinstance(rho1, OneBodyDensity) else OneBodyDensity(np.asarray(rho1))


def step2(rho2, rho1, eff: EffectiveMatrices, G: np.ndarray | None = None) -> TwoBodyDensity:
    """Advance the two-body state by one step.

    ``rho1`` must be the one-body state at the same time as ``rho2``.
    ``G`` may carry a precomputed ``gamma_on_wedge(M, 2)``.
    """
    d = eff.d
    rho1 = _as_one(rho1)
    rho2 = _as_two(rho2, d)
    if rho1.d != d or rho2.d != d:
        raise InvalidArgument(f"dimension mismatch: walk d={d}, rho1 d={rho1.d}, rho2 d={rho2.d}")
    if G is None:
        G = gamma_on_wedge(eff.M, 2)
    src = eff.N @ rho1.rho @ eff.N.conj().T
    out = G @ rho2.rho2 @ G.conj().T + 2.0 * antisymmetric_sandwich(eff.B, src)
    drift = np.abs(out - out.conj().T).max()
    if drift > HERM_TOL:
        raise NumericFailure(f"Hermiticity drift {drift:.3g} in two-body step")
    out = hermitian_part(out)
    ev = np.linalg.eigvalsh(out)
    if ev[0] < -EIG_TOL or ev[-1] > 1 + EIG_TOL:
        raise NumericFailure(f"two-body step produced spectrum [{ev[0]:.3g}, {ev[-1]:.3g}]")
    return TwoBodyDensity(d, out, check=False)


def evolve_pair(rho1_0, rho2_0, eff: EffectiveMatrices, t: int, record_every: int = 1) -> PairTrace:
    """Joint iteration of the one- and two-body recursions."""
    if t < 0:
        raise InvalidArgument(f"t must be >= 0, got {t}")
    d = eff.d
    r1, r2 = _as_one(rho1_0), _as_two(rho2_0, d)
    G = gamma_on_wedge(eff.M, 2)
    trace = PairTrace([0], [r1], [r2])
    for n in range(1, t + 1):
        # rho2 consumes rho1 at the old time
        r1, r2 = onebody.step(r1, eff), step2(r2, r1, eff, G)
        if n % record_every == 0 or n == t:
            trace.times.append(n)
            trace.rho1.append(r1)
            trace.rho2.append(r2)
    return trace


def closed_form_pair(rho1_0, rho2_0, eff: EffectiveMatrices, t: int) -> np.ndarray:
    """Two-body state at ``t`` from the explicit history sum.

    ``G^t rho2_0 G^{*t} + sum_{r<t} G^r [2 P(B x N rho1_{t-1-r} N^*)P] G^{*r}``
    with the one-body history taken from :func:`onebody.closed_form`.
    """
    d = eff.d
    rho2_0 = _as_two(rho2_0, d).rho2
    G = gamma_on_wedge(eff.M, 2)
    n = G.shape[0]
    Gr = np.eye(n, dtype=complex)
    acc = np.zeros((n, n), dtype=complex)
    for r in range(t):
        rho1 = onebody.closed_form(rho1_0, eff, t - 1 - r)
        src = 2.0 * antisymmetric_sandwich(eff.B, eff.N @ rho1 @ eff.N.conj().T)
        acc += Gr @ src @ Gr.conj().T
        Gr = G @ Gr
    return Gr @ rho2_0 @ Gr.conj().T + acc


def fixed_point2(eff: EffectiveMatrices, tol: float = 1e-14, max_iter: int = 1_000_000) -> TwoBodyDensity:
    """Solution of ``X = G X G^* + 2 sigma P(B x N N^*)P``.

    Dense solve for ``d <= MAX_DIRECT_D``, plain iteration beyond.

    Raises
    ------
    PreconditionViolation
        If ``M`` fails the spectral condition.
    """
    rep = spectral_report(eff.M)
    if not rep.condition_ok:
        raise PreconditionViolation(
            f"spectral condition fails for M; eigenvalues near the unit circle: {rep.offending()}"
        )
    d = eff.d
    G = gamma_on_wedge(eff.M, 2)
    src = 2.0 * eff.sigma * antisymmetric_sandwich(eff.B, eff.N @ eff.N.conj().T)
    n = G.shape[0]
    if d <= MAX_DIRECT_D:
        L = np.eye(n * n) - np.kron(G, G.conj())
        X = np.linalg.solve(L, src.reshape(-1)).reshape(n, n)
    else:
        X = np.zeros_like(src)
        for _ in range(max_iter):
            X_new = G @ X @ G.conj().T + src
            if np.abs(X_new - X).max() < tol:
                X = X_new
                break
            X = X_new
        else:
            raise NumericFailure(f"two-body fixed point iteration did not converge in {max_iter} steps")
    return TwoBodyDensity(d, hermitian_part(X))


def check_identity_2body(eff: EffectiveMatrices) -> float:
    """Operator norm of ``1 - G G^* - (2/sigma) P(B x N N^*)P`` on the wedge space."""
    G = gamma_on_wedge(eff.M, 2)
    lhs = np.eye(G.shape[0])
    rhs = G @ G.conj().T + (2.0 / eff.sigma) * antisymmetric_sandwich(eff.B, eff.N @ eff.N.conj().T)
    return opnorm(lhs - rhs)


def number_correlations(rho2) -> np.ndarray:
    """``<n_j n_k>`` for ``j != k`` from the diagonal of the wedge matrix.

    Returns a symmetric ``d x d`` real array with zero diagonal.
    """
    if not isinstance(rho2, TwoBodyDensity):
        raise InvalidArgument("number_correlations needs a TwoBodyDensity")
    d = rho2.d
    out = np.zeros((d, d))
    for i, (j, k) in enumerate(rho2.basis.pairs):
        out[j, k] = out[k, j] = rho2.rho2[i, i].real
    return out
