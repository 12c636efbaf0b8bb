"""Physical inputs and the effective matrices driving the reduced dynamics.

Conventions
-----------
* The reservoir couples to the sample through site ``0`` of the canonical
  basis of ``C^d``.  Walk builders in :mod:`fermiwalk.walks` place the
  physically coupled site at index ``0``.
* One-body matrices use ``rho[j, k] = tr(rho a_k^* a_j)``; the reservoir
  density is ``Sigma[j, k] = sigma(k - j)`` in the same convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import SpectralReport, as_square, toeplitz_section
from .errors import InvalidArgument, InvalidSymbol

__all__ = [
    "CouplingParams",
    "ReservoirSymbol",
    "SymbolReport",
    "SampleUnitary",
    "EffectiveMatrices",
    "build_effective",
    "validate_symbol",
    "shift_matrix",
    "matrix_to_json",
    "matrix_from_json",
]

_SYMBOL_GRID = 4096


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


def matrix_to_json(A) -> list:
    """Nested lists of ``[re, im]`` pairs."""
    A = np.asarray(A, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in A]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[-1] != 2:
        raise InvalidArgument(f"matrix JSON must be rows of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def shift_matrix(d: int) -> np.ndarray:
    """Periodic shift ``S e_j = e_{j-1}``, ``S e_0 = e_{d-1}``."""
    if d < 1:
        raise InvalidArgument(f"d must be >= 1, got {d}")
    S = np.zeros((d, d), dtype=complex)
    for j in range(d):
        S[(j - 1) % d, j] = 1.0
    return S


@dataclass(frozen=True)
class CouplingParams:
    """Coupling angle and the coefficients of the closed form of the coupling.

    ``K = 1 + g (b^* a + b a^*) + f (n_r (1 - n_s) + (1 - n_r) n_s)`` with
    ``g = i sin(alpha)`` and ``f = cos(alpha) - 1``.
    """

    alpha: float
    cos_alpha: float = field(init=False)
    g_alpha: complex = field(init=False)
    f_alpha: float = field(init=False)

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a):
            raise InvalidArgument(f"alpha must be finite, got {self.alpha}")
        c = float(np.cos(a))
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "cos_alpha", c)
        object.__setattr__(self, "g_alpha", 1j * float(np.sin(a)))
        object.__setattr__(self, "f_alpha", c - 1.0)

    @property
    def sin2(self) -> float:
        return abs(self.g_alpha) ** 2

    def to_dict(self) -> dict:
        return {"alpha": self.alpha}

    @classmethod
    def from_dict(cls, data: dict) -> "CouplingParams":
        return cls(float(data["alpha"]))


@dataclass(frozen=True)
class ReservoirSymbol:
    """Two-point function ``sigma(k)`` of a translation invariant reservoir.

    Stored as ``coefficients = (sigma(0), sigma(1), ..., sigma(b))``; the
    negative offsets are ``sigma(-k) = conj(sigma(k))``.  A single
    coefficient is the uncorrelated reservoir ``Sigma = sigma * 1``.

    Use :meth:`uniform` or :meth:`banded` to construct.  Construction checks
    that the symbol ``sigma(0) + 2 Re sum_k sigma(k) e^{ik theta}`` stays in
    ``[0, 1]`` on a 4096 point grid; pass ``check=False`` to build a symbol
    that is only going to be inspected with :func:`validate_symbol`.
    """

    coefficients: tuple[complex, ...]
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coefficients", coeffs)
        if not coeffs:
            raise InvalidArgument("reservoir symbol needs sigma(0)")
        s0 = coeffs[0]
        if not np.all(np.isfinite(coeffs)):
            raise InvalidArgument("symbol coefficients must be finite")
        if abs(s0.imag) > 0:
            raise InvalidSymbol(f"sigma(0) must be real, got {s0}")
        if self.check:
            if self.is_uniform:
                if not 0.0 < s0.real <= 1.0:
                    raise InvalidSymbol(f"uniform density must lie in (0, 1], got {s0.real}")
            else:
                if s0.real <= 0:
                    raise InvalidSymbol(f"sigma(0) must be positive, got {s0.real}")
                lo, hi = self.symbol_range()
                if lo < -1e-12 or hi > 1 + 1e-12:
                    raise InvalidSymbol(f"symbol range [{lo:.6g}, {hi:.6g}] leaves [0, 1]")

    @classmethod
    def uniform(cls, sigma: float, check: bool = True) -> "ReservoirSymbol":
        return cls((float(sigma),), check=check)

    @classmethod
    def banded(cls, coeffs: Sequence[complex], check: bool = True) -> "ReservoirSymbol":
        return cls(tuple(coeffs), check=check)

    @property
    def is_uniform(self) -> bool:
        return len(self.coefficients) == 1

    @property
    def band(self) -> int:
        return len(self.coefficients) - 1

    @property
    def sigma0(self) -> float:
        return self.coefficients[0].real

    def __call__(self, k: int) -> complex:
        k = int(k)
        if abs(k) > self.band:
            return 0j
        c = self.coefficients[abs(k)]
        return c if k >= 0 else c.conjugate()

    def values(self, theta) -> np.ndarray:
        """Symbol ``sum_k sigma(k) e^{i k theta}`` (real by conjugate symmetry)."""
        theta = np.asarray(theta, dtype=float)
        out = np.full(theta.shape, self.sigma0)
        for k in range(1, self.band + 1):
            out = out + 2.0 * np.real(self.coefficients[k] * np.exp(1j * k * theta))
        return out

    def symbol_range(self, n: int = _SYMBOL_GRID) -> tuple[float, float]:
        v = self.values(np.linspace(0.0, 2.0 * np.pi, n, endpoint=False))
        return float(v.min()), float(v.max())

    def toeplitz(self, R: int) -> np.ndarray:
        return toeplitz_section(self.coefficients, R)

    def to_dict(self) -> dict:
        if self.is_uniform:
            return {"uniform": self.sigma0}
        return {"band": [[c.real, c.imag] for c in self.coefficients]}

    @classmethod
    def from_dict(cls, data) -> "ReservoirSymbol":
        if isinstance(data, (int, float)):
            return cls.uniform(float(data))
        if "uniform" in data:
            return cls.uniform(float(data["uniform"]))
        if "band" in data:
            coeffs = []
            for c in data["band"]:
                coeffs.append(complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c))
            return cls.banded(coeffs)
        raise InvalidArgument(f"unrecognised reservoir description: {data!r}")


@dataclass(frozen=True)
class SymbolReport:
    """Result of :func:`validate_symbol`."""

    eigenvalues: tuple[float, ...]
    min_eigenvalue: float
    max_eigenvalue: float
    symbol_min: float
    symbol_max: float
    valid: bool


def validate_symbol(symbol: ReservoirSymbol, R: int, tol: float = 1e-12) -> SymbolReport:
    """Check ``0 <= Sigma <= 1`` on the ``R x R`` section and on the symbol.

    Never raises on an invalid density; the verdict is in ``valid``.
    """
    if R < max(1, symbol.band):
        raise InvalidArgument(f"R={R} is smaller than the band {symbol.band}")
    S = np.zeros((R, R), dtype=complex)
    for j in range(R):
        for k in range(R):
            S[j, k] = symbol(k - j)
    ev = np.linalg.eigvalsh(S)
    lo, hi = symbol.symbol_range()
    ok = ev[0] >= -tol and ev[-1] <= 1 + tol and lo >= -tol and hi <= 1 + tol
    return SymbolReport(
        eigenvalues=tuple(float(x) for x in ev),
        min_eigenvalue=float(ev[0]),
        max_eigenvalue=float(ev[-1]),
        symbol_min=lo,
        symbol_max=hi,
        valid=bool(ok),
    )


@dataclass(frozen=True)
class SampleUnitary:
    """One-particle, one-step dynamics ``W`` of the sample."""

    W: np.ndarray
    tol: float = field(default=1e-12, compare=False, repr=False)

    def __post_init__(self):
        W = as_square(self.W, "W")
        if W.shape[0] < 2:
            raise InvalidArgument("sample needs d >= 2")
        err = np.abs(W.conj().T @ W - np.eye(W.shape[0])).max()
        if err > self.tol:
            raise InvalidArgument(f"W is not unitary: max |W*W - 1| = {err:.3g}")
        object.__setattr__(self, "W", _frozen(W))

    @property
    def d(self) -> int:
        return self.W.shape[0]

    @classmethod
    def shift(cls, d: int) -> "SampleUnitary":
        return cls(shift_matrix(d))

    def to_dict(self) -> dict:
        return {"matrix": matrix_to_json(self.W)}

    @classmethod
    def from_dict(cls, data: dict) -> "SampleUnitary":
        return cls(matrix_from_json(data["matrix"]))


@dataclass(frozen=True)
class EffectiveMatrices:
    """``M = W K``, ``B = W E W^*`` and ``N = W P_perp`` for a given walk.

    ``K = 1 + (cos(alpha) - 1)|e0><e0|`` and
    ``E = sigma sin(alpha)^2 |e0><e0|``.
    """

    M: np.ndarray
    B: np.ndarray
    N: np.ndarray
    K_diag: np.ndarray
    E: np.ndarray
    sigma: float
    W: np.ndarray
    coupling: CouplingParams

    @property
    def d(self) -> int:
        return self.M.shape[0]

    @property
    def We0(self) -> np.ndarray:
        """Image of the coupled site; ``B = sigma sin^2(alpha) |We0><We0|``."""
        return self.W[:, 0]

    def identity_residual(self) -> float:
        """``max |M M^* + B / sigma - 1|``."""
        d = self.d
        return float(np.abs(self.M @ self.M.conj().T + self.B / self.sigma - np.eye(d)).max())


def build_effective(W, coupling, sigma) -> EffectiveMatrices:
    """Effective matrices for an uncorrelated reservoir of density ``sigma``.

    Parameters
    ----------
    W : SampleUnitary or array_like
    coupling : CouplingParams or float
        A bare float is read as the coupling angle.
    sigma : float or ReservoirSymbol
        Only uniform symbols are accepted; the reduced recursions are not
        available for correlated reservoirs with a general ``W``.
    """
    if not isinstance(W, SampleUnitary):
        W = SampleUnitary(np.asarray(W))
    if not isinstance(coupling, CouplingParams):
        coupling = CouplingParams(float(coupling))
    if isinstance(sigma, ReservoirSymbol):
        if not sigma.is_uniform:
            raise InvalidArgument(
                "general-W recursions need an uncorrelated reservoir; got a banded symbol"
            )
        sigma = sigma.sigma0
    sigma = float(sigma)
    if not 0.0 < sigma <= 1.0:
        raise InvalidArgument(f"sigma must lie in (0, 1], got {sigma}")
    d = W.d
    Wm = W.W
    P0 = np.zeros((d, d), dtype=complex)
    P0[0, 0] = 1.0
    K = np.eye(d, dtype=complex) + coupling.f_alpha * P0
    E = sigma * coupling.sin2 * P0
    we0 = Wm[:, 0]
    B = sigma * coupling.sin2 * np.outer(we0, we0.conj())
    return EffectiveMatrices(
        M=_frozen(Wm @ K),
        B=_frozen(B),
        N=_frozen(Wm @ (np.eye(d) - P0)),
        K_diag=_frozen(K),
        E=_frozen(E),
        sigma=sigma,
        W=Wm,
        coupling=coupling,
    )
