"""Dense linear algebra on the sample space and its antisymmetric powers.

Matrices are plain complex ``numpy.ndarray`` objects.  The ``p``-fold
antisymmetric power of ``C^d`` is indexed by increasing ``p``-tuples of sites in
lexicographic order; :func:`wedge_basis` fixes that order once for every module.
With the normalisation ``u1 ^ ... ^ up = (p!)^{-1/2} sum_pi eps_pi u_pi(1) x ...``
the matrix elements of ``A^{x p}`` restricted to the wedge space are the
``p x p`` minors of ``A``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import InvalidArgument, InvalidSymbol, NumericFailure

__all__ = [
    "TOL_SPEC",
    "WedgeBasis",
    "wedge_basis",
    "antisymmetric_sandwich",
    "gamma_on_wedge",
    "wedge_embed",
    "SpectralReport",
    "spectral_report",
    "toeplitz_section",
    "opnorm",
    "hermitian_part",
    "as_square",
]

#: Margin below the unit circle required by :func:`spectral_report`.
TOL_SPEC = 1e-9

# Upper bound on the number of minors evaluated per batched determinant call.
_DET_CHUNK = 200_000


@dataclass(frozen=True)
class WedgeBasis:
    """Lexicographically ordered basis of the ``p``-th antisymmetric power.

    Attributes
    ----------
    d : int
        One-particle dimension.
    p : int
        Number of particles.
    pairs : tuple of tuple of int
        Strictly increasing index tuples; position in this tuple is the
        basis index.  Named ``pairs`` because ``p = 2`` is by far the most
        common case.
    """

    d: int
    p: int
    pairs: tuple[tuple[int, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.pairs)

    def index(self, combo) -> int:
        """Position of an increasing tuple of sites in the basis."""
        return _index_map(self.d, self.p)[tuple(combo)]

    def __len__(self) -> int:
        return len(self.pairs)


@lru_cache(maxsize=None)
def wedge_basis(d: int, p: int = 2) -> WedgeBasis:
    if d < 1 or not 0 <= p <= d:
        raise InvalidArgument(f"need 0 <= p <= d with d >= 1, got d={d}, p={p}")
    return WedgeBasis(d, p, tuple(itertools.combinations(range(d), p)))


@lru_cache(maxsize=None)
def _index_map(d: int, p: int) -> dict:
    return {c: i for i, c in enumerate(wedge_basis(d, p).pairs)}


@lru_cache(maxsize=None)
def _combo_array(d: int, p: int) -> np.ndarray:
    pairs = wedge_basis(d, p).pairs
    return np.array(pairs, dtype=np.intp).reshape(len(pairs), p)


def as_square(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite complex square array or raise."""
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgument(f"{name} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument(f"{name} has non-finite entries")
    return A


def opnorm(A) -> float:
    """Operator (spectral) norm."""
    A = np.asarray(A)
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermitian_part(A) -> np.ndarray:
    A = np.asarray(A)
    return 0.5 * (A + A.conj().T)


def antisymmetric_sandwich(A, B) -> np.ndarray:
    """Matrix of ``P (A x B) P`` on the two-particle wedge space.

    ``P`` is the antisymmetric projection.  The result is symmetric under
    exchanging ``A`` and ``B`` and reduces to the identity for ``A = B = 1``.
    """
    A = as_square(A, "A")
    B = as_square(B, "B")
    d = A.shape[0]
    if B.shape[0] != d:
        raise InvalidArgument(f"dimension mismatch: {A.shape} vs {B.shape}")
    if d < 2:
        raise InvalidArgument("two-particle space needs d >= 2")
    c = _combo_array(d, 2)
    j1, j2 = c[:, 0][:, None], c[:, 1][:, None]
    k1, k2 = c[:, 0][None, :], c[:, 1][None, :]
    C = (
        A[j1, k1] * B[j2, k2]
        - A[j2, k1] * B[j1, k2]
        + A[j2, k2] * B[j1, k1]
        - A[j1, k2] * B[j2, k1]
    )
    return 0.5 * C


def gamma_on_wedge(A, p: int) -> np.ndarray:
    """Restriction of ``A^{x p}`` to the ``p``-particle wedge space.

    Entry ``(J, K)`` is ``det A[J, K]`` for increasing tuples ``J, K``.
    ``p = 0`` gives the ``1 x 1`` identity.
    """
    A = as_square(A, "A")
    d = A.shape[0]
    if not 1 <= p <= d and p != 0:
        raise InvalidArgument(f"p must lie in [1, {d}], got {p}")
    if p == 0:
        return np.ones((1, 1), dtype=complex)
    if p == 1:
        return A.copy()
    c = _combo_array(d, p)
    n = len(c)
    out = np.empty((n, n), dtype=complex)
    rows_per_chunk = max(1, _DET_CHUNK // n)
    for start in range(0, n, rows_per_chunk):
        rows = c[start : start + rows_per_chunk]
        sub = A[rows[:, None, :, None], c[None, :, None, :]]
        out[start : start + len(rows)] = np.linalg.det(sub)
    return out


def _merge_sign(sub: tuple, full: tuple) -> int:
    """Sign of the permutation taking ``full`` to ``sub + (full \\ sub)``."""
    rest = [x for x in full if x not in sub]
    order = list(sub) + rest
    inv = sum(1 for i in range(len(order)) for j in range(i + 1, len(order)) if order[i] > order[j])
    return -1 if inv % 2 else 1


def wedge_embed(X, k: int, p: int, d: int) -> np.ndarray:
    """Matrix of ``P (X x 1 x ... x 1) P`` on the ``p``-wedge space.

    ``X`` is given as a matrix on the ``k``-wedge space (``k <= p``) and is
    padded with ``p - k`` identity factors before antisymmetrising.  For
    ``k = 0`` the scalar ``X`` multiplies the identity.
    """
    if not 0 <= k <= p <= d:
        raise InvalidArgument(f"need 0 <= k <= p <= d, got k={k}, p={p}, d={d}")
    X = np.asarray(X, dtype=complex)
    nk = comb(d, k)
    if X.shape != (nk, nk):
        raise InvalidArgument(f"expected {nk}x{nk} matrix on the {k}-wedge space, got {X.shape}")
    bp = wedge_basis(d, p)
    if k == p:
        return X.copy()
    if k == 0:
        return X[0, 0] * np.eye(bp.dim, dtype=complex)
    idx_k = _index_map(d, k)
    out = np.zeros((bp.dim, bp.dim), dtype=complex)
    # J \ A = K \ B forces the complements to coincide: enumerate the shared
    # (p-k)-tuple first, then the two k-subsets outside it.
    for common in itertools.combinations(range(d), p - k):
        free = [x for x in range(d) if x not in common]
        subs = list(itertools.combinations(free, k))
        fulls = [tuple(sorted(s + common)) for s in subs]
        pos = [bp.index(f) for f in fulls]
        sgn = [_merge_sign(s, f) for s, f in zip(subs, fulls)]
        xi = [idx_k[s] for s in subs]
        for a in range(len(subs)):
            for b in range(len(subs)):
                out[pos[a], pos[b]] += sgn[a] * sgn[b] * X[xi[a], xi[b]]
    return out / comb(p, k)


@dataclass(frozen=True)
class SpectralReport:
    """Eigenvalues of a square matrix relative to the unit circle.

    ``condition_ok`` holds when every eigenvalue lies strictly inside the
    circle of radius ``1 - tol``.
    """

    eigenvalues: tuple[complex, ...]
    spectral_radius: float
    gap_to_unit_circle: float
    condition_ok: bool
    tol: float = TOL_SPEC

    def offending(self) -> list[complex]:
        """Eigenvalues within ``tol`` of (or outside) the unit circle."""
        return [z for z in self.eigenvalues if abs(z) >= 1 - self.tol]

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [[z.real, z.imag] for z in self.eigenvalues],
            "spectral_radius": self.spectral_radius,
            "gap_to_unit_circle": self.gap_to_unit_circle,
            "condition_ok": self.condition_ok,
            "tol": self.tol,
        }


def spectral_report(A, tol: float = TOL_SPEC) -> SpectralReport:
    A = as_square(A, "A")
    try:
        ev = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NumericFailure(f"eigenvalue solver failed for {A.shape} matrix: {exc}") from exc
    if not np.all(np.isfinite(ev)):
        raise NumericFailure(f"eigenvalue solver returned non-finite values: {ev}")
    rho = float(np.max(np.abs(ev))) if ev.size else 0.0
    order = np.argsort(-np.abs(ev), kind="stable")
    return SpectralReport(
        eigenvalues=tuple(complex(z) for z in ev[order]),
        spectral_radius=rho,
        gap_to_unit_circle=1.0 - rho,
        condition_ok=rho < 1.0 - tol,
        tol=tol,
    )


def toeplitz_section(symbol, R: int, tol: float = 1e-12) -> np.ndarray:
    """``R x R`` section ``Sigma_{jk} = sigma(k - j)`` of a banded symbol.

    Parameters
    ----------
    symbol : ReservoirSymbol or sequence of complex
        Coefficients ``sigma(0), ..., sigma(b)``; negative offsets follow
        from ``sigma(-k) = conj(sigma(k))``.
    R : int
        Section size.
    tol : float
        Allowed excursion of the eigenvalues outside ``[0, 1]``.

    Raises
    ------
    InvalidSymbol
        If the section has an eigenvalue outside ``[-tol, 1 + tol]``.
    """
    coeffs = np.asarray(getattr(symbol, "coefficients", symbol), dtype=complex).ravel()
    if R < 1:
        raise InvalidArgument(f"R must be >= 1, got {R}")
    if coeffs.size == 0:
        raise InvalidArgument("symbol needs at least sigma(0)")
    S = np.zeros((R, R), dtype=complex)
    S[np.diag_indices(R)] = coeffs[0].real
    for k in range(1, min(coeffs.size, R)):
        i = np.arange(R - k)
        S[i, i + k] = coeffs[k]
        S[i + k, i] = np.conj(coeffs[k])
    ev = np.linalg.eigvalsh(S)
    if ev[0] < -tol or ev[-1] > 1 + tol:
        raise InvalidSymbol(
            f"Toeplitz section of size {R} has eigenvalues in [{ev[0]:.6g}, {ev[-1]:.6g}], outside [0, 1]"
        )
    return S
