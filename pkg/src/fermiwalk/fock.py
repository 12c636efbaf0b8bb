"""Exact many-body simulation of the sample coupled to a truncated reservoir.

The Fock space is ``F(reservoir) x F(sample)`` with plain Kronecker products
between the two species, so reservoir and sample operators commute.  Inside
each species the Jordan-Wigner representation

    c_j = Z x ... x Z x s_minus x 1 x ... x 1        (j factors of Z)

is used, with mode ``0`` as the most significant bit of the occupation index.
In this basis ``a*_{k1} ... a*_{kp} |0>`` (``k1 < ... < kp``) carries sign ``+1``
and the ``p``-particle matrix elements of ``Gamma(V)`` are minors of ``V``.

The reservoir is cut to ``R`` modes with a cyclic free shift.  Modes that have
met the sample travel to the far end and would only return after ``R`` steps,
so the truncation is exact within the horizon enforced by :func:`simulate`.
This module is the reference the reduced formulas are tested against; it
favours transparency over speed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .core import hermitian_part, wedge_basis
from .errors import InvalidArgument, PreconditionViolation, ResourceLimit
from .model import CouplingParams, ReservoirSymbol, SampleUnitary, shift_matrix
from .shift_exact import second_quantized

__all__ = [
    "MAX_TOTAL_MODES",
    "MAX_RESERVOIR_MODES",
    "FockRep",
    "ReservoirEnsemble",
    "SimulationResult",
    "annihilators",
    "build_coupling",
    "coupling_exponential",
    "build_step",
    "second_quantize",
    "second_quantize_permutation",
    "reservoir_ensemble",
    "sample_mixture",
    "simulate",
    "reduced_density",
    "heisenberg_identity_check",
]

MAX_TOTAL_MODES = 13
MAX_RESERVOIR_MODES = 12

_SM = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
_Z = sp.csr_matrix(np.diag([1.0, -1.0]))


def annihilators(n: int) -> list:
    """Jordan-Wigner annihilation operators on ``n`` modes as sparse matrices."""
    ops = []
    for j in range(n):
        op = sp.identity(1, format="csr")
        for k in range(n):
            f = _Z if k < j else (_SM if k == j else sp.identity(2, format="csr"))
            op = sp.kron(op, f, format="csr")
        ops.append(op.astype(complex))
    return ops


def _popcount(n: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(2**n)])


@dataclass
class FockRep:
    """Operators on ``F(C^R) x F(C^d)``.

    ``b_ops`` and ``a_ops`` act on the individual factors; the ``B`` and
    ``A`` properties give their joint versions ``b x 1`` and ``1 x a``.
    """

    R: int
    d: int
    b_ops: list = field(init=False, repr=False)
    a_ops: list = field(init=False, repr=False)

    def __post_init__(self):
        if self.R < 1 or self.d < 1:
            raise InvalidArgument(f"need R >= 1 and d >= 1, got R={self.R}, d={self.d}")
        if self.R + self.d > MAX_TOTAL_MODES:
            raise ResourceLimit(
                f"R + d = {self.R + self.d} modes exceeds the limit of {MAX_TOTAL_MODES}"
            )
        self.b_ops = annihilators(self.R)
        self.a_ops = annihilators(self.d)

    @property
    def dim_r(self) -> int:
        return 2**self.R

    @property
    def dim_s(self) -> int:
        return 2**self.d

    @property
    def dim(self) -> int:
        return 2 ** (self.R + self.d)

    @cached_property
    def B(self) -> list:
        Is = sp.identity(self.dim_s, format="csr")
        return [sp.kron(b, Is, format="csr") for b in self.b_ops]

    @cached_property
    def A(self) -> list:
        Ir = sp.identity(self.dim_r, format="csr")
        return [sp.kron(Ir, a, format="csr") for a in self.a_ops]

    def n_r(self, j: int):
        return (self.B[j].conj().T @ self.B[j]).tocsr()

    def n_s(self, j: int):
        return (self.A[j].conj().T @ self.A[j]).tocsr()

    @cached_property
    def N_r(self):
        diag = np.kron(_popcount(self.R), np.ones(self.dim_s))
        return sp.diags(diag.astype(complex), format="csr")

    @cached_property
    def N_s(self):
        diag = np.kron(np.ones(self.dim_r), _popcount(self.d))
        return sp.diags(diag.astype(complex), format="csr")

    @property
    def N(self):
        return (self.N_r + self.N_s).tocsr()


def _check_sites(rep: FockRep, j: int, site: int) -> None:
    if not 0 <= j < rep.R:
        raise InvalidArgument(f"reservoir site {j} outside 0..{rep.R - 1}")
    if not 0 <= site < rep.d:
        raise InvalidArgument(f"sample site {site} outside 0..{rep.d - 1}")


def build_coupling(rep: FockRep, alpha, j: int = 0, sample_site: int = 0):
    """Coupling unitary between reservoir mode ``j`` and sample site ``sample_site``.

    ``1 + g (b* a + b a*) + f (n_r (1 - n_s) + (1 - n_r) n_s)``, with
    ``g = i sin(alpha)`` and ``f = cos(alpha) - 1``.  This is
    ``exp(i alpha (b* a + b a*))``.
    """
    _check_sites(rep, j, sample_site)
    cp = alpha if isinstance(alpha, CouplingParams) else CouplingParams(float(alpha))
    b, a = rep.B[j], rep.A[sample_site]
    X = b.conj().T @ a + b @ a.conj().T
    nr, ns = rep.n_r(j), rep.n_s(sample_site)
    I = sp.identity(rep.dim, dtype=complex, format="csr")
    Y = nr @ (I - ns) + (I - nr) @ ns
    return (I + cp.g_alpha * X + cp.f_alpha * Y).tocsr()


def coupling_exponential(rep: FockRep, alpha: float, j: int = 0, sample_site: int = 0) -> np.ndarray:
    """Dense ``expm(i alpha (b* a + b a*))``, the reference for :func:`build_coupling`."""
    _check_sites(rep, j, sample_site)
    b, a = rep.B[j], rep.A[sample_site]
    X = (b.conj().T @ a + b @ a.conj().T).toarray()
    return scipy.linalg.expm(1j * float(alpha) * X)


def second_quantize(V) -> np.ndarray:
    """Dense ``Gamma(V)`` on ``2^d`` occupation states."""
    V = np.asarray(V, dtype=complex)
    if V.ndim != 2 or V.shape[0] != V.shape[1]:
        raise InvalidArgument(f"V must be square, got shape {V.shape}")
    return second_quantized(V)


def _mask(combo, n: int) -> int:
    return sum(1 << (n - 1 - k) for k in combo)


def _perm_sign(seq) -> int:
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv % 2 else 1


def second_quantize_permutation(perm) -> sp.csr_matrix:
    """Sparse ``Gamma(V)`` for the permutation ``V e_k = e_{perm[k]}``.

    ``Gamma(V) a*_{k1} ... a*_{kp}|0> = a*_{perm[k1]} ... a*_{perm[kp]}|0>``,
    which is a signed basis vector.
    """
    perm = [int(x) for x in perm]
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise InvalidArgument(f"not a permutation of 0..{n - 1}: {perm}")
    rows, cols, vals = [], [], []
    for p in range(n + 1):
        for K in itertools.combinations(range(n), p):
            img = [perm[k] for k in K]
            rows.append(_mask(img, n))
            cols.append(_mask(K, n))
            vals.append(_perm_sign(img))
    return sp.csr_matrix((np.array(vals, dtype=complex), (rows, cols)), shape=(2**n, 2**n))


def _reservoir_shift_perm(R: int) -> list[int]:
    # S e_j = e_{j-1}: mode j moves to j - 1, mode 0 wraps to R - 1
    return [(j - 1) % R for j in range(R)]


def _as_unitary(W) -> np.ndarray:
    return (W if isinstance(W, SampleUnitary) else SampleUnitary(np.asarray(W))).W


def build_step(rep: FockRep, W, alpha):
    """One full step ``U = (Gamma(S_R) x Gamma(W)) K_0`` as a sparse matrix."""
    if rep.R < 2:
        raise InvalidArgument("the reservoir needs R >= 2 modes")
    W = _as_unitary(W)
    if W.shape[0] != rep.d:
        raise InvalidArgument(f"W is {W.shape[0]}-dimensional, the representation has d={rep.d}")
    Gr = second_quantize_permutation(_reservoir_shift_perm(rep.R))
    Gs = sp.csr_matrix(second_quantize(W))
    return (sp.kron(Gr, Gs, format="csr") @ build_coupling(rep, alpha)).tocsr()


@dataclass
class ReservoirEnsemble:
    """Mixture of Slater determinants reproducing a quasifree reservoir state.

    ``terms`` holds ``(weight, state)`` pairs on ``2^R`` dimensions.
    """

    R: int
    terms: list
    section: np.ndarray

    def two_point(self) -> np.ndarray:
        """``Sigma[j, k] = <b*_k b_j>`` computed from the terms."""
        bs = annihilators(self.R)
        out = np.zeros((self.R, self.R), dtype=complex)
        for w, v in self.terms:
            bv = [b @ v for b in bs]
            for j in range(self.R):
                for k in range(self.R):
                    out[j, k] += w * np.vdot(bv[k], bv[j])
        return out


def _slater(V: np.ndarray, occupied: tuple, n: int) -> np.ndarray:
    """``b*(v_{i1}) ... b*(v_{ip})|0>`` for columns ``i1 < ... < ip`` of ``V``."""
    p = len(occupied)
    vec = np.zeros(2**n, dtype=complex)
    if p == 0:
        vec[0] = 1.0
        return vec
    combos = np.array(wedge_basis(n, p).pairs, dtype=np.intp)
    sub = V[combos[:, :, None], np.array(occupied)[None, None, :]]
    idx = [_mask(c, n) for c in wedge_basis(n, p).pairs]
    vec[idx] = np.linalg.det(sub)
    return vec


def reservoir_ensemble(symbol, R: int, snap: float = 1e-13) -> ReservoirEnsemble:
    """Occupation-pattern mixture over the eigenmodes of the ``R x R`` section.

    Eigenvalues within ``snap`` of ``0`` or ``1`` are rounded so that
    exactly empty or filled modes do not spawn zero-weight terms.

    Raises
    ------
    ResourceLimit
        For ``R > MAX_RESERVOIR_MODES``.
    """
    if not isinstance(symbol, ReservoirSymbol):
        symbol = ReservoirSymbol.uniform(float(symbol)) if np.isscalar(symbol) else ReservoirSymbol.banded(symbol)
    if R > MAX_RESERVOIR_MODES:
        raise ResourceLimit(f"R = {R} exceeds the ensemble limit of {MAX_RESERVOIR_MODES} modes")
    if R < 1:
        raise InvalidArgument(f"R must be >= 1, got {R}")
    S = symbol.toeplitz(R)
    if symbol.is_uniform:
        lam, V = np.full(R, symbol.sigma0), np.eye(R, dtype=complex)
    else:
        lam, V = np.linalg.eigh(S)
    lam = np.where(np.abs(lam) < snap, 0.0, lam)
    lam = np.where(np.abs(lam - 1.0) < snap, 1.0, lam)
    lam = np.clip(lam, 0.0, 1.0)
    terms = []
    for pattern in itertools.product((0, 1), repeat=R):
        w = 1.0
        for occ, l in zip(pattern, lam):
            w *= l if occ else 1.0 - l
        if w == 0.0:
            continue
        occupied = tuple(i for i, occ in enumerate(pattern) if occ)
        terms.append((w, _slater(V, occupied, R)))
    return ReservoirEnsemble(R, terms, S)


def sample_mixture(sample_state, d: int, tol: float = 1e-15) -> list:
    """Normalise a sample state to a list of ``(weight, vector)`` pairs.

    Accepts ``None`` (vacuum), a ``2^d`` state vector, a ``2^d x 2^d``
    density matrix, or an explicit list of pairs.
    """
    n = 2**d
    if sample_state is None:
        v = np.zeros(n, dtype=complex)
        v[0] = 1.0
        return [(1.0, v)]
    if isinstance(sample_state, (list, tuple)):
        out = [(float(w), np.asarray(v, dtype=complex)) for w, v in sample_state]
        if any(v.shape != (n,) for _, v in out):
            raise InvalidArgument(f"mixture vectors must have length {n}")
        return out
    arr = np.asarray(sample_state, dtype=complex)
    if arr.shape == (n,):
        return [(1.0, arr / np.linalg.norm(arr))]
    if arr.shape != (n, n):
        raise InvalidArgument(f"sample state must be a {n}-vector or {n}x{n} matrix, got {arr.shape}")
    lam, V = np.linalg.eigh(hermitian_part(arr))
    if lam[0] < -1e-12 or abs(lam.sum() - 1.0) > 1e-12:
        raise InvalidArgument("sample density matrix must be PSD with unit trace")
    return [(float(l), V[:, i]) for i, l in enumerate(lam) if l > tol]


@dataclass
class SimulationResult:
    """Observables of the sample after ``0 .. t`` steps.

    ``flux[j]`` is ``<U* N_r U - N_r>`` in the state at time ``j``.
    ``odd_correlators[j]`` is the largest entry of the sample state that
    couples sectors of opposite particle-number parity.
    """

    R: int
    d: int
    times: list
    sample_states: list
    rho_p: dict
    number_pmf: list
    flux: list
    odd_correlators: list
    N_s: list
    N_r: list

    @property
    def rho1(self) -> list:
        return self.rho_p[1]

    @property
    def rho2(self) -> list:
        return self.rho_p.get(2, [])


def _horizon(symbol: ReservoirSymbol, R: int) -> int:
    return R - 1 - (0 if symbol.is_uniform else symbol.band)


def simulate(
    symbol,
    sample_state,
    W,
    alpha: float,
    t: int,
    R: int | None = None,
    p_max: int | None = None,
) -> SimulationResult:
    """Evolve ``omega_Sigma x rho`` exactly for ``t`` steps on ``R`` reservoir modes.

    Parameters
    ----------
    symbol : ReservoirSymbol or float
    sample_state : see :func:`sample_mixture`
    W : array_like or SampleUnitary
    alpha : float
    t : int
    R : int, optional
        Defaults to the smallest size whose horizon covers ``t``.
    p_max : int, optional
        Largest ``p`` for which ``rho^{(p)}`` is extracted (default
        ``min(d, 3)``).

    Raises
    ------
    PreconditionViolation
        If ``t`` exceeds the horizon ``R - 1`` (or ``R - 1 - band`` for a
        correlated reservoir).
    ResourceLimit
        If ``R + d > 13``.
    """
    if not isinstance(symbol, ReservoirSymbol):
        symbol = ReservoirSymbol.uniform(float(symbol))
    W = _as_unitary(W)
    d = W.shape[0]
    if t < 0:
        raise InvalidArgument(f"t must be >= 0, got {t}")
    extra = 0 if symbol.is_uniform else symbol.band
    if R is None:
        R = max(2, t + 1 + extra)
    if t > _horizon(symbol, R):
        raise PreconditionViolation(
            f"t = {t} exceeds the exact horizon {_horizon(symbol, R)} for R = {R}"
        )
    rep = FockRep(R, d)
    p_max = min(d, 3) if p_max is None else p_max
    ens = reservoir_ensemble(symbol, R)
    mix = sample_mixture(sample_state, d)

    K0 = build_coupling(rep, alpha)
    Gr = second_quantize_permutation(_reservoir_shift_perm(R))
    GsT = second_quantize(W).T
    Phi = (K0.conj().T @ rep.N_r @ K0 - rep.N_r).tocsr()
    nr_diag = _popcount(R)

    ns = 2**d
    states = [np.zeros((ns, ns), dtype=complex) for _ in range(t + 1)]
    flux = np.zeros(t + 1)
    Nr = np.zeros(t + 1)
    # fixed summation order: reservoir terms outer, sample terms inner
    for wr, vr in ens.terms:
        for ws, vs in mix:
            w = wr * ws
            psi = np.kron(vr, vs)
            for n in range(t + 1):
                Psi = psi.reshape(2**R, ns)
                states[n] += w * (Psi.T @ Psi.conj())
                flux[n] += w * np.vdot(psi, Phi @ psi).real
                Nr[n] += w * float(nr_diag @ (np.abs(Psi) ** 2).sum(axis=1))
                if n < t:
                    psi = K0 @ psi
                    psi = (Gr @ psi.reshape(2**R, ns) @ GsT).reshape(-1)

    pc = _popcount(d)
    odd = (pc[:, None] + pc[None, :]) % 2 == 1
    rho_p = {p: [] for p in range(1, p_max + 1)}
    pmf, oddc, Ns = [], [], []
    for st in states:
        st = hermitian_part(st)
        for p in rho_p:
            rho_p[p].append(reduced_density(st, p))
        diag = st.diagonal().real
        pmf.append(np.bincount(pc, weights=diag, minlength=d + 1))
        oddc.append(float(np.abs(st[odd]).max()) if odd.any() else 0.0)
        Ns.append(float(diag @ pc))
    return SimulationResult(
        R=R,
        d=d,
        times=list(range(t + 1)),
        sample_states=states,
        rho_p=rho_p,
        number_pmf=pmf,
        flux=list(flux),
        odd_correlators=oddc,
        N_s=Ns,
        N_r=list(Nr),
    )


def _products(d: int, p: int) -> list:
    """Sparse ``a_{jp} ... a_{j1}`` for each increasing tuple ``J``."""
    a = annihilators(d)
    out = []
    for J in wedge_basis(d, p).pairs:
        op = sp.identity(2**d, dtype=complex, format="csr")
        for j in J:
            op = a[j] @ op
        out.append(op.tocsr())
    return out


def reduced_density(state, p: int) -> np.ndarray:
    """``rho^{(p)}[J, K] = tr(rho a*_{k1} ... a*_{kp} a_{jp} ... a_{j1})``.

    ``state`` is a ``2^d x 2^d`` density matrix of the sample.
    """
    state = np.asarray(state, dtype=complex)
    d = int(round(np.log2(state.shape[0])))
    if state.shape != (2**d, 2**d):
        raise InvalidArgument(f"state must be 2^d x 2^d, got {state.shape}")
    if p == 0:
        return np.array([[np.trace(state)]])
    if not 1 <= p <= d:
        raise InvalidArgument(f"p must lie in [0, {d}], got {p}")
    ops = _products(d, p)
    # tr(rho A_K^H A_J) = sum_xy conj(A_K)[x, y] (A_J rho)[x, y]
    AJr = [A @ state for A in ops]
    out = np.empty((len(ops), len(ops)), dtype=complex)
    for k, AK in enumerate(ops):
        AKc = AK.conj().tocoo()
        for j, M in enumerate(AJr):
            out[j, k] = np.sum(AKc.data * M[AKc.row, AKc.col])
    return out


def _dense(x) -> np.ndarray:
    return x.toarray() if sp.issparse(x) else np.asarray(x)


def heisenberg_identity_check(rep: FockRep, alpha: float, W=None) -> dict:
    """Residuals of the operator identities behind the reduced dynamics.

    Returns a dictionary of max-entry residuals: CAR in both species,
    commutation across species, closed form of the coupling against its
    exponential, conjugations of ``a``, ``a*`` and ``n`` by the coupling,
    commutation with ``a_j`` at an uncoupled site, total number conservation,
    covariance ``U_F* K_j U_F = K_{j+1}`` for the shift sample, the one-body
    action of ``Gamma(W)`` and the flux operator formula.  ``W`` defaults to
    a fixed pseudo-random unitary.
    """
    if rep.R + rep.d > 8:
        raise ResourceLimit("identity checks are meant for R + d <= 8")
    cp = CouplingParams(float(alpha))
    c, g, s2 = cp.cos_alpha, cp.g_alpha, cp.sin2
    D = lambda x: _dense(x)  # noqa: E731
    I = np.eye(rep.dim)
    res = {}

    def car(ops):
        r = 0.0
        for i, ci in enumerate(ops):
            for j, cj in enumerate(ops):
                ci_, cj_ = D(ci), D(cj)
                r = max(r, np.abs(ci_ @ cj_.conj().T + cj_.conj().T @ ci_ - (i == j) * np.eye(ci_.shape[0])).max())
                r = max(r, np.abs(ci_ @ cj_ + cj_ @ ci_).max())
        return float(r)

    res["car_reservoir"] = car(rep.b_ops)
    res["car_sample"] = car(rep.a_ops)
    res["cross_species"] = float(
        max(np.abs(D(b @ a - a @ b)).max() for b in rep.B for a in rep.A)
    )

    K = D(build_coupling(rep, cp))
    Kh = K.conj().T
    res["closed_form_vs_exponential"] = float(np.abs(K - coupling_exponential(rep, cp.alpha)).max())
    res["coupling_unitary"] = float(np.abs(Kh @ K - I).max())

    a, b = D(rep.A[0]), D(rep.B[0])
    ns, nr = D(rep.n_s(0)), D(rep.n_r(0))
    parity = I - 2 * ns
    lhs = Kh @ a @ K
    res["conj_a"] = float(np.abs(lhs - (c * a + g * b @ parity)).max())
    # adjoint of the previous identity
    res["conj_a_star"] = float(np.abs(Kh @ a.conj().T @ K - (c * a.conj().T + np.conj(g) * parity @ b.conj().T)).max())
    r1 = r2 = 0.0
    for op_a, op_b in ((a, b), (a.conj().T, b.conj().T)):
        r1 = max(r1, np.abs(Kh @ op_a @ Kh - (c * op_a - g * op_b)).max())
        r2 = max(r2, np.abs(K @ op_a @ K - (c * op_a + g * op_b)).max())
    res["conj_a_by_Kstar_Kstar"] = float(r1)
    res["conj_a_by_K_K"] = float(r2)
    rhs_n = c * c * ns + g * c * (b @ a.conj().T - b.conj().T @ a) + s2 * nr
    res["conj_n"] = float(np.abs(Kh @ ns @ K - rhs_n).max())
    if rep.d >= 2:
        r = 0.0
        for j in range(1, rep.d):
            aj = D(rep.A[j])
            r = max(r, np.abs(Kh @ aj - aj @ K).max(), np.abs(Kh @ aj.conj().T - aj.conj().T @ K).max())
        res["uncoupled_site"] = float(r)

    if W is None:
        W = _default_unitary(rep.d)
    W = _as_unitary(W)
    if rep.R >= 2:
        U = D(build_step(rep, W, cp))
        N = D(rep.N)
        res["number_conservation"] = float(np.abs(U @ N - N @ U).max())
        Sp = shift_matrix(rep.d)
        UF = D(sp.kron(second_quantize_permutation(_reservoir_shift_perm(rep.R)), sp.csr_matrix(second_quantize(Sp))))
        r = 0.0
        for j in range(rep.R - 1):
            Kj = D(build_coupling(rep, cp, j, j % rep.d))
            Kj1 = D(build_coupling(rep, cp, j + 1, (j + 1) % rep.d))
            r = max(r, np.abs(UF.conj().T @ Kj @ UF - Kj1).max())
        res["free_step_covariance"] = float(r)

    G = second_quantize(W)
    r = 0.0
    for i, ai in enumerate(rep.a_ops):
        lhs = G.conj().T @ D(ai) @ G
        rhs = sum(W[i, j] * D(rep.a_ops[j]) for j in range(rep.d))
        r = max(r, np.abs(lhs - rhs).max())
    res["second_quantization"] = float(r)

    Phi = Kh @ D(rep.N_r) @ K - D(rep.N_r)
    sin_cos = float(np.sin(cp.alpha) * np.cos(cp.alpha))
    formula = s2 * (ns - nr) + 1j * sin_cos * (b.conj().T @ a - b @ a.conj().T)
    res["flux_operator"] = float(np.abs(Phi - formula).max())
    return res


def _default_unitary(d: int) -> np.ndarray:
    rng = np.random.default_rng(20240601 + d)
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, Rm = np.linalg.qr(Z)
    return Q * (np.diag(Rm) / np.abs(np.diag(Rm)))
