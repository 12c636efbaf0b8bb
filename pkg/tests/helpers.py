"""Brute-force constructions shared by the tests."""

import itertools
import math

import numpy as np


def haar_unitary(d, seed):
    rng = np.random.default_rng(seed)
    Z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_density(d, seed, scale=1.0):
    """Random one-body state with spectrum in [0, scale]."""
    rng = np.random.default_rng(seed)
    U = haar_unitary(d, seed + 1000)
    lam = scale * rng.uniform(0, 1, size=d)
    return (U * lam) @ U.conj().T


def perm_sign(perm):
    inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
    return -1 if inv % 2 else 1


def antisymmetrizer(d, p):
    """Dense projection onto the antisymmetric part of (C^d)^{x p}."""
    n = d**p
    P = np.zeros((n, n))
    for idx in itertools.product(range(d), repeat=p):
        col = np.ravel_multi_index(idx, (d,) * p)
        for perm in itertools.permutations(range(p)):
            row = np.ravel_multi_index(tuple(idx[k] for k in perm), (d,) * p)
            P[row, col] += perm_sign(perm) / math.factorial(p)
    return P


def wedge_vectors(d, p):
    """Columns are e_J = e_{j1} ^ ... ^ e_{jp} in lexicographic order, unit norm."""
    combos = list(itertools.combinations(range(d), p))
    V = np.zeros((d**p, len(combos)))
    for c, J in enumerate(combos):
        for perm in itertools.permutations(range(p)):
            idx = tuple(J[k] for k in perm)
            V[np.ravel_multi_index(idx, (d,) * p), c] += perm_sign(perm) / math.sqrt(math.factorial(p))
    return V


def kron_all(mats):
    out = np.ones((1, 1))
    for m in mats:
        out = np.kron(out, m)
    return out


# one "PASS"/"FAIL" line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LOG = []


def report(number, title, ok, detail=""):
    line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}" + (f"  [{detail}]" if detail else "")
    print(line)
    ACCEPTANCE_LOG.append(line)
    return ok


def even_state(d, seed):
    """Random density matrix on 2^d with no odd-parity coherences."""
    rng = np.random.default_rng(seed)
    n = 2**d
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    st = X @ X.conj().T
    pc = np.array([bin(i).count("1") for i in range(n)])
    st[(pc[:, None] + pc[None, :]) % 2 == 1] = 0
    return st / np.trace(st).real
