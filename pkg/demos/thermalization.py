"""Relaxation of a coined walk towards the flat state sigma * 1.

Prints the distance to the limit along the evolution, compares the fitted
per-step contraction with the squared spectral radius of M, and shows two
walks that do not relax: the frozen sample and a translation invariant ring.
"""

import numpy as np

from fermiwalk import onebody, twobody, walks
from fermiwalk.core import spectral_report
from fermiwalk.model import build_effective

ALPHA, SIGMA = np.pi / 3, 0.3


def main():
    coins = walks.random_coins(3, 3)
    W = walks.build_walk(coins)
    eff = build_effective(W, ALPHA, SIGMA)
    rep = spectral_report(eff.M)
    print(f"generic d=6 ring: min |alpha_x beta_x| = {walks.is_generic(coins).min_margin:.3f}, "
          f"spectral radius of M = {rep.spectral_radius:.6f}")

    tr = twobody.evolve_pair(np.zeros((6, 6)), np.zeros((15, 15)), eff, 400, record_every=50)
    for t, r1, r2 in zip(tr.times, tr.rho1, tr.rho2):
        d1 = np.linalg.norm(r1.rho - SIGMA * np.eye(6), 2)
        d2 = np.linalg.norm(r2.rho2 - SIGMA**2 * np.eye(15), 2)
        print(f"  t={t:4d}  |rho1 - sigma|={d1:.3e}  |rho2 - sigma^2|={d2:.3e}")

    full = onebody.evolve(np.zeros((6, 6)), eff, 400)
    rate = onebody.fit_decay_rate(full.times, full.distances_to_limit)
    print(f"  fitted rate {rate:.6f} vs radius^2 {rep.spectral_radius**2:.6f}")

    rho0 = np.diag([0.9, 0.1, 0.7])
    limit, it = onebody.stagnant_limit_demo(rho0, ALPHA, SIGMA, 200)
    print("\nfrozen sample (W = 1): only the coupled site forgets its start")
    print("  limit diagonal  ", np.round(limit.density(), 6))
    print("  iterate diagonal", np.round(it.density(), 6))

    print("\nuniform Hadamard rings:")
    for n in (2, 3, 4, 5):
        c = walks.CoinConfig.uniform(n, walks.HADAMARD)
        Wn = walks.build_walk(c)
        cert = walks.thermalization_certificate(Wn, ALPHA)
        print(f"  n={n}: generic={bool(walks.is_generic(c))}, cyclic={walks.is_cyclic(Wn)}, "
              f"radius={cert.spectral_radius:.6f}, relaxes={cert.condition_ok}")


if __name__ == "__main__":
    main()
