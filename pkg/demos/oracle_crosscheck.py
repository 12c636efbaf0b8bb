"""The exact Fock-space evolution against the reduced formulas.

Runs the oracle for a coined walk and for a correlated reservoir and prints
the largest disagreement at each time.
"""

import numpy as np

from fermiwalk import fock, shift_exact, twobody, walks
from fermiwalk.model import ReservoirSymbol, build_effective, shift_matrix


def main():
    W = walks.build_walk(walks.random_coins(2, 4))
    sim = fock.simulate(0.5, None, W, np.pi / 3, 5, R=6)
    tr = twobody.evolve_pair(np.zeros((4, 4)), np.zeros((6, 6)), build_effective(W, np.pi / 3, 0.5), 5)
    print("coined d=4 walk, R=6 reservoir modes")
    for t in sim.times:
        e1 = np.abs(sim.rho1[t] - tr.rho1[t].rho).max()
        e2 = np.abs(sim.rho2[t] - tr.rho2[t].rho2).max()
        print(f"  t={t}  rho1 {e1:.1e}  rho2 {e2:.1e}  odd {sim.odd_correlators[t]:.1e}  N_s {sim.N_s[t]:.6f}")

    band = ReservoirSymbol.banded([0.5, 0.2])
    sim = fock.simulate(band, None, shift_matrix(2), np.pi / 3, 4, R=6)
    print("\nshift d=2 sample, reservoir with nearest-neighbour correlations")
    for m in range(3):
        r1 = shift_exact.one_body_at(band, np.zeros((2, 2)), np.pi / 3, m).rho
        print(f"  m={m}  rho1 =\n{np.round(r1.real, 8)}\n  oracle diff {np.abs(sim.rho1[2 * m] - r1).max():.1e}")
    print("  limit:\n", np.round(shift_exact.one_body_limit(band, np.pi / 3, 2).rho.real, 8))

    ident = fock.heisenberg_identity_check(fock.FockRep(3, 3), np.pi / 3)
    print("\noperator identities (max residual):")
    for k, v in ident.items():
        print(f"  {k:32s} {v:.1e}")


if __name__ == "__main__":
    main()
