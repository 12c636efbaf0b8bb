"""Shift sample with an uncorrelated reservoir: particle statistics.

Number law after m periods, expected particle exchange with the reservoir
and the grand-canonical limit state.
"""

import numpy as np

from fermiwalk import ris, shift_exact

ALPHA, SIGMA, D = np.pi / 3, 0.5, 3


def main():
    for m in range(4):
        law = ris.number_distribution(m, SIGMA, ALPHA, D)
        print(f"m={m}: q={law.q:.6f}  pmf={np.round(law.pmf, 6)}")

    n0 = np.array([1.0, 1.0, 0.0])
    print("\nflux from a partly filled sample")
    for rec in ris.flux_series(4 * D, SIGMA, ALPHA, D, n0):
        tail = f"  closed form {rec.closed_form:+.6f}" if rec.closed_form is not None else ""
        print(f"  t={rec.t:2d}  step {rec.expectation:+.6f}  cumulative {rec.cumulative:+.6f}{tail}")
    print(f"  long-time total: {n0.sum() - SIGMA * D:+.6f}")

    g = ris.gibbs_limit(0.3, D)
    q = shift_exact.quasifree_full_state(0.3 * np.eye(D))
    print("\nlimit state for sigma=0.3, occupation basis weights:")
    print("  ", np.round(np.diag(g).real, 6))
    print(f"   max deviation from the quasifree construction {np.abs(g - q).max():.1e}")


if __name__ == "__main__":
    main()
