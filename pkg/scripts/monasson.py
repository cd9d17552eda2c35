"""Zero-temperature complexity from the 1RSB Legendre transform versus the annealed S.

At fixed mu = m/T the curve is evaluated at two small temperatures and
extrapolated to T = 0.
"""

import argparse

import numpy as np

from spinglass.landscape import complexity_S, eps_d, eps_star
from spinglass.pspin import monasson_zero_t, zero_t_mu_for_energy


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--points", type=int, default=9)
    ap.add_argument("--temps", type=float, nargs=2, default=[0.02, 0.01])
    args = ap.parse_args()

    lo, hi = eps_d(args.k), eps_star(args.k)
    print("mu,eps,sigma_1rsb,S_annealed,gap")
    for target in np.linspace(lo, hi, args.points + 2)[1:-1]:
        mu = zero_t_mu_for_energy(target, args.k)
        eps, sigma = monasson_zero_t(mu, args.k, tuple(args.temps))
        s = complexity_S(eps, args.k)
        print(f"{mu:.6f},{eps:.8f},{sigma:.8f},{s:.8f},{sigma - s:+.2e}")


if __name__ == "__main__":
    main()
