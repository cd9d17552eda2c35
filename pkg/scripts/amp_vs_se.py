"""Compare Bayes AMP trajectories with state evolution at several sizes.

Prints per-iteration empirical means, predictions and standard errors for
the overlap (1/n)<x0, x_t>, the raw second moment (1/n)||x_t||^2 and the
denoised second moment (1/n)||tanh(lam x_t)||^2.
"""

import argparse

from spinglass.amp import empirical_vs_se
from spinglass.numerics import RngStream


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[1250, 2500, 5000])
    ap.add_argument("--lam", type=float, default=1.5)
    ap.add_argument("--eps", type=float, default=0.3)
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    keys = ("overlap", "sqnorm", "tanh2")
    print("n,t," + ",".join(f"{k}_emp,{k}_se_pred,{k}_stderr" for k in keys))
    for n in args.sizes:
        rep = empirical_vs_se(n, args.lam, args.eps, args.T, args.reps, RngStream(args.seed, stream_id=13).child(n))
        for t in range(args.T + 1):
            cells = [f"{rep.empirical[k][t]:.6f},{rep.predicted[k][t]:.6f},{rep.std_error[k][t]:.6f}" for k in keys]
            print(f"{n},{t}," + ",".join(cells), flush=True)


if __name__ == "__main__":
    main()
