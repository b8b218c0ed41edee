#!/usr/bin/env python3
"""TV distance between the exact two-path law and the degree limit, over t.

Optionally adds a Monte Carlo column from local replicates.
"""

import argparse
import logging
import time

from rig_lab.model import ModelParams
from rig_lab.stats import mc_degree_distribution, total_variation
from rig_lab.theory import degree_limit_pmf, exact_path2_pmf
from rig_lab.weights import make_distribution

log = logging.getLogger("degree_convergence")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=4.0)
    ap.add_argument("--t", type=int, nargs="+", default=[250, 500, 1000, 2000])
    ap.add_argument("--n-rep", type=int, default=0, help="replicates per t for the MC column (0: skip)")
    ap.add_argument("--seed", type=int, default=20240607)
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    p = ModelParams(args.a, args.b)
    one = make_distribution("constant", c=1.0)
    law = degree_limit_pmf(p, one, one, r_max=60)
    print(f"{'t':>6} {'TV(exact,limit)':>16} {'TV(mc,exact)':>13} {'seconds':>8}")
    for t in args.t:
        t0 = time.monotonic()
        ex = exact_path2_pmf(p, 1.0, 1.0, t, r_max=60)
        tv = total_variation(ex.probs, law.pmf.probs, ex.tail, law.pmf.tail)
        mc = ""
        if args.n_rep:
            rep = mc_degree_distribution(p, 1.0, 1.0, t, args.n_rep, args.seed, threads=args.threads)
            mc = f"{rep.distances['exact']['tv']:.4e}"
        print(f"{t:>6} {tv:>16.4e} {mc:>13} {time.monotonic() - t0:>8.1f}")


if __name__ == "__main__":
    main()
