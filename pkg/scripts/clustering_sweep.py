#!/usr/bin/env python3
"""Exact triangle and two-path probabilities against the leading-order terms along m*(s, t, u)."""

import argparse

from rig_lab.model import ModelParams
from rig_lab.theory import asymptotic_triangle, exact_triple_probs, weight_moments
from rig_lab.weights import make_distribution


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--triple", type=int, nargs=3, default=[300, 360, 450])
    ap.add_argument("--scales", type=int, nargs="+", default=[1, 2, 4, 8, 16])
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=4.0)
    args = ap.parse_args()

    p = ModelParams(args.a, args.b)
    one = make_distribution("constant", c=1.0)
    mom = weight_moments(one, one, x_orders=(2, 3), y_orders=(1, 2))
    print(f"{'m':>3} {'p_delta':>12} {'leading':>12} {'rel':>9} {'alpha_t':>9} {'leading':>9} {'rel':>9}")
    for m in args.scales:
        s, t, u = (m * v for v in args.triple)
        ex = exact_triple_probs(p, 1.0, 1.0, s, t, u)
        th = asymptotic_triangle(p, mom, s, t, u)
        print(f"{m:>3} {ex.p_delta:>12.5e} {th.p_delta:>12.5e} {abs(ex.p_delta / th.p_delta - 1):>9.2e} "
              f"{ex.alpha_t_su:>9.5f} {th.alpha_t_su:>9.5f} {abs(ex.alpha_t_su / th.alpha_t_su - 1):>9.2e}")


if __name__ == "__main__":
    main()
