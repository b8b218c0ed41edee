#!/usr/bin/env python3
"""Extrapolated path-sum constant for each lifetime kind, next to its closed form.

The two super-polynomial kinds (exp(ln^2 t) and e^t) have limit 0.
"""

import argparse

from rig_lab.model import TAU_KINDS, ModelParams, Tau
from rig_lab.theory import gamma_linear, gamma_power, gamma_star


def closed_form(kind, a, b, nu):
    if kind == "linear":
        g1, g2 = gamma_linear(a, b)
        return g1 * g2
    if kind == "power":
        return gamma_power(a, b, nu)
    if kind == "t-log-t":
        return 4 * (a ** -0.5 - b ** -0.5) * (b ** 0.5 - a ** 0.5)
    return 0.0


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--a", type=float, default=1.0)
    ap.add_argument("--b", type=float, default=4.0)
    ap.add_argument("--nu", type=float, default=2.0)
    args = ap.parse_args()
    print(f"{'tau':>16} {'extrapolated':>13} {'closed form':>12} {'last raw':>10} variable")
    for kind in TAU_KINDS:
        tau = Tau(kind, args.nu) if kind == "power" else Tau(kind)
        g = gamma_star(ModelParams(args.a, args.b, tau))
        print(f"{str(tau):>16} {g.value:>13.6f} {closed_form(kind, args.a, args.b, args.nu):>12.6f} "
              f"{g.raw[-1]:>10.6f} {g.variable}")


if __name__ == "__main__":
    main()
