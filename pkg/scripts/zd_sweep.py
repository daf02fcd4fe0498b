"""Distance to the zero-dispersion limit along eps -> 0, with Richardson extrapolation."""

import argparse

import numpy as np

from cmdnls import FormulaWorkspace, build_datum, catalog, make_grid
from cmdnls.formula import zd_eps_eval, zd_limit_eval


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--L", type=float, default=50.0)
    p.add_argument("--N", type=int, default=2048)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--z", type=complex, default=2j)
    p.add_argument("--levels", type=int, default=7)
    args = p.parse_args()
    g = make_grid(args.L, args.N)
    ws = FormulaWorkspace(g)
    u0 = build_datum(catalog()["gaussian"], g)
    lim = zd_limit_eval(u0, args.t, args.z, ws)
    lim_trace = zd_limit_eval(u0, args.t, args.z, ws, route="trace") if g.K <= 4096 else np.nan
    print(f"limit {lim:.10f}   |resolvent - trace| = {abs(lim - lim_trace):.2e}")
    eps = 0.5 ** np.arange(args.levels)
    vals = np.array([zd_eps_eval(u0, args.t, args.z, e, ws) for e in eps])
    d = np.abs(vals - lim)
    r1 = 2 * vals[1:] - vals[:-1]
    r2 = (4 * r1[1:] - r1[:-1]) / 3
    print("eps        |u_eps - limit|  rate   |richardson - limit|")
    for i, e in enumerate(eps):
        rate = f"{np.log2(d[i - 1] / d[i]):.3f}" if i else ""
        rich = f"{abs(r2[i - 2] - lim):.2e}" if i >= 2 else ""
        print(f"{e:<10.5g} {d[i]:.3e}       {rate:6s} {rich}")


if __name__ == "__main__":
    main()
