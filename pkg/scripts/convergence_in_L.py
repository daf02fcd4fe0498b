"""Formula/solver gap, route gap and reproduction error as the window grows.

Grid spacing is held fixed (N = 40.96 L), so any trend is the window size alone.
A tail-free datum (zero-mean perturbation) is included to separate the effect of
the difference-quotient tail from that of the datum.
"""

import argparse

import numpy as np

from cmdnls import (
    Field,
    FormulaWorkspace,
    SolverConfig,
    build_datum,
    catalog,
    evolve,
    explicit_eval,
    explicit_eval_iplus,
    make_grid,
    poisson_eval,
    szego_project,
)
from cmdnls.operators import reproduce_at

TS = (0.1, 0.5)
ZS = (1j, 2j, 1 + 1j)


def gaps(u0, dt):
    g = u0.grid
    ws = FormulaWorkspace(g)
    traj = evolve(u0, SolverConfig(dt=dt, t_final=max(TS), snapshot_stride=int(round(0.1 / dt))))
    solver, routes = 0.0, 0.0
    for t in TS:
        for z in ZS:
            a = explicit_eval(u0, t, z, ws)
            solver = max(solver, abs(a - poisson_eval(traj.at(t), z)))
            if g.K <= 4096:
                routes = max(routes, abs(a - explicit_eval_iplus(u0, t, z, ws)))
    return solver, routes


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--L", type=float, nargs="+", default=[25.0, 50.0, 100.0])
    p.add_argument("--dt", type=float, default=1e-4)
    args = p.parse_args()
    print("L       N      datum      formula-solver  resolvent-trace  reproduce")
    for L in args.L:
        g = make_grid(L, int(round(L * 40.96)))
        f = szego_project(Field(g, np.exp(-(g.x**2))))
        rep = max(abs(poisson_eval(f, z) - reproduce_at(f, z)) for z in (0.5j, 1j, 2j))
        gauss = build_datum(catalog()["gaussian"], g)
        tailfree = Field(g, 1 - 0.2 * g.x * np.exp(-(g.x**2)))
        tailfree = szego_project(tailfree)
        for name, u0 in (("gaussian", gauss), ("zero-mean", tailfree)):
            s, r = gaps(u0, args.dt)
            print(f"{L:<7g} {g.N:<6d} {name:<10s} {s:14.3e}  {r:15.3e}  {rep:9.3e}")


if __name__ == "__main__":
    main()
