"""Global time-step order of the integrating-factor RK4 scheme on the Gaussian datum."""

import argparse

import numpy as np

from cmdnls import SolverConfig, build_datum, catalog, evolve, make_grid
from cmdnls.grid import l2_norm


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--L", type=float, default=50.0)
    p.add_argument("--N", type=int, default=1024)
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--dt-ref", type=float, default=1e-4)
    args = p.parse_args()
    g = make_grid(args.L, args.N)
    u0 = build_datum(catalog()["gaussian"], g)

    def run(dt):
        return evolve(u0, SolverConfig(dt=dt, t_final=args.t_final, snapshot_stride=10**9)).final

    ref = run(args.dt_ref)
    prev = None
    print("dt        error       order")
    for dt in (0.04, 0.02, 0.01, 0.005, 0.0025):
        e = l2_norm(run(dt) - ref)
        order = f"{np.log2(prev / e):.3f}" if prev else ""
        print(f"{dt:<9g} {e:.3e}  {order}")
        prev = e


if __name__ == "__main__":
    main()
