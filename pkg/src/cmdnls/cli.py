"""Command-line entry points: evolve, formula, compare, zd, datum-dump."""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import io
from .config import ConfigError, RunConfig, read_config
from .data import build_datum
from .diagnostics import invariant_report
from .evolve import evolve, rhs, states_at
from .formula import FormulaWorkspace, zd_eps_eval, zd_limit_eval
from .grid import l2_norm, make_grid, poisson_eval

log = logging.getLogger("cmdnls")


def _setup(cfg: RunConfig):
    g = make_grid(cfg.grid.L, cfg.grid.N)
    u0 = build_datum(cfg.datum, g)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run.json").write_text(cfg.to_json() + "\n")
    return g, u0, out


def _workspace(cfg: RunConfig, g) -> FormulaWorkspace:
    f = cfg.formula
    return FormulaWorkspace(
        g, mode=f.mode, tol=f.tol, maxiter=f.maxiter, restart=f.restart, dealias=cfg.solver.dealias
    )


def _zkey(z: complex):
    return (z.real, z.imag)


def _fmt_z(z: complex) -> str:
    return f"{z.real!r}{z.imag:+}j"


def _pool_map(fn, tasks, threads: int):
    """Evaluate fn over tasks; results come back in task order regardless of scheduling."""
    if threads <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(lambda a: fn(*a), tasks))


def cmd_evolve(cfg: RunConfig) -> int:
    g, u0, out = _setup(cfg)
    traj = evolve(u0, cfg.solver)
    rows, reports = [], []
    for i, (t, u) in enumerate(zip(traj.times, traj.snapshots)):
        io.write_snapshot(out / f"snap_{i:05d}.bin", u, t)
        rep = invariant_report(u, t, cfg.solver.dealias)
        reports.append(rep.row())
        rows.append((t, l2_norm(rhs(u, cfg.solver.dealias)), rep.leak, rep.i1, rep.i2, rep.mass_defect))
    io.write_csv(out / "evolve.csv", io.EVOLVE_HEADER, rows)
    io.write_csv(out / "invariants.csv", io.REPORT_HEADER, reports)
    log.info("evolve: %d snapshots written to %s", len(traj), out)
    return 0


def _sweep_tasks(cfg: RunConfig, eps_list=(1.0,)):
    ts = sorted(set(cfg.sweep.t))
    zs = sorted(set(cfg.sweep.z), key=_zkey)
    return [(t, z, e) for t in ts for z in zs for e in sorted(set(eps_list))]


def _formula_rows(cfg, u0, ws, tasks, limit=False):
    route = cfg.formula.route

    def one(t, z, e):
        if limit:
            r = zd_limit_eval(u0, t, z, ws, route=route, full_output=True)
        else:
            r = zd_eps_eval(u0, t, z, e, ws, route=route, full_output=True)
        return (t, z.real, z.imag, e, r.value.real, r.value.imag, r.iterations, r.residual)

    return _pool_map(one, tasks, cfg.threads)


def cmd_formula(cfg: RunConfig) -> int:
    g, u0, out = _setup(cfg)
    ws = _workspace(cfg, g)
    rows = _formula_rows(cfg, u0, ws, _sweep_tasks(cfg))
    io.write_csv(out / "formula.csv", io.SWEEP_HEADER, rows)
    return 0


def cmd_compare(cfg: RunConfig) -> int:
    g, u0, out = _setup(cfg)
    ws = _workspace(cfg, g)
    tasks = _sweep_tasks(cfg)
    rows = _formula_rows(cfg, u0, ws, tasks)
    states = states_at(u0, [t for t, _, _ in tasks], cfg.solver)
    table = []
    worst = (-1.0, 0.0, 0j)
    for (t, z, _), row in zip(tasks, rows):
        uf = complex(row[4], row[5])
        us = poisson_eval(states[t], z)
        err = abs(uf - us)
        table.append((t, z.real, z.imag, uf.real, uf.imag, us.real, us.imag, err))
        if err > worst[0]:
            worst = (err, t, z)
    io.write_csv(
        out / "compare.csv",
        ("t", "re_z", "im_z", "re_formula", "im_formula", "re_solver", "im_solver", "abs_err"),
        table,
    )
    with open(out / "summary.csv", "w") as fh:
        fh.write(",".join(io.SUMMARY_HEADER) + "\n")
        fh.write(f"{worst[0]!r},{worst[1]!r},{_fmt_z(worst[2])}\n")
    print(f"max_abs_err={worst[0]:.3e} at t={worst[1]}, z={_fmt_z(worst[2])} (gate {cfg.gate:.1e})")
    return 0 if worst[0] <= cfg.gate else 1


def cmd_zd(cfg: RunConfig) -> int:
    g, u0, out = _setup(cfg)
    ws = _workspace(cfg, g)
    tasks = _sweep_tasks(cfg, cfg.sweep.eps)
    rows = _formula_rows(cfg, u0, ws, tasks)
    limit_tasks = sorted({(t, z, 0.0) for t, z, _ in tasks}, key=lambda a: (a[0], _zkey(a[1])))
    limits = _formula_rows(cfg, u0, ws, limit_tasks, limit=True)
    io.write_csv(out / "zd.csv", io.SWEEP_HEADER, rows + limits)
    lim = {(r[0], r[1], r[2]): complex(r[4], r[5]) for r in limits}
    conv = []
    for r in rows:
        d = abs(complex(r[4], r[5]) - lim[(r[0], r[1], r[2])])
        conv.append((r[0], r[1], r[2], r[3], d))
    io.write_csv(out / "zd_convergence.csv", ("t", "re_z", "im_z", "eps", "abs_diff_limit"), conv)
    return 0


def cmd_datum_dump(cfg: RunConfig) -> int:
    g, u0, out = _setup(cfg)
    io.write_snapshot(out / "datum.bin", u0, 0.0)
    rep = invariant_report(u0, 0.0, cfg.solver.dealias)
    io.write_csv(out / "datum.csv", ("x", "re_u", "im_u"), zip(g.x, u0.values.real, u0.values.imag))
    print(f"{cfg.datum.kind}: N={g.N} L={g.L} i1={rep.i1:.6g} mass_defect={rep.mass_defect:.6g}")
    return 0


COMMANDS = {
    "evolve": cmd_evolve,
    "formula": cmd_formula,
    "compare": cmd_compare,
    "zd": cmd_zd,
    "datum-dump": cmd_datum_dump,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cmdnls", description=__doc__)
    p.add_argument("--config", metavar="PATH", help="JSON run configuration")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--threads", type=int, metavar="K", help="worker pool size for sweeps")
    p.add_argument("--seed", type=int, metavar="U64", help="recorded in run.json")
    p.add_argument("-v", "--verbose", action="store_true")
    p.add_argument("command", choices=sorted(COMMANDS))
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    try:
        cfg = read_config(args.config) if args.config else RunConfig()
    except (OSError, ConfigError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    overrides = {}
    if args.out is not None:
        overrides["out"] = args.out
    if args.threads is not None:
        if args.threads < 1:
            print("--threads must be >= 1", file=sys.stderr)
            return 2
        overrides["threads"] = args.threads
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            print("--seed must fit in an unsigned 64-bit integer", file=sys.stderr)
            return 2
        overrides["seed"] = args.seed
    cfg = replace(cfg, **overrides)
    np.seterr(over="raise", invalid="ignore")
    return COMMANDS[args.command](cfg)


if __name__ == "__main__":
    sys.exit(main())
