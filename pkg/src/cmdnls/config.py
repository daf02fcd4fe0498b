"""JSON run configuration.  Every field has a default; unknown keys are errors.

Complex numbers are written either as a plain number or as a ``[re, im]`` pair.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

from .data import InitialDatum
from .evolve import SolverConfig

CONFIG_VERSION = 1


class ConfigError(ValueError):
    pass


def parse_complex(v) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"cannot read {v!r} as a complex number")


def dump_complex(z: complex):
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


@dataclass(frozen=True)
class GridConfig:
    L: float = 50.0
    N: int = 1024


@dataclass(frozen=True)
class FormulaConfig:
    mode: str = "auto"
    tol: float = 1e-10
    maxiter: int = 200
    restart: int = 60
    route: str = "resolvent"


@dataclass(frozen=True)
class SweepConfig:
    t: tuple[float, ...] = (0.1, 0.5)
    z: tuple[complex, ...] = (1j, 2j, 1 + 1j)
    eps: tuple[float, ...] = (1.0, 0.5, 0.25, 0.125, 0.0625)


@dataclass(frozen=True)
class RunConfig:
    version: int = CONFIG_VERSION
    grid: GridConfig = field(default_factory=GridConfig)
    datum: InitialDatum = field(default_factory=InitialDatum)
    solver: SolverConfig = field(default_factory=SolverConfig)
    formula: FormulaConfig = field(default_factory=FormulaConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    gate: float = 1e-6
    out: str = "out"
    threads: int = 1
    seed: int = 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["datum"]["c"] = dump_complex(self.datum.c)
        d["datum"]["amplitudes"] = [dump_complex(a) for a in self.datum.amplitudes]
        d["datum"]["widths"] = list(self.datum.widths)
        d["datum"]["offsets"] = list(self.datum.offsets)
        d["sweep"] = {
            "t": list(self.sweep.t),
            "z": [dump_complex(z) for z in self.sweep.z],
            "eps": list(self.sweep.eps),
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _section(cls, raw, name: str, convert=None):
    if raw is None:
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"section {name!r} must be an object")
    known = {f.name for f in fields(cls)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown keys in {name!r}: {sorted(unknown)}")
    kw = dict(raw)
    if convert:
        kw = convert(kw)
    try:
        return cls(**kw)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid {name!r} section: {e}") from None


def _datum_kw(kw):
    if "c" in kw:
        kw["c"] = parse_complex(kw["c"])
    if "amplitudes" in kw:
        kw["amplitudes"] = tuple(parse_complex(a) for a in kw["amplitudes"])
    for k in ("widths", "offsets"):
        if k in kw:
            kw[k] = tuple(float(v) for v in kw[k])
    return kw


def _sweep_kw(kw):
    if "t" in kw:
        kw["t"] = tuple(float(v) for v in kw["t"])
    if "z" in kw:
        kw["z"] = tuple(parse_complex(v) for v in kw["z"])
    if "eps" in kw:
        kw["eps"] = tuple(float(v) for v in kw["eps"])
    return kw


def load_config(source: dict | str | None) -> RunConfig:
    """Build a RunConfig from a dict, a JSON string, or None (all defaults)."""
    if source is None:
        return RunConfig()
    raw = json.loads(source) if isinstance(source, str) else dict(source)
    top = {f.name for f in fields(RunConfig)}
    unknown = set(raw) - top
    if unknown:
        raise ConfigError(f"unknown top-level keys: {sorted(unknown)}")
    version = raw.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version}")
    return RunConfig(
        version=version,
        grid=_section(GridConfig, raw.get("grid"), "grid"),
        datum=_section(InitialDatum, raw.get("datum"), "datum", _datum_kw),
        solver=_section(SolverConfig, raw.get("solver"), "solver"),
        formula=_section(FormulaConfig, raw.get("formula"), "formula"),
        sweep=_section(SweepConfig, raw.get("sweep"), "sweep", _sweep_kw),
        gate=float(raw.get("gate", 1e-6)),
        out=str(raw.get("out", "out")),
        threads=int(raw.get("threads", 1)),
        seed=int(raw.get("seed", 0)),
    )


def read_config(path) -> RunConfig:
    with open(path) as fh:
        return load_config(fh.read())
