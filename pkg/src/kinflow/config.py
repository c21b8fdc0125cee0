"""Line-based ``key = value`` run configuration.

``#`` starts a comment; blank lines are ignored; every key is optional and
unknown keys are rejected. ``auto`` is accepted for ``s`` and
``tol_picard``. ``snapshots`` is a comma-separated list of time levels
(empty means the final level only).
"""

from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass, field

from kinflow.errors import ConfigurationError
from kinflow.grid import build_space_grid, build_time_grid, build_velocity_grid

SCENARIOS = ("collision", "zero", "uniform")


@dataclass
class Config:
    # space grid
    L1: float = 1.0
    L2: float = 1.0
    M1: int = 32
    M2: int = 32
    # velocity grid
    ah1: float = 1.0
    ah2: float = 1.0
    MR1: int = 2
    PR1: int = 2
    MR2: int = 2
    PR2: int = 2
    # time grid
    T: float = 0.9
    N: int = 300
    # model
    nu: float = 0.05
    kappa: float = 1.0
    # solver
    s: float | None = None
    tol_linear: float = 1e-10
    max_linear_iters: int = 500
    tol_picard: float | None = None
    max_picard_iters: int = 50
    # scenario
    scenario: str = "collision"
    ramp_rate: float = 0.2
    base_height: float = 0.0
    band_mode: str = "fastest"
    sides: str = "LRBT"
    uniform_value: float = 0.0
    # output
    snapshots: list[int] = field(default_factory=list)
    eps_div: float = 1e-12
    output: str = "output"
    threads: int = 1


HELP = {
    "L1": "domain length along x1",
    "L2": "domain length along x2",
    "M1": "interior space nodes along x1 (h1 = L1/(M1+1))",
    "M2": "interior space nodes along x2",
    "ah1": "velocity step along alpha1",
    "ah2": "velocity step along alpha2",
    "MR1": "negative velocity nodes along alpha1",
    "PR1": "positive velocity nodes along alpha1",
    "MR2": "negative velocity nodes along alpha2",
    "PR2": "positive velocity nodes along alpha2",
    "T": "final time",
    "N": "number of time steps",
    "nu": "diffusion coefficient (>= 0)",
    "kappa": "mixer strength (>= 0)",
    "s": "Richardson relaxation, or auto for 1/d",
    "tol_linear": "Richardson max-norm residual target",
    "max_linear_iters": "Richardson iteration cap",
    "tol_picard": "Picard max-norm update target, or auto for 1e-8*(1+max|u^n|)",
    "max_picard_iters": "Picard sweep cap",
    "scenario": "collision | zero | uniform",
    "ramp_rate": "collision: inflow height growth per time level",
    "base_height": "collision: inflow height at level 0",
    "band_mode": "collision: fastest (one node per side) | inward (all inward nodes)",
    "sides": "collision: enabled sides, any of L R B T",
    "uniform_value": "uniform: initial and boundary density",
    "snapshots": "comma-separated time levels to export (empty: final level)",
    "eps_div": "density below which velocity is undefined",
    "output": "output directory",
    "threads": "worker threads for the mixer (0: all available)",
}

_AUTO = {"s", "tol_picard"}
_FIELDS = {f.name: f for f in dataclasses.fields(Config)}


def _convert(key: str, raw: str):
    kind = _FIELDS[key].type
    if key in _AUTO and raw.lower() == "auto":
        return None
    if key == "snapshots":
        parts = [p.strip() for p in raw.split(",") if p.strip()]
        return [int(p) for p in parts]
    if kind == "int":
        return int(raw)
    if kind in ("float", "float | None"):
        return float(raw)
    return raw


def validate(cfg: Config) -> None:
    """Raise :class:`ConfigurationError` naming the first bad key."""

    def bad(key: str, msg: str):
        raise ConfigurationError(f"{key}: {msg}")

    build_space_grid(cfg.L1, cfg.L2, cfg.M1, cfg.M2)
    build_velocity_grid(cfg.ah1, cfg.ah2, cfg.MR1, cfg.PR1, cfg.MR2, cfg.PR2)
    build_time_grid(cfg.T, cfg.N)
    if not cfg.nu >= 0:
        bad("nu", "must be ≥ 0")
    if not cfg.kappa >= 0:
        bad("kappa", "must be ≥ 0")
    if cfg.s is not None and not cfg.s > 0:
        bad("s", "must be > 0 or auto")
    if not cfg.tol_linear > 0:
        bad("tol_linear", "must be > 0")
    if cfg.tol_picard is not None and not cfg.tol_picard > 0:
        bad("tol_picard", "must be > 0 or auto")
    if cfg.max_linear_iters < 1:
        bad("max_linear_iters", "must be ≥ 1")
    if cfg.max_picard_iters < 1:
        bad("max_picard_iters", "must be ≥ 1")
    if cfg.scenario not in SCENARIOS:
        bad("scenario", f"must be one of {', '.join(SCENARIOS)}")
    if not cfg.ramp_rate >= 0:
        bad("ramp_rate", "must be ≥ 0")
    if not cfg.base_height >= 0:
        bad("base_height", "must be ≥ 0")
    if cfg.band_mode not in ("fastest", "inward"):
        bad("band_mode", "must be fastest or inward")
    if set(cfg.sides) - set("LRBT"):
        bad("sides", "may only contain the letters L, R, B, T")
    for step in cfg.snapshots:
        if not 0 <= step <= cfg.N:
            bad("snapshots", f"level {step} outside 0..{cfg.N}")
    if not cfg.eps_div > 0:
        bad("eps_div", "must be > 0")
    if cfg.threads < 0:
        bad("threads", "must be ≥ 0")


def parse_config(text: str) -> Config:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {body!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FIELDS:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: {key}: given twice")
        try:
            values[key] = (lineno, _convert(key, raw))
        except ValueError:
            raise ConfigurationError(
                f"line {lineno}: {key}: malformed value {raw!r}"
            ) from None
    cfg = Config(**{k: v for k, (_, v) in values.items()})
    try:
        validate(cfg)
    except ConfigurationError as err:
        key = str(err).split(":", 1)[0]
        if key in values:
            raise ConfigurationError(f"line {values[key][0]}: {err}") from None
        raise
    return cfg


def _format(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: Config, include_runtime: bool = True) -> str:
    """Resolved config in the input format. ``output`` and ``threads`` are
    left out when ``include_runtime`` is false since they do not change
    results."""
    lines = []
    for name in _FIELDS:
        if not include_runtime and name in ("output", "threads"):
            continue
        lines.append(f"{name} = {_format(getattr(cfg, name))}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: Config) -> str:
    return hashlib.sha256(dump_config(cfg, include_runtime=False).encode()).hexdigest()


def help_text() -> str:
    defaults = Config()
    return "\n".join(
        f"  {name:<17} {HELP[name]} (default: {_format(getattr(defaults, name)) or 'final level'})"
        for name in _FIELDS
    )
