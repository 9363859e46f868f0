"""Experiment configuration: YAML files, grid expansion, named presets."""

from __future__ import annotations

import ast
import itertools
import math
import operator
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from .errors import ConfigError

MODELS = ("kicked-ising", "kicked-ising-nonlocal", "self-dual", "dimer")
SECTORS = ("full", "positive-parity")
STATE_KINDS = ("h0-eigenstate", "uniform", "random")
GRID_KEYS = ("J", "b", "phi", "gamma", "T", "k", "mu")
MODEL_PARAMS = {
    "kicked-ising": ("J", "b", "phi", "T"),
    "kicked-ising-nonlocal": ("J", "b", "phi", "gamma", "T"),
    "self-dual": (),
    "dimer": ("k", "mu", "T"),
}

KEY_HELP = {
    "model": "one of " + ", ".join(MODELS),
    "N": "number of spins for the chain models",
    "j": "total spin of the dimer (N = 2j bosons)",
    "J, b, phi, gamma, T": "chain couplings, tilt angle, all-to-all coupling, drive period",
    "k, mu": "dimer interaction and kick strength",
    "sector": "full | positive-parity (chains only)",
    "initial_state": "mapping {kind: h0-eigenstate|uniform|random, count: int, seed: int}",
    "steps": "number of kicks (default burn_in + window)",
    "burn_in, window": "saturation averaging range [burn_in, burn_in + window) (default 2 D_K, 10 D_K)",
    "slope_window": "steps used for the initial slope fit (default min(20, D_K // 4))",
    "bins": "spacing histogram bins",
    "outputs": "tables to write; complexity: timeseries, coefficients, summary; spectral: spectral, histogram",
    "workers": "worker processes for parameter points",
}
GRID_HELP = (
    "Coupling values may be a number, an expression such as 'pi/3', a list of those, "
    "or a mapping {start, stop, count} for an inclusive linear grid."
)

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv, ast.Pow: operator.pow}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id == "pi":
        return math.pi
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_expr(node.operand)
        return -val if isinstance(node.op, ast.USub) else val
    raise ValueError("unsupported expression")


def parse_number(value, key: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(_eval_expr(ast.parse(value.strip(), mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{key}: cannot read {value!r} as a number (use e.g. 0.5 or 'pi/3')") from exc
    raise ConfigError(f"{key}: expected a number, got {value!r}")


def parse_grid(value, key: str) -> tuple[float, ...]:
    if isinstance(value, dict):
        missing = {"start", "stop", "count"} - set(value)
        if missing:
            raise ConfigError(f"{key}: grid mapping is missing {sorted(missing)}")
        start, stop = parse_number(value["start"], key), parse_number(value["stop"], key)
        count = value["count"]
        if not isinstance(count, int) or count < 1:
            raise ConfigError(f"{key}: grid count must be a positive integer, got {count!r}")
        if count == 1:
            return (start,)
        step = (stop - start) / (count - 1)
        return tuple(start + i * step for i in range(count - 1)) + (stop,)
    if isinstance(value, (list, tuple)):
        if not value:
            raise ConfigError(f"{key}: grid list is empty")
        return tuple(parse_number(v, key) for v in value)
    return (parse_number(value, key),)


@dataclass(frozen=True)
class InitialState:
    kind: str = "h0-eigenstate"
    count: int = 1
    seed: int | None = None

    def labels(self) -> list[int]:
        return list(range(self.count if self.kind == "random" else 1))


@dataclass(frozen=True)
class ExperimentConfig:
    model: str = "kicked-ising"
    N: int = 10
    j: float = 100
    J: tuple[float, ...] = (1.0,)
    b: tuple[float, ...] = (1.0,)
    phi: tuple[float, ...] = (math.pi / 3,)
    gamma: tuple[float, ...] = (0.0,)
    T: tuple[float, ...] = (1.0,)
    k: tuple[float, ...] = (1.0,)
    mu: tuple[float, ...] = (3.0,)
    sector: str = "positive-parity"
    initial_state: InitialState = field(default_factory=InitialState)
    steps: int | None = None
    burn_in: int | None = None
    window: int | None = None
    slope_window: int | None = None
    bins: int = 30
    outputs: tuple[str, ...] = ()
    workers: int = 1

    def active_params(self) -> tuple[str, ...]:
        return MODEL_PARAMS[self.model]

    def swept(self) -> tuple[str, ...]:
        return tuple(k for k in self.active_params() if len(getattr(self, k)) > 1)

    def size_label(self) -> dict:
        return {"j": self.j} if self.model == "dimer" else {"N": self.N}

    def points(self) -> list[dict]:
        """Cartesian product of the active grids, in ascending parameter order."""
        names = self.active_params()
        grids = [sorted(getattr(self, n)) for n in names]
        return [dict(zip(names, combo)) for combo in itertools.product(*grids)]


def _positive_int(value, key: str, allow_none: bool = True):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ConfigError(f"{key}: expected a positive integer, got {value!r}")
    return value


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a mapping of keys to values")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)} (see --help for the list)")
    kw = {}
    model = raw.get("model", "kicked-ising")
    if model not in MODELS:
        raise ConfigError(f"model must be one of {MODELS}, got {model!r}")
    kw["model"] = model
    for key in GRID_KEYS:
        if key in raw:
            kw[key] = parse_grid(raw[key], key)
    if "N" in raw:
        kw["N"] = _positive_int(raw["N"], "N", allow_none=False)
    if "j" in raw:
        j = parse_number(raw["j"], "j")
        if j <= 0 or (2 * j) != int(2 * j):
            raise ConfigError(f"j: 2j must be a positive integer, got {raw['j']!r}")
        kw["j"] = int(j) if j == int(j) else j
    sector = raw.get("sector", "full" if model == "dimer" else "positive-parity")
    if sector not in SECTORS:
        raise ConfigError(f"sector must be one of {SECTORS}, got {sector!r}")
    if model == "dimer" and sector != "full":
        raise ConfigError("the dimer has no reflection sector; use sector: full")
    kw["sector"] = sector
    kw["initial_state"] = _parse_initial_state(raw.get("initial_state", {}))
    for key in ("steps", "window", "slope_window", "workers", "bins"):
        if key in raw:
            kw[key] = _positive_int(raw[key], key, allow_none=key not in ("workers", "bins"))
    if "burn_in" in raw:
        if raw["burn_in"] is not None and (not isinstance(raw["burn_in"], int) or raw["burn_in"] < 0):
            raise ConfigError(f"burn_in: expected a non-negative integer, got {raw['burn_in']!r}")
        kw["burn_in"] = raw["burn_in"]
    if "outputs" in raw:
        outs = raw["outputs"]
        if isinstance(outs, str):
            outs = [outs]
        kw["outputs"] = tuple(str(o) for o in outs)
    cfg = ExperimentConfig(**kw)
    _validate(cfg, raw)
    return cfg


def _parse_initial_state(raw) -> InitialState:
    if isinstance(raw, str):
        raw = {"kind": raw}
    if not isinstance(raw, dict):
        raise ConfigError(f"initial_state must be a mapping, got {raw!r}")
    kind = raw.get("kind", "h0-eigenstate")
    if kind not in STATE_KINDS:
        raise ConfigError(f"initial_state.kind must be one of {STATE_KINDS}, got {kind!r}")
    count = raw.get("count", 5 if kind == "random" else 1)
    count = _positive_int(count, "initial_state.count", allow_none=False)
    seed = raw.get("seed")
    if kind == "random" and seed is None:
        raise ConfigError("initial_state.seed is required for random initial states (or pass --seed)")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
        raise ConfigError(f"initial_state.seed must be a non-negative integer, got {seed!r}")
    return InitialState(kind, count, seed)


def _validate(cfg: ExperimentConfig, raw: dict) -> None:
    if any(not 0.0 <= p <= math.pi / 2 + 1e-12 for p in cfg.phi):
        raise ConfigError("phi values must lie in [0, pi/2]")
    if any(t <= 0 for t in cfg.T):
        raise ConfigError("drive period T must be positive")
    if cfg.model == "kicked-ising" and any(g != 0 for g in cfg.gamma):
        raise ConfigError("gamma is only used by model kicked-ising-nonlocal")
    if cfg.model == "self-dual" and cfg.N < 2:
        raise ConfigError("self-dual chain needs N >= 2")


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = {}
    for f in fields(cfg):
        val = getattr(cfg, f.name)
        if f.name in GRID_KEYS:
            val = val[0] if len(val) == 1 else list(val)
        elif f.name == "initial_state":
            val = {k: v for k, v in asdict(val).items() if v is not None}
            if val["kind"] != "random":
                val.pop("count")
        elif f.name == "outputs":
            val = list(val)
        out[f.name] = val
    return out


def dump_config(cfg: ExperimentConfig) -> str:
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def load_config(text: str) -> ExperimentConfig:
    try:
        raw = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse configuration: {exc}") from exc
    return config_from_dict(raw)


def apply_overrides(cfg: ExperimentConfig, overrides: dict) -> ExperimentConfig:
    merged = config_to_dict(cfg)
    for key, value in overrides.items():
        if key.startswith("initial_state."):
            merged["initial_state"] = {**merged["initial_state"], key.split(".", 1)[1]: value}
        else:
            merged[key] = value
    return config_from_dict(merged)


PI = math.pi
PRESETS: dict[str, dict] = {
    "fig1": {"model": "kicked-ising", "N": 11, "phi": {"start": PI / 40, "stop": PI / 2, "count": 20}},
    "fig2": {"model": "kicked-ising", "N": 13, "phi": ["pi/30", "pi/3"], "outputs": ["spectral", "histogram"]},
    "fig3": {"model": "kicked-ising", "N": 10, "phi": ["pi/30", "pi/3"], "outputs": ["coefficients", "summary"]},
    "fig4": {"model": "kicked-ising", "N": 10, "phi": ["pi/30", "pi/6", "pi/3"], "outputs": ["timeseries", "summary"]},
    "fig5": {"model": "kicked-ising", "N": 10, "phi": {"start": PI / 30, "stop": PI / 2, "count": 15}},
    "fig6": {"model": "kicked-ising", "N": 10, "phi": {"start": PI / 30, "stop": PI / 2, "count": 15}},
    "fig7": {"model": "kicked-ising-nonlocal", "N": 10, "phi": "pi/2", "gamma": [0.0, 0.05, 0.1, 0.2, 0.4]},
    "fig8": {"model": "kicked-ising", "N": 10, "phi": "pi/3", "T": [0.05, 0.2, 0.5, 1.0], "outputs": ["coefficients", "timeseries", "summary"]},
    "fig9": {"model": "kicked-ising", "N": 10, "phi": "pi/3", "T": [0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0]},
    "figA": {"model": "self-dual", "N": 8, "steps": 100, "outputs": ["coefficients", "timeseries", "summary"]},
    "figC": {"model": "dimer", "j": 100, "mu": [3.0, 6.0], "k": {"start": 0.5, "stop": 8.0, "count": 16}},
}
PRESET_COMMAND = {
    "fig1": "spectral", "fig2": "spectral", "fig3": "complexity", "fig4": "complexity",
    "fig5": "sweep", "fig6": "sweep", "fig7": "sweep", "fig8": "complexity", "fig9": "sweep",
    "figA": "complexity", "figC": "sweep",
}


def preset(name: str) -> ExperimentConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(PRESETS)}")
    return config_from_dict(PRESETS[name])


def with_seed(cfg: ExperimentConfig, seed: int) -> ExperimentConfig:
    return replace(cfg, initial_state=replace(cfg.initial_state, seed=seed))
