"""Experiment runners producing flat, self-describing result tables."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache, partial

import numpy as np

from . import states
from .config import ExperimentConfig
from .errors import ConfigError, DegenerateInputError, NumericalError
from .floquet import (
    DimerParams,
    DriveParams,
    FloquetOperator,
    build_dimer_floquet,
    build_kicked_ising,
    build_self_dual,
)
from .krylov import amplitudes_chain, arnoldi
from .observables import (
    default_saturation_window,
    default_slope_window,
    dispersion,
    magnetization_series,
    rescale,
    saturation_value,
    slope_fit,
    spread_complexity,
    spread_entropy,
)
from .spectral import (
    R_GOE,
    R_POISSON,
    sample_goe_r,
    sample_poisson_r,
    spacing_histogram,
    spectral_stats,
)
from .statespace import SpinBasis, angular_momentum_operators, parity_sector, total_spin_operator

log = logging.getLogger(__name__)

# more than this fraction of zero gaps leaves the ratio statistic meaningless
DEGENERATE_FRACTION = 0.5


@dataclass
class Table:
    columns: list[str]
    rows: list[dict] = field(default_factory=list)

    def add(self, row: dict) -> None:
        for key in row:
            if key not in self.columns:
                self.columns.append(key)
        self.rows.append(row)

    def column(self, name: str) -> list:
        return [r.get(name) for r in self.rows]

    def __len__(self) -> int:
        return len(self.rows)


@dataclass
class Model:
    """Everything needed to run one parameter point."""

    U: FloquetOperator
    Jz: np.ndarray
    h0_state: np.ndarray


@lru_cache(maxsize=8)
def _sector(N: int):
    return parity_sector(SpinBasis(N))


@lru_cache(maxsize=8)
def _chain_jz(N: int, sector: str) -> np.ndarray:
    jz = total_spin_operator(SpinBasis(N), "z").matrix
    if sector == "positive-parity":
        v = _sector(N).isometry
        jz = v.T @ jz @ v
    return jz


def build_model(cfg: ExperimentConfig, point: dict) -> Model:
    if cfg.model == "dimer":
        U = build_dimer_floquet(DimerParams(j=cfg.j, k=point["k"], mu=point["mu"], T=point["T"]))
        _, _, jz = angular_momentum_operators(cfg.j)
        return Model(U, jz.matrix, states.jx_top_state(cfg.j))
    sector = _sector(cfg.N) if cfg.sector == "positive-parity" else None
    if cfg.model == "self-dual":
        U = build_self_dual(cfg.N, sector)
    else:
        params = DriveParams(
            J=point["J"], b=point["b"], phi=point["phi"], gamma=point.get("gamma", 0.0), T=point["T"], N=cfg.N
        )
        U = build_kicked_ising(params, sector)
    return Model(U, _chain_jz(cfg.N, cfg.sector), states.all_up(SpinBasis(cfg.N), sector))


def initial_states(cfg: ExperimentConfig, model: Model) -> list[tuple[object, np.ndarray]]:
    init = cfg.initial_state
    if init.kind == "h0-eigenstate":
        return [(0, model.h0_state)]
    if init.kind == "uniform":
        return [(0, states.uniform(model.U.dim))]
    return list(enumerate(states.random_draws(model.U.dim, init.count, init.seed)))


def _context(cfg: ExperimentConfig, point: dict, state_label) -> dict:
    row = {"model": cfg.model, **cfg.size_label(), "sector": cfg.sector}
    row.update(point)
    row["initial_state"] = cfg.initial_state.kind
    row["draw"] = state_label
    return row


def _steps_for(cfg: ExperimentConfig, krylov_dim: int) -> tuple[int, int, int]:
    burn, window = default_saturation_window(krylov_dim)
    burn = cfg.burn_in if cfg.burn_in is not None else burn
    window = cfg.window if cfg.window is not None else window
    steps = cfg.steps if cfg.steps is not None else burn + window
    return burn, window, steps


def _krylov_run(cfg: ExperimentConfig, U: FloquetOperator, psi0: np.ndarray) -> dict:
    data = arnoldi(U.matrix, psi0)
    d_k = data.krylov_dim
    burn, window, steps = _steps_for(cfg, d_k)
    traj = amplitudes_chain(data, steps)
    C = spread_complexity(traj)
    S = spread_entropy(traj)
    if d_k == 1:
        log.warning("Krylov dimension 1: the initial state is an eigenstate, complexity stays zero")
    slope_window = cfg.slope_window or default_slope_window(d_k)
    slope = slope_fit(C, min(slope_window, len(C))) if len(C) >= 2 else float("nan")
    sat = saturation_value(traj, burn, window) if steps + 1 >= burn + window else float("nan")
    if d_k >= 2:
        disp = dispersion(data)
        sig = (disp.sigma_sub, disp.sigma_diag_re, disp.sigma_diag_im)
    else:
        sig = (float("nan"),) * 3
    return {
        "data": data,
        "C": C,
        "S": S,
        "summary": {
            "krylov_dim": d_k,
            "halted_early": data.halted_early,
            "steps": steps,
            "saturation": sat,
            "slope": slope,
            "sigma_sub": sig[0],
            "sigma_diag_re": sig[1],
            "sigma_diag_im": sig[2],
            "max_excess_over_bound": float(np.max(C - np.arange(len(C)))),
        },
    }


def _complexity_point(cfg: ExperimentConfig, point: dict) -> dict[str, list[dict]]:
    model = build_model(cfg, point)
    out = {"timeseries": [], "coefficients": [], "summary": []}
    runs = []
    for label, psi0 in initial_states(cfg, model):
        run = _krylov_run(cfg, model.U, psi0)
        runs.append(run)
        ctx = _context(cfg, point, label)
        for j, (c, s) in enumerate(zip(run["C"], run["S"])):
            out["timeseries"].append({**ctx, "step": j, "complexity": c, "entropy": s})
        data = run["data"]
        sub = np.concatenate([[np.nan], data.subdiagonal])
        for n in range(data.krylov_dim):
            h = data.h[n, n]
            out["coefficients"].append(
                {**ctx, "n": n, "h_sub": sub[n], "h_diag_re": h.real, "h_diag_im": h.imag}
            )
        out["summary"].append({**ctx, **run["summary"]})
    if len(runs) > 1:
        ctx = _context(cfg, point, "mean")
        n_steps = min(len(r["C"]) for r in runs)
        C = np.mean([r["C"][:n_steps] for r in runs], axis=0)
        S = np.mean([r["S"][:n_steps] for r in runs], axis=0)
        for j in range(n_steps):
            out["timeseries"].append({**ctx, "step": j, "complexity": C[j], "entropy": S[j]})
        keys = [k for k in runs[0]["summary"] if k != "halted_early"]
        out["summary"].append(
            {**ctx, **{k: float(np.mean([r["summary"][k] for r in runs])) for k in keys},
             "halted_early": any(r["summary"]["halted_early"] for r in runs)}
        )
    return out


def _spectral_point(cfg: ExperimentConfig, point: dict) -> dict[str, list[dict]]:
    model = build_model(cfg, point)
    stats = spectral_stats(model.U.matrix)
    ctx = {"model": cfg.model, **cfg.size_label(), "sector": cfg.sector, **point}
    degenerate = stats.degeneracies > DEGENERATE_FRACTION * stats.dim
    if degenerate:
        log.warning("spectrum at %s is massively degenerate; eta is not meaningful", point)
    row = {
        **ctx,
        "dim": stats.dim,
        "r_mean": stats.r_mean,
        "eta": float("nan") if degenerate else stats.eta,
        "degeneracies": stats.degeneracies,
        "flag": "degenerate-spectrum" if degenerate else "",
    }
    hist_rows = []
    if "histogram" in cfg.outputs:
        hist = spacing_histogram(stats.phases, bins=cfg.bins)
        for lo, hi, dens, p, w in zip(hist.edges[:-1], hist.edges[1:], hist.density, hist.poisson, hist.wigner):
            hist_rows.append({**ctx, "bin_left": lo, "bin_right": hi, "density": dens, "poisson": p, "wigner": w,
                              "overflow": hist.overflow})
    return {"spectral": [row], "histogram": hist_rows}


SWEEP_OBSERVABLES = ("sigma_sub", "sigma_diag_re", "sigma_diag_im", "saturation", "slope", "eta", "jz_mean")


def _sweep_point(cfg: ExperimentConfig, point: dict) -> dict[str, list[dict]]:
    model = build_model(cfg, point)
    stats = spectral_stats(model.U.matrix)
    per_state = []
    for _, psi0 in initial_states(cfg, model):
        run = _krylov_run(cfg, model.U, psi0)
        steps = run["summary"]["steps"]
        _, jz_mean = magnetization_series(model.U.matrix, psi0, model.Jz, steps)
        per_state.append({**run["summary"], "jz_mean": jz_mean})
    row = {"model": cfg.model, **cfg.size_label(), "sector": cfg.sector, **point}
    row["initial_state"] = cfg.initial_state.kind
    row["draws"] = len(per_state)
    for key in ("krylov_dim", "saturation", "slope", "sigma_sub", "sigma_diag_re", "sigma_diag_im", "jz_mean"):
        row[key] = float(np.mean([s[key] for s in per_state]))
    row["max_excess_over_bound"] = max(s["max_excess_over_bound"] for s in per_state)
    row["r_mean"] = stats.r_mean
    row["eta"] = stats.eta
    row["degeneracies"] = stats.degeneracies
    return {"sweep": [row]}


def _guarded(worker, cfg: ExperimentConfig, point: dict):
    try:
        return worker(cfg, point)
    except (NumericalError, np.linalg.LinAlgError) as exc:
        raise NumericalError(f"at parameter point {point}: {exc}") from exc


def _run_points(cfg: ExperimentConfig, worker, points: list[dict]) -> list[dict[str, list[dict]]]:
    """Evaluate every point; output order follows ``points`` whatever the scheduling."""
    task = partial(_guarded, worker, cfg)
    if cfg.workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(task, points))
    return [task(p) for p in points]


def _collect(results: list[dict[str, list[dict]]], names: list[str]) -> dict[str, Table]:
    tables = {name: Table([]) for name in names}
    for res in results:
        for name in names:
            for row in res.get(name, []):
                tables[name].add(row)
    return tables


def run_complexity(cfg: ExperimentConfig) -> dict[str, Table]:
    results = _run_points(cfg, _complexity_point, cfg.points())
    return _collect(results, ["summary", "timeseries", "coefficients"])


def run_spectral(cfg: ExperimentConfig) -> dict[str, Table]:
    results = _run_points(cfg, _spectral_point, cfg.points())
    return _collect(results, ["spectral", "histogram"])


def run_sweep(cfg: ExperimentConfig) -> dict[str, Table]:
    swept = cfg.swept()
    if not 1 <= len(swept) <= 2 and len(cfg.points()) > 1:
        raise ConfigError(f"sweep needs one or two swept parameters, got {list(swept) or 'none'}")
    results = _run_points(cfg, _sweep_point, cfg.points())
    tables = _collect(results, ["sweep"])
    sweep = tables["sweep"]
    if len(sweep) >= 2:
        tables["rescaled"] = rescaled_table(sweep, [*cfg.active_params()], SWEEP_OBSERVABLES)
    return tables


def rescaled_table(table: Table, keep: list[str], observables) -> Table:
    out = Table([])
    scaled = {}
    for name in observables:
        values = np.array(table.column(name), dtype=float)
        try:
            scaled[name] = rescale(values)
        except DegenerateInputError:
            log.warning("column %s is constant across the sweep; skipped in the rescaled table", name)
    for i, row in enumerate(table.rows):
        base = {k: row[k] for k in row if k not in observables}
        out.add({**base, **{name: float(vals[i]) for name, vals in scaled.items()}})
    return out


def calibrate_rmt(
    seed: int = 0, poisson_levels: int = 100_000, goe_dim: int = 1000, goe_samples: int = 50
) -> Table:
    """Monte Carlo estimates of the Poisson and GOE ratio statistics."""
    poisson_seq, goe_seq = np.random.SeedSequence(seed).spawn(2)
    r_p = sample_poisson_r(poisson_levels, np.random.default_rng(poisson_seq))
    goe_rngs = [np.random.default_rng(s) for s in goe_seq.spawn(goe_samples)]
    r_goe = float(np.mean([sample_goe_r(goe_dim, rng) for rng in goe_rngs]))
    table = Table([])
    table.add({"ensemble": "poisson", "samples": 1, "levels": poisson_levels, "r_mean": r_p,
               "reference": R_POISSON, "deviation": r_p - R_POISSON, "seed": seed})
    table.add({"ensemble": "goe", "samples": goe_samples, "levels": goe_dim, "r_mean": r_goe,
               "reference": R_GOE, "deviation": r_goe - R_GOE, "seed": seed})
    return table


def _format_value(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    if value is None:
        return ""
    return str(value)


def table_to_csv(table: Table) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_format_value(row.get(c)) for c in table.columns])
    return buf.getvalue()


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return None if not math.isfinite(value) else float(format(value, ".12g"))
    if isinstance(value, np.integer):
        return int(value)
    return value


def table_to_jsonl(table: Table) -> str:
    lines = [json.dumps({c: _json_value(row.get(c)) for c in table.columns}) for row in table.rows]
    return "".join(line + "\n" for line in lines)


def emit(table: Table, fmt: str, path: str, force: bool = False) -> None:
    if fmt == "csv":
        text = table_to_csv(table)
    elif fmt in ("jsonl", "json-lines"):
        text = table_to_jsonl(table)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if os.path.exists(path) and not force:
        raise FileExistsError(f"{path} exists; pass --force to overwrite")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)
