"""Batch sweeps over power, sideband frequency and damping rates.

Each sweep reads a flat JSON config, evaluates a grid and writes a CSV file
(``#``-prefixed metadata lines, then a header row) plus a JSON summary next
to it. Output is byte-deterministic: rows are emitted in grid order and
floats use the shortest round-trip representation.
"""

from __future__ import annotations

import enum
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    DomainError,
    LevMirrorError,
    NoRealSteadyState,
    NumericalError,
    UnphysicalStateError,
)
from .gaussian_state import (
    entanglement_entropy,
    max_squeezing,
    purity_check,
    quadrature_variances,
    sideband_covariance,
    submatrices,
)
from .linearization import linearize, stability, stability_map
from .params import SystemParams, validate_regime
from .steady_state import Branch, residual, solve_branches, threshold_power

__all__ = [
    "SweepKind",
    "Grid",
    "SweepConfig",
    "SweepRow",
    "SweepResult",
    "load_config",
    "run_steady_state_report",
    "run_stability_map",
    "run_entanglement_sweep",
    "run_variance_sweep",
    "write_result",
    "format_value",
]

log = logging.getLogger(__name__)

STATUS_OK = "ok"
STATUS_NO_STEADY_STATE = "no_steady_state"
STATUS_UNSTABLE = "unstable"
STATUS_NUMERICAL_ERROR = "numerical_error"

PURITY_FLAG = 1e-6


class SweepKind(enum.Enum):
    STEADY_STATE = "steady-state"
    STABILITY_MAP = "stability-map"
    ENTANGLEMENT = "entangle-sweep"
    VARIANCE = "variance-sweep"


@dataclass(frozen=True)
class Grid:
    """A 1-D grid of ``count`` points from ``lo`` to ``hi``, ``'lin'`` or ``'log'``."""

    lo: float
    hi: float
    count: int
    scale: str = "log"

    def __post_init__(self):
        if self.count < 1:
            raise DomainError(f"grid count must be at least 1, got {self.count}")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.lo > self.hi:
            raise DomainError(f"grid range must be ordered, got [{self.lo}, {self.hi}]")
        if self.scale not in ("lin", "log"):
            raise DomainError(f"grid scale must be 'lin' or 'log', got {self.scale!r}")
        if self.scale == "log" and self.lo <= 0:
            raise DomainError("a log grid needs a positive lower bound")

    def values(self) -> np.ndarray:
        if self.count == 1:
            return np.array([self.lo])
        if self.scale == "log":
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def as_dict(self) -> dict:
        return {"min": self.lo, "max": self.hi, "count": self.count, "scale": self.scale}


DEFAULT_P_GRID = Grid(6e-4, 0.1, 60, "log")
DEFAULT_KAPPA_GRID = Grid(1e5, 1e9, 40, "log")
DEFAULT_GAMMA_GRID = Grid(1e2, 1e7, 40, "log")
DEFAULT_OMEGA_COUNT = 400


@dataclass(frozen=True)
class SweepConfig:
    """Everything a sweep needs.

    ``omega_grid=None`` selects the default per-power grid, log-spaced over
    ``[1e-2 Omega_M, 1e3 g_C]`` with ``omega_count`` points.
    ``p_grid=None`` means the single power stored in ``params``.
    ``branch=None`` is only meaningful for the steady-state report, where it
    selects both branches; the other sweeps default to blue.
    """

    params: SystemParams
    kind: SweepKind
    p_grid: Optional[Grid] = None
    omega_grid: Optional[Grid] = None
    omega_count: int = DEFAULT_OMEGA_COUNT
    kappa_grid: Grid = DEFAULT_KAPPA_GRID
    Gamma_grid: Grid = DEFAULT_GAMMA_GRID
    branch: Optional[Branch] = None
    workers: int = 1
    debug_zero_coupling: bool = False

    def p_values(self) -> np.ndarray:
        if self.p_grid is None:
            return np.array([self.params.p_tilde])
        return self.p_grid.values()

    def with_options(self, **changes) -> "SweepConfig":
        return replace(self, **changes)

    def metadata(self) -> dict:
        meta: dict[str, Any] = {"kind": self.kind.value}
        meta.update(self.params.to_dict())
        if self.kind is SweepKind.STEADY_STATE:
            meta["branch"] = self.branch.value if self.branch else "both"
        else:
            meta["branch"] = (self.branch or Branch.BLUE).value
        if self.p_grid is not None:
            meta["p_tilde_grid"] = self.p_grid.as_dict()
        if self.kind in (SweepKind.ENTANGLEMENT, SweepKind.VARIANCE):
            meta["omega_grid"] = (self.omega_grid.as_dict() if self.omega_grid else
                                  {"min": "1e-2*Omega_M", "max": "1e3*g_C",
                                   "count": self.omega_count, "scale": "log"})
            meta["debug_zero_coupling"] = self.debug_zero_coupling
        if self.kind is SweepKind.STABILITY_MAP:
            meta["kappa_grid"] = self.kappa_grid.as_dict()
            meta["Gamma_grid"] = self.Gamma_grid.as_dict()
        return meta


def _grid_from(data: Mapping, prefix: str, unit: str, default: Optional[Grid]) -> Optional[Grid]:
    lo, hi = data.get(f"{prefix}_min{unit}"), data.get(f"{prefix}_max{unit}")
    if lo is None and hi is None:
        return default
    if lo is None or hi is None:
        raise DomainError(f"config needs both {prefix}_min{unit} and {prefix}_max{unit}")
    base = default or Grid(1.0, 1.0, 1)
    return Grid(float(lo), float(hi), int(data.get(f"{prefix}_count", base.count)),
                str(data.get(f"{prefix}_scale", base.scale)))


def config_from_dict(data: Mapping[str, Any], kind) -> SweepConfig:
    """Build a :class:`SweepConfig` from the flat JSON layout."""
    kind = SweepKind(kind) if not isinstance(kind, SweepKind) else kind
    p_grid = _grid_from(data, "p_tilde", "", None)
    if p_grid is None and "p_tilde" not in data:
        if kind is SweepKind.STABILITY_MAP:
            raise DomainError("stability map config needs p_tilde")
        p_grid = DEFAULT_P_GRID
    overrides = {} if "p_tilde" in data else {"p_tilde": p_grid.lo}
    params = SystemParams.from_dict(data, **overrides)
    branch = data.get("branch")
    return SweepConfig(
        params=params,
        kind=kind,
        p_grid=p_grid,
        omega_grid=_grid_from(data, "omega", "_rad_s", None),
        omega_count=int(data.get("omega_count", DEFAULT_OMEGA_COUNT)),
        kappa_grid=_grid_from(data, "kappa", "_rad_s", DEFAULT_KAPPA_GRID),
        Gamma_grid=_grid_from(data, "Gamma", "_rad_s", DEFAULT_GAMMA_GRID),
        branch=Branch.parse(branch) if branch else None,
        workers=int(data.get("workers", 1)),
        debug_zero_coupling=bool(data.get("debug_zero_coupling", False)),
    )


def load_config(path, kind) -> SweepConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise DomainError(f"{path}: expected a JSON object")
    try:
        return config_from_dict(data, kind)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{path}: {exc}") from exc


@dataclass
class SweepRow:
    """One output row. Physics fields stay ``None`` unless the status allows them."""

    status: str
    p_tilde: Optional[float] = None
    branch: Optional[str] = None
    omega: Optional[float] = None
    kappa: Optional[float] = None
    Gamma: Optional[float] = None
    Delta: Optional[float] = None
    q: Optional[float] = None
    N_c: Optional[float] = None
    Omega_M: Optional[float] = None
    g_C: Optional[float] = None
    stable: Optional[bool] = None
    max_real_part: Optional[float] = None
    residual_photon: Optional[float] = None
    residual_momentum: Optional[float] = None
    residual_force: Optional[float] = None
    kappa_ratio: Optional[float] = None
    detuning_ratio: Optional[float] = None
    regime_ok: Optional[bool] = None
    E2: Optional[float] = None
    E2_from_a: Optional[float] = None
    Var_Q_b: Optional[float] = None
    Var_P_b: Optional[float] = None
    Var_Q_a: Optional[float] = None
    Var_P_a: Optional[float] = None
    min_eig_sigma_b: Optional[float] = None
    max_eig_sigma_b: Optional[float] = None
    purity_deviation: Optional[float] = None


COLUMNS = {
    SweepKind.STEADY_STATE: [
        "p_tilde", "branch", "status", "Delta", "q", "N_c", "Omega_M", "g_C",
        "residual_photon", "residual_momentum", "residual_force",
        "kappa_ratio", "detuning_ratio", "regime_ok", "stable", "max_real_part"],
    SweepKind.STABILITY_MAP: [
        "kappa", "Gamma", "branch", "status", "stable", "max_real_part"],
    SweepKind.ENTANGLEMENT: [
        "p_tilde", "omega", "status", "Delta", "Omega_M", "g_C", "E2", "E2_from_a",
        "purity_deviation"],
    SweepKind.VARIANCE: [
        "p_tilde", "omega", "status", "Delta", "Omega_M", "g_C",
        "Var_Q_b", "Var_P_b", "Var_Q_a", "Var_P_a", "min_eig_sigma_b", "max_eig_sigma_b"],
}


@dataclass
class SweepResult:
    kind: SweepKind
    rows: list
    summary: dict
    metadata: dict = field(default_factory=dict)

    @property
    def columns(self) -> list:
        return COLUMNS[self.kind]

    def column(self, name: str) -> np.ndarray:
        """One column as a float array (``None`` becomes NaN)."""
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name)
                         for r in self.rows], dtype=float)


def format_value(value) -> str:
    """CSV cell text: shortest round-trip float, ``true``/``false``, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _json_clean(obj):
    if isinstance(obj, dict):
        return {str(k): _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def summary_path(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".summary.json")


def write_result(result: SweepResult, out) -> tuple[Path, Path]:
    """Write the CSV and the JSON summary; returns both paths."""
    out = Path(out)
    lines = [f"# {key}: {json.dumps(_json_clean(value), sort_keys=True)}"
             for key, value in result.metadata.items()]
    lines.append(",".join(result.columns))
    for row in result.rows:
        lines.append(",".join(format_value(getattr(row, c)) for c in result.columns))
    try:
        out.write_text("\n".join(lines) + "\n")
        spath = summary_path(out)
        spath.write_text(json.dumps(_json_clean({"metadata": result.metadata,
                                                 **result.summary}),
                                    indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write sweep output {out}: {exc}") from exc
    return out, spath


def _pool_map(fn: Callable, items: Sequence, workers: int) -> list:
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# steady-state report ---------------------------------------------------------

def _steady_rows(p: float, params: SystemParams, branches) -> list:
    pp = params.replace(p_tilde=float(p))
    try:
        solved = solve_branches(pp)
    except NoRealSteadyState:
        return [SweepRow(STATUS_NO_STEADY_STATE, p_tilde=float(p), branch=b.value)
                for b in branches]
    except LevMirrorError:
        return [SweepRow(STATUS_NUMERICAL_ERROR, p_tilde=float(p), branch=b.value)
                for b in branches]
    rows = []
    for b in branches:
        ss = solved[0] if b is Branch.BLUE else solved[1]
        res = residual(ss, pp)
        reg = validate_regime(pp, ss)
        row = SweepRow(STATUS_OK, p_tilde=float(p), branch=b.value, Delta=ss.Delta, q=ss.q,
                       N_c=ss.N_c, residual_photon=res.photon,
                       residual_momentum=res.momentum, residual_force=res.force,
                       kappa_ratio=reg.kappa_ratio, detuning_ratio=reg.detuning_ratio,
                       regime_ok=reg.ok)
        try:
            model = linearize(pp, ss)
            verdict = stability(model)
        except LevMirrorError:
            row.status = STATUS_NUMERICAL_ERROR
        else:
            row.Omega_M, row.g_C = model.Omega_M, model.g_C
            row.stable, row.max_real_part = verdict.stable, verdict.max_real_part
        rows.append(row)
    return rows


def run_steady_state_report(config: SweepConfig) -> SweepResult:
    """Both branches (or the configured one) at every power of the grid,
    with residuals, regime ratios and stability, plus the threshold power."""
    branches = [config.branch] if config.branch else [Branch.BLUE, Branch.RED]
    ps = list(config.p_values())
    job = partial(_steady_rows, params=config.params, branches=branches)
    rows = [r for chunk in _pool_map(job, ps, config.workers) for r in chunk]
    p_min = threshold_power(config.params)
    meta = config.metadata()
    meta["p_tilde_min"] = p_min
    summary = {
        "p_tilde_min": p_min,
        "rows": len(rows),
        "status_counts": _status_counts(rows),
    }
    return SweepResult(SweepKind.STEADY_STATE, rows, summary, meta)


# stability map -----------------------------------------------------------------

def run_stability_map(config: SweepConfig) -> SweepResult:
    """Stability verdict on the ``(kappa, Gamma)`` grid at the configured power."""
    branch = config.branch or Branch.BLUE
    kappas = config.kappa_grid.values()
    Gammas = config.Gamma_grid.values()
    smap = stability_map(config.params, kappas, Gammas, branch, workers=config.workers)
    rows = []
    for i, k in enumerate(kappas):
        for l, G in enumerate(Gammas):
            status = smap.status[i, l]
            re = smap.max_real_part[i, l]
            row = SweepRow(STATUS_OK if status == "stable" else status,
                           kappa=float(k), Gamma=float(G), branch=branch.value)
            if status in ("stable", "unstable"):
                row.stable = status == "stable"
                row.max_real_part = float(re)
            rows.append(row)
    summary = {
        "cells": len(rows),
        "stable_cells": int(np.sum(smap.stable)),
        "status_counts": _status_counts(rows),
    }
    return SweepResult(SweepKind.STABILITY_MAP, rows, summary, config.metadata())


# spectral sweeps ----------------------------------------------------------------

def _model_for(p: float, config: SweepConfig):
    """(model, rows-if-failed). Unstable models are returned with their rows
    pre-marked so the caller can still emit per-omega status rows."""
    branch = config.branch or Branch.BLUE
    pp = config.params.replace(p_tilde=float(p))
    try:
        model = linearize(pp, branch)
    except NoRealSteadyState:
        return None, STATUS_NO_STEADY_STATE
    except LevMirrorError:
        return None, STATUS_NUMERICAL_ERROR
    if config.debug_zero_coupling:
        model = model.replace(g_C=0.0)
    try:
        verdict = stability(model)
    except NumericalError:
        return model, STATUS_NUMERICAL_ERROR
    return model, STATUS_OK if verdict.stable else STATUS_UNSTABLE


def _omega_values(model, config: SweepConfig):
    if config.omega_grid is not None:
        return config.omega_grid.values()
    if model is None:
        return None
    hi = 1e3 * model.g_C if model.g_C > 0 else 1e3 * max(model.kappa, model.Omega_M)
    return Grid(1e-2 * model.Omega_M, hi, config.omega_count, "log").values()


def _covariances(model, omegas):
    """Float covariances on the grid; per-point fallback isolates failures."""
    try:
        return sideband_covariance(model, omegas).sigma, np.zeros(len(omegas), bool)
    except LevMirrorError:
        pass
    sig = np.full((len(omegas), 8, 8), np.nan)
    bad = np.zeros(len(omegas), bool)
    for n, w in enumerate(omegas):
        try:
            sig[n] = sideband_covariance(model, float(w)).sigma
        except LevMirrorError:
            bad[n] = True
    return sig, bad


def _spectral_rows(p: float, config: SweepConfig, kind: SweepKind) -> list:
    model, status = _model_for(p, config)
    omegas = _omega_values(model, config)
    base = {}
    if model is not None:
        base = dict(Delta=model.Delta, Omega_M=model.Omega_M, g_C=model.g_C)
    if omegas is None:
        return [SweepRow(status, p_tilde=float(p))]
    if status != STATUS_OK:
        return [SweepRow(status, p_tilde=float(p), omega=float(w), **base) for w in omegas]
    sig, bad = _covariances(model, omegas)
    rows = []
    for n, w in enumerate(omegas):
        row = SweepRow(STATUS_OK, p_tilde=float(p), omega=float(w), **base)
        if bad[n]:
            row.status = STATUS_NUMERICAL_ERROR
            rows.append(row)
            continue
        s = sig[n]
        try:
            if kind is SweepKind.ENTANGLEMENT:
                ent = entanglement_entropy(s)
                row.E2, row.E2_from_a = float(ent.E2_from_b), float(ent.E2_from_a)
                row.purity_deviation = float(purity_check(s))
            else:
                var = quadrature_variances(s, rtol=1e-8)
                row.Var_Q_b, row.Var_P_b = float(var.Q_b), float(var.P_b)
                row.Var_Q_a, row.Var_P_a = float(var.Q_a), float(var.P_a)
                lo, hi = max_squeezing(submatrices(s)[0])
                row.min_eig_sigma_b, row.max_eig_sigma_b = float(lo), float(hi)
        except (UnphysicalStateError, LevMirrorError) as exc:
            log.warning("p_tilde=%r omega=%r: %s", p, w, exc)
            row.status = STATUS_NUMERICAL_ERROR
        rows.append(row)
    return rows


def _by_power(rows) -> dict:
    groups: dict = {}
    for r in rows:
        groups.setdefault(r.p_tilde, []).append(r)
    return groups


def _status_counts(rows) -> dict:
    counts: dict = {}
    for r in rows:
        counts[r.status] = counts.get(r.status, 0) + 1
    return dict(sorted(counts.items()))


def _run_spectral(config: SweepConfig, kind: SweepKind) -> list:
    job = partial(_spectral_rows, config=config, kind=kind)
    chunks = _pool_map(job, list(config.p_values()), config.workers)
    return [r for chunk in chunks for r in chunk]


def run_entanglement_sweep(config: SweepConfig) -> SweepResult:
    """``E2`` over the ``(p_tilde, omega)`` grid with a per-power peak summary."""
    rows = _run_spectral(config, SweepKind.ENTANGLEMENT)
    peaks = []
    for p, group in _by_power(rows).items():
        ok = [r for r in group if r.status == STATUS_OK]
        entry = {"p_tilde": p, "status": group[0].status if not ok else STATUS_OK,
                 "peak_E2": None, "peak_omega": None}
        if ok:
            best = max(ok, key=lambda r: r.E2)
            entry["peak_E2"], entry["peak_omega"] = best.E2, best.omega
            worst = max(r.purity_deviation for r in ok)
            entry["max_purity_deviation"] = worst
            if worst > PURITY_FLAG:
                log.info("p_tilde=%r: float64 purity deviation %.3g exceeds %.0e",
                         p, worst, PURITY_FLAG)
        peaks.append(entry)
    summary = {"peaks": peaks, "status_counts": _status_counts(rows)}
    return SweepResult(SweepKind.ENTANGLEMENT, rows, summary, config.metadata())


def run_variance_sweep(config: SweepConfig) -> SweepResult:
    """Quadrature variances and ``sigma_b`` eigenvalues over the grid, with the
    per-power minimum of ``Var(Q_b)`` and of the smallest eigenvalue."""
    rows = _run_spectral(config, SweepKind.VARIANCE)
    minima = []
    for p, group in _by_power(rows).items():
        ok = [r for r in group if r.status == STATUS_OK]
        entry = {"p_tilde": p, "status": group[0].status if not ok else STATUS_OK}
        if ok:
            q = min(ok, key=lambda r: r.Var_Q_b)
            e = min(ok, key=lambda r: r.min_eig_sigma_b)
            entry.update(
                min_Var_Q_b=q.Var_Q_b, min_Var_Q_b_omega=q.omega,
                min_eig_at_that_omega=q.min_eig_sigma_b,
                relative_gap=(q.Var_Q_b - q.min_eig_sigma_b) / q.Var_Q_b,
                min_eig_sigma_b=e.min_eig_sigma_b, min_eig_omega=e.omega)
        minima.append(entry)
    summary = {"minima": minima, "status_counts": _status_counts(rows)}
    return SweepResult(SweepKind.VARIANCE, rows, summary, config.metadata())


RUNNERS = {
    SweepKind.STEADY_STATE: run_steady_state_report,
    SweepKind.STABILITY_MAP: run_stability_map,
    SweepKind.ENTANGLEMENT: run_entanglement_sweep,
    SweepKind.VARIANCE: run_variance_sweep,
}

