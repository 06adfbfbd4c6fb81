"""Simulation harness: entropy curves, sample-size sweeps, condition
batteries, and the Spearman-based pair ranking, all emitting CSV files.

Reported per-parameter values are negative entropies (equivalently MI
estimates), the quantity predicted to increase with the dependence
parameter. For fgm/amh the prediction is per sign branch: increasing in
|theta|.
"""

from __future__ import annotations

import csv
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy import stats as _sstats

from .estimation import (
    EntropyEstimate,
    mutual_information,
    spearman_analytic,
    spearman_sample,
)
from .families import log_pdf
from .models import (
    ConfigError,
    CopulaModel,
    CountError,
    DEFAULT_DELTA,
    DEFAULT_NU,
    DegenerateDataError,
    ParameterError,
    default_theta_grid,
)
from .sampling import derive_seed, pseudo_observations, sample, sample_many
from .verification import GridSpec, TheoremConditionSummary, verify_theorem_conditions

_ABS_BRANCH_FAMILIES = ("fgm", "amh")


def worker_count() -> int:
    env = os.environ.get("COPULA_LAB_THREADS", "")
    if env.strip():
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigError(f"COPULA_LAB_THREADS={env!r} is not an integer") from exc
        if n < 1:
            raise ConfigError("COPULA_LAB_THREADS must be >= 1")
        return n
    return os.cpu_count() or 1


@dataclass
class ExperimentConfig:
    family: str
    theta_grid: Optional[Sequence[float]] = None
    delta: Optional[float] = None
    nu: Optional[float] = None
    dim: int = 2
    samples_m: int = 1000
    repetitions_r: int = 50
    seed: int = 0
    output_path: Optional[str] = None
    render_figure: bool = True

    def __post_init__(self):
        if self.family == "independence":
            raise ConfigError("the independence copula has no parameter to sweep")
        if self.theta_grid is None:
            self.theta_grid = default_theta_grid(self.family)
        self.theta_grid = [float(t) for t in self.theta_grid]
        if len(self.theta_grid) == 0:
            raise ConfigError("empty theta grid")
        if any(b <= a for a, b in zip(self.theta_grid[:-1], self.theta_grid[1:])):
            raise ConfigError("theta grid must be strictly increasing")
        if self.family in DEFAULT_DELTA and self.delta is None:
            self.delta = DEFAULT_DELTA[self.family]
        if self.family == "student_t" and self.nu is None:
            self.nu = DEFAULT_NU
        if self.samples_m < 10:
            raise CountError("samples_m must be >= 10")
        if self.repetitions_r < 1:
            raise CountError("repetitions_r must be >= 1")
        try:
            self.models()
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def models(self) -> list[CopulaModel]:
        return [CopulaModel(family=self.family, theta=t, delta=self.delta,
                            nu=self.nu, dim=self.dim)
                for t in self.theta_grid]


@dataclass
class MonotonicityReport:
    family: str
    theta_grid: list
    estimates: list  # EntropyEstimate of the NEGATIVE entropy per theta
    monotone_fraction: float
    rank_correlation: float
    single_point: bool = False

    @property
    def mean_curve(self) -> np.ndarray:
        return np.array([e.mean for e in self.estimates])


@dataclass
class SweepReport:
    family: str
    sample_sizes: list
    mean_monotone_fraction: list
    reps: int


def _neg_entropy_matrix(config: ExperimentConfig, samples_m: int) -> np.ndarray:
    """Negative entropy per (theta, repetition).

    Repetition r draws with seed derive_seed(seed, r) for *every* theta, so
    neighboring parameter values share underlying uniforms within a
    repetition; results are independent of worker scheduling.
    """
    models = config.models()
    rep_seeds = [derive_seed(config.seed, r) for r in range(config.repetitions_r)]
    out = np.empty((len(models), config.repetitions_r))

    def task(i: int) -> None:
        m = models[i]
        blocks = sample_many(m, samples_m, rep_seeds)
        flat = blocks.reshape(-1, blocks.shape[2])
        lp = log_pdf(m, flat).reshape(len(rep_seeds), samples_m)
        out[i, :] = lp.mean(axis=1)

    n_workers = worker_count()
    if n_workers == 1:
        for i in range(len(models)):
            task(i)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as ex:
            list(ex.map(task, range(len(models))))
    return out


def _expected_signs(family: str, grid: Sequence[float]) -> np.ndarray:
    """Direction the mean negative entropy should move between neighbors."""
    g = np.asarray(grid, dtype=float)
    if family in _ABS_BRANCH_FAMILIES:
        return np.sign(np.abs(g[1:]) - np.abs(g[:-1]))
    return np.ones(len(g) - 1)


def _monotone_fraction(family: str, grid, values) -> float:
    signs = _expected_signs(family, grid)
    diffs = np.diff(np.asarray(values, dtype=float))
    informative = signs != 0
    if not np.any(informative):
        return 1.0
    return float(np.mean(diffs[informative] * signs[informative] > 0))


def _rank_correlation(family: str, grid, values) -> float:
    g = np.asarray(grid, dtype=float)
    v = np.asarray(values, dtype=float)
    if family in _ABS_BRANCH_FAMILIES:
        rhos = []
        for mask in (g <= 0, g >= 0):
            if mask.sum() >= 3:
                rhos.append(_sstats.spearmanr(np.abs(g[mask]), v[mask]).statistic)
        return float(min(rhos)) if rhos else 1.0
    return float(_sstats.spearmanr(g, v).statistic)


def run_entropy_curve(config: ExperimentConfig) -> MonotonicityReport:
    """Mean negative entropy with a 95% band per theta; CSV + optional figure."""
    mat = _neg_entropy_matrix(config, config.samples_m)
    estimates = [EntropyEstimate.from_reps(mat[i]) for i in range(mat.shape[0])]
    means = [e.mean for e in estimates]
    single = len(config.theta_grid) < 2
    report = MonotonicityReport(
        family=config.family,
        theta_grid=list(config.theta_grid),
        estimates=estimates,
        monotone_fraction=(1.0 if single
                           else _monotone_fraction(config.family,
                                                   config.theta_grid, means)),
        rank_correlation=(1.0 if single
                          else _rank_correlation(config.family,
                                                 config.theta_grid, means)),
        single_point=single,
    )
    if config.output_path:
        rows = [(t, e.mean, e.lo95, e.hi95, config.repetitions_r, config.samples_m)
                for t, e in zip(config.theta_grid, estimates)]
        _write_csv(config.output_path,
                   ["theta", "mean_neg_entropy", "p025", "p975", "reps", "samples"],
                   rows)
        if config.render_figure:
            from .plots import render_curve_figure
            render_curve_figure(report, _figure_path(config.output_path))
    return report


def run_size_sweep(config: ExperimentConfig, sizes: Sequence[int]) -> SweepReport:
    """Mean per-repetition monotone fraction as a function of sample size."""
    sizes = [int(s) for s in sizes]
    if any(b <= a for a, b in zip(sizes[:-1], sizes[1:])) or not sizes:
        raise ConfigError("sizes must be strictly increasing and nonempty")
    if sizes[0] < 10 or sizes[-1] > 10 ** 7:
        raise ConfigError("sizes must lie within [10, 1e7]")
    fracs = []
    for size in sizes:
        mat = _neg_entropy_matrix(config, size)
        per_rep = [_monotone_fraction(config.family, config.theta_grid, mat[:, r])
                   for r in range(mat.shape[1])]
        fracs.append(float(np.mean(per_rep)))
    report = SweepReport(family=config.family, sample_sizes=sizes,
                         mean_monotone_fraction=fracs, reps=config.repetitions_r)
    if config.output_path:
        rows = [(s, f, config.repetitions_r)
                for s, f in zip(sizes, fracs)]
        _write_csv(config.output_path,
                   ["sample_size", "mean_monotone_fraction", "reps"], rows)
        if config.render_figure:
            from .plots import render_sweep_figure
            render_sweep_figure(report, _figure_path(config.output_path))
    return report


def run_verify(family: str, theta_grid: Sequence[float],
               delta: float | None = None, nu: float | None = None,
               dim: int = 2, grid: GridSpec | None = None, max_order: int = 6,
               mode: str = "auto", seed: int = 0,
               output_path: str | None = None) -> TheoremConditionSummary:
    """Condition battery over a theta grid (order preserved; reversed grids fail)."""
    if family in DEFAULT_DELTA and delta is None:
        delta = DEFAULT_DELTA[family]
    if family == "student_t" and nu is None:
        nu = DEFAULT_NU
    models = [CopulaModel(family=family, theta=float(t), delta=delta, nu=nu, dim=dim)
              for t in theta_grid]
    summary = verify_theorem_conditions(models, grid=grid, max_order=max_order,
                                        mode=mode, seed=seed)
    if output_path:
        rows = [(r.property, family, r.model, str(r.passed).lower(),
                 r.worst_violation,
                 "" if r.worst_location is None else str(r.worst_location))
                for r in summary.reports]
        _write_csv(output_path,
                   ["property", "family", "params", "passed", "worst_violation",
                    "location"], rows)
    return summary


@dataclass
class RankedPair:
    col_i: str
    col_j: str
    abs_spearman: float
    rank: int
    mi_estimate: Optional[float] = None


def _read_numeric_csv(path: str):
    names = None
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        for r_idx, record in enumerate(csv.reader(f)):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            try:
                rows.append([float(cell) for cell in record])
            except ValueError as exc:
                if r_idx == 0 and names is None and not rows:
                    names = [cell.strip() for cell in record]
                    continue
                bad = next(i for i, cell in enumerate(record)
                           if not _is_float(cell))
                raise ConfigError(
                    f"{path}: non-numeric value at row {r_idx + 1}, "
                    f"column {bad + 1}") from exc
    if not rows:
        raise ConfigError(f"{path}: no numeric rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ConfigError(f"{path}: ragged rows (widths {sorted(widths)})")
    data = np.asarray(rows, dtype=float)
    if names is None:
        names = [f"col{i}" for i in range(data.shape[1])]
    return names, data


def _is_float(cell: str) -> bool:
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _fit_theta_to_spearman(family: str, target_abs_rho: float) -> CopulaModel:
    """Bisection on theta so the analytic Spearman matches the sample value."""
    grid = default_theta_grid(family)
    lo, hi = float(grid[0]), float(grid[-1])
    if family in _ABS_BRANCH_FAMILIES:
        lo = 1e-6
    delta = DEFAULT_DELTA.get(family)
    nu = DEFAULT_NU if family == "student_t" else None

    def rho_at(t):
        m = CopulaModel(family=family, theta=t, delta=delta, nu=nu)
        return abs(spearman_analytic(m).value)

    target = min(target_abs_rho, rho_at(hi) - 1e-9)
    target = max(target, rho_at(lo) + 1e-12)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if rho_at(mid) < target:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    return CopulaModel(family=family, theta=t, delta=delta, nu=nu)


def rank_pairs(dataset_csv: str, top_k: int, mi_family: str | None = None,
               mi_samples: int = 20_000, seed: int = 0,
               output_path: str | None = None) -> list[RankedPair]:
    """Rank column pairs of a numeric CSV by |sample Spearman|.

    With ``mi_family`` set, each reported pair also carries a Monte Carlo MI
    estimate under the family fitted by Spearman matching, so the cheap
    ranking can be cross-checked against the information-theoretic one.
    """
    names, data = _read_numeric_csv(dataset_csv)
    m, p = data.shape
    if m < 20:
        raise CountError("need at least 20 rows")
    if p < 2:
        raise ConfigError("need at least 2 columns")
    pseudo = pseudo_observations(data)
    scored = []
    for i in range(p):
        for j in range(i + 1, p):
            try:
                rho = spearman_sample(pseudo, i, j).value
            except DegenerateDataError:
                continue
            scored.append((abs(rho), i, j))
    scored.sort(key=lambda t: (-t[0], t[1], t[2]))
    out = []
    for rank, (arho, i, j) in enumerate(scored[:top_k], start=1):
        mi_est = None
        if mi_family is not None:
            fitted = _fit_theta_to_spearman(mi_family, arho)
            s = sample(fitted, mi_samples, derive_seed(seed, rank))
            mi_est = mutual_information(fitted, s)
        out.append(RankedPair(col_i=names[i], col_j=names[j],
                              abs_spearman=float(arho), rank=rank,
                              mi_estimate=mi_est))
    if output_path:
        header = ["col_i", "col_j", "abs_spearman", "rank"]
        if mi_family is not None:
            header.append("mi_estimate")
        rows = []
        for rp in out:
            row = [rp.col_i, rp.col_j, rp.abs_spearman, rp.rank]
            if mi_family is not None:
                row.append(rp.mi_estimate)
            rows.append(tuple(row))
        _write_csv(output_path, header, rows)
    return out


def _figure_path(csv_path: str) -> str:
    return str(Path(csv_path).with_suffix(".png"))


def _fmt_cell(x) -> str:
    if isinstance(x, (bool, str)):
        return str(x)
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return repr(float(x))


def _write_csv(path: str, header: list[str], rows) -> None:
    # UTF-8, LF endings, '.' decimal; float cells use repr (shortest
    # round-trip) so identical runs are byte-identical
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(x) for x in row])
