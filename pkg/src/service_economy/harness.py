"""Monte Carlo ensembles over seeds and parameter sweeps over grids."""

from __future__ import annotations

import itertools
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional, Sequence

from .engine import run_simulation
from .model import SimParams, SimResult, ValidationError

_U64 = 1 << 64
SEED_POINT_STRIDE = 10_007
SEED_BASE_MULT = 1_000_003


def derive_seeds(base_seed: int, count: int, point_index: int = 0) -> list[int]:
    """Seeds for one grid point: base * 1000003 + point * 10007 + replicate (mod 2**64)."""
    start = base_seed * SEED_BASE_MULT + point_index * SEED_POINT_STRIDE
    return [(start + r) % _U64 for r in range(count)]


def percentile_nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    if not sorted_values:
        raise ValueError("percentile of empty sequence")
    rank = max(1, math.ceil(pct / 100 * len(sorted_values)))
    return sorted_values[rank - 1]


def stopped_lending_when_insolvent(result: SimResult) -> bool:
    """True if the run ends with negative bank capital and made no loans after going under.

    "Going under" is the first week of the final unbroken stretch of
    negative ``cb_balance``.
    """
    weeks = result.weeks
    if weeks[-1].cb_balance >= 0:
        return False
    first_neg = len(weeks) - 1
    while first_neg > 0 and weeks[first_neg - 1].cb_balance < 0:
        first_neg -= 1
    return all(w.loans == 0 for w in weeks[first_neg + 1 :])


@dataclass(frozen=True)
class RunSummary:
    """Per-seed statistics kept by an ensemble."""

    seed: int
    average_weekly_sales: float
    total_sales: int
    total_loans: int
    defaults: int
    final_cb_balance: float
    final_gov_balance: float
    min_cb_balance: float
    negative_compliance_weeks: int
    stopped_lending_insolvent: bool

    @classmethod
    def from_result(cls, result: SimResult) -> "RunSummary":
        w = result.weeks
        return cls(
            seed=result.seed,
            average_weekly_sales=result.average_weekly_sales,
            total_sales=result.total_sales,
            total_loans=sum(r.loans for r in w),
            defaults=len(result.defaults),
            final_cb_balance=w[-1].cb_balance,
            final_gov_balance=w[-1].gov_balance,
            min_cb_balance=min(r.cb_balance for r in w),
            negative_compliance_weeks=sum(1 for r in w if r.compliance < 0),
            stopped_lending_insolvent=stopped_lending_when_insolvent(result),
        )


@dataclass(frozen=True)
class EnsembleSummary:
    params: SimParams
    seeds: tuple[int, ...]
    runs: tuple[RunSummary, ...]
    mean_sales: float
    std_sales: float
    min_sales: float
    max_sales: float
    p01_sales: float
    p99_sales: float
    mean_defaults: float
    frac_any_default: float
    frac_two_plus_defaults: float
    frac_terminal_insolvent: float
    frac_negative_compliance_weeks: float
    mean_final_cb_balance: float
    mean_final_gov_balance: float

    @property
    def seed_count(self) -> int:
        return len(self.seeds)

    @property
    def per_seed_sales(self) -> list[float]:
        return [r.average_weekly_sales for r in self.runs]


def summarize(params: SimParams, runs: Sequence[RunSummary]) -> EnsembleSummary:
    runs = sorted(runs, key=lambda r: r.seed)
    n = len(runs)
    sales = [r.average_weekly_sales for r in runs]
    ordered = sorted(sales)
    return EnsembleSummary(
        params=params,
        seeds=tuple(r.seed for r in runs),
        runs=tuple(runs),
        mean_sales=statistics.fmean(sales),
        std_sales=statistics.pstdev(sales) if n > 1 else 0.0,
        min_sales=ordered[0],
        max_sales=ordered[-1],
        p01_sales=percentile_nearest_rank(ordered, 1),
        p99_sales=percentile_nearest_rank(ordered, 99),
        mean_defaults=statistics.fmean(r.defaults for r in runs),
        frac_any_default=sum(r.defaults >= 1 for r in runs) / n,
        frac_two_plus_defaults=sum(r.defaults >= 2 for r in runs) / n,
        frac_terminal_insolvent=sum(r.final_cb_balance < 0 for r in runs) / n,
        frac_negative_compliance_weeks=(
            sum(r.negative_compliance_weeks for r in runs) / (n * params.weeks)
        ),
        mean_final_cb_balance=statistics.fmean(r.final_cb_balance for r in runs),
        mean_final_gov_balance=statistics.fmean(r.final_gov_balance for r in runs),
    )


def _run_one(args: tuple[SimParams, int]) -> RunSummary:
    params, seed = args
    return RunSummary.from_result(run_simulation(params, seed))


def run_ensemble(
    params: SimParams, seeds: Sequence[int], workers: Optional[int] = None
) -> EnsembleSummary:
    """Run one simulation per seed and aggregate.

    With ``workers`` > 1 runs go to a process pool; results are sorted by
    seed before aggregation, so the summary does not depend on it.
    """
    seeds = list(seeds)
    if not seeds:
        raise ValueError("ensemble needs at least one seed")
    if len(set(seeds)) != len(seeds):
        raise ValueError("ensemble seeds must be distinct")
    params.validate()
    jobs = [(params, s) for s in seeds]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        runs = [_run_one(j) for j in jobs]
    return summarize(params, runs)


@dataclass(frozen=True)
class SweepRow:
    point: Mapping[str, Any]
    summary: EnsembleSummary


@dataclass(frozen=True)
class SweepTable:
    names: tuple[str, ...]
    rows: tuple[SweepRow, ...]


def grid_product(**axes: Iterable[Any]) -> list[dict[str, Any]]:
    """Cartesian product of named value lists, first axis varying slowest."""
    names = list(axes)
    return [dict(zip(names, combo)) for combo in itertools.product(*axes.values())]


def sweep(
    base_params: SimParams,
    grid: Sequence[Mapping[str, Any]],
    seeds_per_point: int,
    base_seed: int = 0,
    workers: Optional[int] = None,
) -> SweepTable:
    """One ensemble per grid point, rows in grid order.

    Grid points map canonical ``SimParams`` field names to values. All points
    are validated before any simulation runs.
    """
    if not grid:
        raise ValueError("sweep grid is empty")
    if seeds_per_point < 1:
        raise ValueError("seeds_per_point must be >= 1")
    points = []
    for idx, point in enumerate(grid):
        try:
            points.append(base_params.replace(**point).validate())
        except (TypeError, ValidationError) as exc:
            raise ValidationError([f"grid point {idx} {dict(point)}: {exc}"]) from exc
    names: list[str] = []
    for point in grid:
        names.extend(k for k in point if k not in names)
    rows = []
    for idx, (point, params) in enumerate(zip(grid, points)):
        seeds = derive_seeds(base_seed, seeds_per_point, idx)
        rows.append(SweepRow(dict(point), run_ensemble(params, seeds, workers)))
    return SweepTable(tuple(names), tuple(rows))
