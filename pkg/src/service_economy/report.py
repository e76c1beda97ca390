"""CSV serialization of runs, ensembles and sweeps.

Reals are written with ``repr`` (shortest round-trip form), except that
integral values are written without a decimal point, so ``10.0`` becomes
``10``. Agent numbers in files are 1-based.
"""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable, Optional, Sequence

from .harness import EnsembleSummary, SweepTable
from .model import DefaultEvent, SimResult, WeekRecord

WEEKS_HEADER = [
    "week",
    "sales",
    "loans",
    "deposits",
    "loans_outstanding",
    "tax_revenue",
    "cb_balance",
    "gov_balance",
    "compliance",
    "default_agent",
    "default_amount",
    "market_price",
]

RUN_COLUMNS = [
    "seed",
    "average_weekly_sales",
    "total_sales",
    "total_loans",
    "defaults",
    "final_cb_balance",
    "final_gov_balance",
    "min_cb_balance",
    "negative_compliance_weeks",
    "stopped_lending_insolvent",
]

SUMMARY_COLUMNS = [
    "seed_count",
    "mean_sales",
    "std_sales",
    "min_sales",
    "max_sales",
    "p01_sales",
    "p99_sales",
    "mean_defaults",
    "frac_any_default",
    "frac_two_plus_defaults",
    "frac_terminal_insolvent",
    "frac_negative_compliance_weeks",
    "mean_final_cb_balance",
    "mean_final_gov_balance",
]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isfinite(value) and value.is_integer() and abs(value) < 2**53:
            return str(int(value))
        return repr(value)
    return str(value)


def _to_text(rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_weeks_csv(result: SimResult) -> str:
    def row(w: WeekRecord) -> list:
        d = w.default
        return [
            w.week,
            w.sales,
            w.loans,
            w.deposits,
            w.loans_outstanding,
            w.tax_revenue,
            w.cb_balance,
            w.gov_balance,
            w.compliance,
            None if d is None else d.agent + 1,
            None if d is None else d.amount,
            w.market_price,
        ]

    return _to_text([WEEKS_HEADER, *(row(w) for w in result.weeks)])


def write_accounts_csv(result: SimResult) -> str:
    n = result.params.n_agents
    header = ["week", *(f"agent_{i}" for i in range(1, n + 1))]
    return _to_text([header, *([w.week, *w.accounts] for w in result.weeks)])


def _opt_float(text: str) -> Optional[float]:
    return float(text) if text else None


def read_weeks_csv(weeks_text: str, accounts_text: str) -> list[WeekRecord]:
    """Rebuild week records from the two CSVs written for one run."""
    accounts = {}
    for row in csv.DictReader(io.StringIO(accounts_text)):
        week = int(row.pop("week"))
        accounts[week] = tuple(float(row[k]) for k in row)
    records = []
    for row in csv.DictReader(io.StringIO(weeks_text)):
        week = int(row["week"])
        event = None
        if row["default_agent"]:
            event = DefaultEvent(
                agent=int(row["default_agent"]) - 1,
                amount=float(row["default_amount"]),
                week=week,
            )
        records.append(
            WeekRecord(
                week=week,
                sales=int(row["sales"]),
                loans=int(row["loans"]),
                deposits=float(row["deposits"]),
                loans_outstanding=float(row["loans_outstanding"]),
                tax_revenue=float(row["tax_revenue"]),
                cb_balance=float(row["cb_balance"]),
                gov_balance=float(row["gov_balance"]),
                compliance=float(row["compliance"]),
                accounts=accounts[week],
                default=event,
                market_price=_opt_float(row["market_price"]),
            )
        )
    return records


def write_runs_csv(summary: EnsembleSummary) -> str:
    rows = [[getattr(r, c) for c in RUN_COLUMNS] for r in summary.runs]
    return _to_text([RUN_COLUMNS, *rows])


def _summary_values(summary: EnsembleSummary) -> list:
    return [getattr(summary, c) for c in SUMMARY_COLUMNS]


def write_summary_csv(summary: EnsembleSummary) -> str:
    return _to_text([SUMMARY_COLUMNS, _summary_values(summary)])


def write_sweep_csv(table: SweepTable) -> str:
    names = list(table.names)
    rows = [[row.point.get(n) for n in names] + _summary_values(row.summary) for row in table.rows]
    return _to_text([names + SUMMARY_COLUMNS, *rows])
