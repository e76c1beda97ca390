"""Parameter record, economy state and per-week observables."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Sequence

PRICE_MODES = ("fixed", "market")


class ValidationError(ValueError):
    """Raised when a parameter set violates one or more constraints.

    ``problems`` holds one message per violated constraint.
    """

    def __init__(self, problems: Sequence[str]) -> None:
        self.problems = list(problems)
        super().__init__("invalid parameters: " + "; ".join(self.problems))


@dataclass(frozen=True)
class SimParams:
    """Model parameters, defaulting to the standard ten-agent, 53-week economy.

    Rates are weekly. ``reserve_ratio`` is the required reserve fraction, so
    the compliance test uses ``1 - reserve_ratio`` of deposits.
    ``weekly_transactions`` is carried through to output but the weekly loop
    iterates over agents, not over it.
    """

    n_agents: int = 10
    weeks: int = 53
    weekly_transactions: int = 10
    loan_rate_weekly: float = 0.07 / 52
    deposit_rate_weekly: float = 0.06 / 52
    tax_rate: float = 0.20
    spend_taxes_multiple: float = 1.0
    banker_spend_fraction: float = 0.0
    mood_odds: int = 7
    default_limit: float = -500.0
    loan_limit: float = -5.0
    initial_reserves: float = 10.0
    reserve_ratio: float = 0.1
    purchase_hours: float = 5.0
    price_per_hour: float = 1.0
    midband_buy_odds: int = 9
    upper_threshold: float = 10.0
    tax_seller_share: float = 1.0
    price_mode: str = "fixed"
    k_slope: float = 1 / 5
    e_sensitivity: float = 1 / 10

    def problems(self) -> list[str]:
        out = []

        def need(ok: bool, msg: str) -> None:
            if not ok:
                out.append(msg)

        need(self.n_agents >= 2, "n_agents must be >= 2 (a buyer needs a distinct seller)")
        need(self.weeks >= 2, "weeks must be >= 2 (the loop runs weeks 2..W)")
        need(self.weekly_transactions >= 1, "weekly_transactions must be >= 1")
        need(self.loan_rate_weekly >= 0, "loan_rate_weekly must be >= 0")
        need(self.deposit_rate_weekly >= 0, "deposit_rate_weekly must be >= 0")
        need(0 <= self.tax_rate <= 1, "tax_rate must be in [0, 1]")
        need(self.spend_taxes_multiple >= 0, "spend_taxes_multiple must be >= 0")
        need(0 <= self.banker_spend_fraction <= 1, "banker_spend_fraction must be in [0, 1]")
        need(0 <= self.mood_odds <= 10, "mood_odds must be in [0, 10]")
        need(self.default_limit < 0, "default_limit must be < 0")
        need(self.loan_limit <= 0, "loan_limit must be <= 0")
        need(self.default_limit < self.loan_limit, "default_limit must be < loan_limit")
        need(0 <= self.reserve_ratio <= 1, "reserve_ratio must be in [0, 1]")
        need(self.purchase_hours > 0, "purchase_hours must be > 0")
        need(self.price_per_hour > 0, "price_per_hour must be > 0")
        need(0 <= self.midband_buy_odds <= 10, "midband_buy_odds must be in [0, 10]")
        need(0 <= self.tax_seller_share <= 1, "tax_seller_share must be in [0, 1]")
        need(self.price_mode in PRICE_MODES, f"price_mode must be one of {PRICE_MODES}")
        need(self.k_slope > 0, "k_slope must be > 0")
        need(self.e_sensitivity >= 0, "e_sensitivity must be >= 0")
        return out

    def validate(self) -> "SimParams":
        problems = self.problems()
        if problems:
            raise ValidationError(problems)
        return self

    def replace(self, **changes) -> "SimParams":
        return dataclasses.replace(self, **changes)

    @property
    def purchase_amount(self) -> float:
        return self.purchase_hours * self.price_per_hour


@dataclass
class EconomyState:
    """Mutable state of one run. ``week`` is 1-based; week 1 is the initial row."""

    week: int
    accounts: list[float]
    cb_balance: float
    gov_balance: float
    compliance_prev: float = 0.0

    def money_total(self) -> float:
        return sum(self.accounts) + self.cb_balance + self.gov_balance


@dataclass(frozen=True)
class DefaultEvent:
    agent: int  # 0-based
    amount: float  # balance before reset, <= 0
    week: int


@dataclass(frozen=True)
class WeekRecord:
    week: int
    sales: int
    loans: int
    deposits: float
    loans_outstanding: float
    tax_revenue: float
    cb_balance: float
    gov_balance: float
    compliance: float
    accounts: tuple[float, ...]
    default: Optional[DefaultEvent] = None
    market_price: Optional[float] = None


@dataclass(frozen=True)
class SimResult:
    params: SimParams
    seed: int
    weeks: tuple[WeekRecord, ...]
    average_weekly_sales: float
    average_bank_account: float

    def series(self, name: str) -> list:
        return [getattr(w, name) for w in self.weeks]

    @property
    def total_sales(self) -> int:
        return sum(w.sales for w in self.weeks)

    @property
    def defaults(self) -> list[DefaultEvent]:
        return [w.default for w in self.weeks if w.default is not None]

    @property
    def accounts_matrix(self) -> list[tuple[float, ...]]:
        """Weekly account snapshots, one row per week (the ``All`` matrix)."""
        return [w.accounts for w in self.weeks]


def init_state(params: SimParams) -> EconomyState:
    params.validate()
    return EconomyState(
        week=1,
        accounts=[0.0] * params.n_agents,
        cb_balance=float(params.initial_reserves),
        gov_balance=0.0,
        compliance_prev=0.0,
    )


def initial_record(state: EconomyState) -> WeekRecord:
    return WeekRecord(
        week=state.week,
        sales=0,
        loans=0,
        deposits=0.0,
        loans_outstanding=0.0,
        tax_revenue=0.0,
        cb_balance=state.cb_balance,
        gov_balance=state.gov_balance,
        compliance=state.compliance_prev,
        accounts=tuple(state.accounts),
    )


def average_over_weeks(series: Sequence[float], weeks: int) -> float:
    """Average over all ``weeks`` entries, including the inactive first week.

    >>> round(average_over_weeks([0] * 52 + [360], 53), 4)
    6.7925
    """
    if len(series) != weeks:
        raise ValueError(f"series has {len(series)} entries, expected {weeks}")
    return sum(series) / weeks
