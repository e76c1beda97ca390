"""Fixed-price weekly update.

Each function is one block of the weekly loop and mutates the
``EconomyState`` it is given. Agent indices are 0-based.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional, Sequence

from .model import (
    DefaultEvent,
    EconomyState,
    SimParams,
    SimResult,
    WeekRecord,
    init_state,
    initial_record,
    average_over_weeks,
)
from .rng import Rng


class RoundResult(NamedTuple):
    sales: int
    loans: int
    volume: float  # fiat dollars paid by buyers before any buyer-side tax


def assign_sellers(n_agents: int, rng: Rng) -> list[int]:
    """Draw a seller for every buyer, redrawing whenever a buyer draws itself."""
    if n_agents < 2:
        raise ValueError("seller assignment needs at least 2 agents")
    sellers = []
    for i in range(n_agents):
        s = rng.uniform_int(n_agents) - 1
        while s == i:
            s = rng.uniform_int(n_agents) - 1
        sellers.append(s)
    return sellers


def post_sale(
    accounts: list[float], buyer: int, seller: int, amount: float, params: SimParams
) -> float:
    """Move ``amount`` from buyer to seller net of tax; return the tax owed.

    ``tax_seller_share`` of the tax comes out of the seller's proceeds and the
    rest is charged to the buyer on top of the price.
    """
    if buyer == seller:
        raise ValueError("buyer and seller must differ")
    share = params.tax_seller_share
    tax = params.tax_rate
    if share == 1.0:
        accounts[buyer] -= amount
        accounts[seller] += (1 - tax) * amount
    else:
        accounts[buyer] -= amount * (1 + tax * (1 - share))
        accounts[seller] += amount * (1 - tax * share)
    return tax * amount


def lending_open(state: EconomyState) -> bool:
    """Bank lends only if last week's compliance and capital were non-negative."""
    return state.compliance_prev >= 0 and state.cb_balance >= 0


def transaction_round(
    state: EconomyState,
    sellers: Sequence[int],
    rng: Rng,
    params: SimParams,
    amount_for: Optional[Callable[[int], float]] = None,
) -> RoundResult:
    """Give every buyer, in index order, one chance to purchase.

    Branch tests read the live balances, so income earned as a seller earlier
    in the round counts. ``amount_for(i)`` overrides the fixed purchase
    amount; a zero amount posts nothing and counts no sale.
    """
    a = state.accounts
    # cb_balance still holds last week's value here; it is updated afterwards.
    credit_ok = lending_open(state)
    sales = loans = 0
    volume = 0.0
    fixed_amount = params.purchase_amount

    def buy(i: int) -> bool:
        nonlocal volume
        amount = fixed_amount if amount_for is None else amount_for(i)
        if amount <= 0:
            return False
        post_sale(a, i, sellers[i], amount, params)
        volume += amount
        return True

    for i in range(len(a)):
        if params.loan_limit <= a[i] <= 0 and credit_ok:
            if rng.uniform_int(10) <= params.mood_odds and buy(i):
                sales += 1
                loans += 1
        if 0 < a[i] < params.upper_threshold:
            if rng.uniform_int(10) <= params.midband_buy_odds and buy(i):
                sales += 1
        if params.upper_threshold < a[i]:
            if buy(i):
                sales += 1
    return RoundResult(sales, loans, volume)


def accrue_interest_and_bank(state: EconomyState, params: SimParams) -> tuple[float, float]:
    """Post loan and deposit interest and banker spending; return (L, D).

    L and D are measured before interest is posted.
    """
    a = state.accounts
    n = len(a)
    loans_out = -sum(x for x in a if x < 0)
    deposits = sum(x for x in a if x > 0)
    rl, rd = params.loan_rate_weekly, params.deposit_rate_weekly
    for i, x in enumerate(a):
        if x < 0:
            a[i] = x + rl * x
        elif x > 0:
            a[i] = x + rd * x
    income = rl * loans_out
    state.cb_balance += income
    bank_spend = params.banker_spend_fraction * income
    if bank_spend:
        share = bank_spend / n
        for i in range(n):
            a[i] += share
        state.cb_balance -= bank_spend
    return loans_out, deposits


def fiscal_update(
    state: EconomyState, deposits: float, tax_revenue: float, params: SimParams
) -> float:
    """Collect tax, pay deposit interest, and spend evenly across agents."""
    state.gov_balance += tax_revenue
    state.gov_balance -= params.deposit_rate_weekly * deposits
    spending = params.spend_taxes_multiple * tax_revenue
    if spending:
        share = spending / len(state.accounts)
        for i in range(len(state.accounts)):
            state.accounts[i] += share
    state.gov_balance -= spending
    return tax_revenue


def default_probability(balance: float, default_limit: float) -> float:
    """Certain below the limit, zero above zero, linear in between."""
    if default_limit >= 0:
        raise ValueError("default_limit must be negative")
    if balance < default_limit:
        return 1.0
    if balance > 0:
        return 0.0
    return balance / default_limit


def default_step(state: EconomyState, rng: Rng, params: SimParams) -> Optional[DefaultEvent]:
    """Put the lowest account at risk of default.

    One uniform draw is consumed every week, whatever the probability.
    """
    a = state.accounts
    lowest = min(a)
    idx = a.index(lowest)
    y = default_probability(lowest, params.default_limit)
    if rng.uniform_unit() < y:
        a[idx] = 0.0
        state.cb_balance += lowest
        return DefaultEvent(agent=idx, amount=lowest, week=state.week)
    return None


def compliance_value(cb: float, deposits: float, loans_out: float, reserve_ratio: float) -> float:
    return cb + (1 - reserve_ratio) * deposits - loans_out


def finish_week(
    state: EconomyState,
    rng: Rng,
    params: SimParams,
    rnd: RoundResult,
    market_price: Optional[float] = None,
) -> WeekRecord:
    """Everything after the purchase round: bank, government, default, compliance."""
    week = state.week + 1
    state.week = week
    loans_out, deposits = accrue_interest_and_bank(state, params)
    # equals the sum of per-sale taxes; one product keeps fixed and market modes bit-identical
    tax_revenue = params.tax_rate * rnd.volume
    fiscal_update(state, deposits, tax_revenue, params)
    snapshot = list(state.accounts)
    event = default_step(state, rng, params)
    if event is not None:
        snapshot[event.agent] = 0.0
    compliance = compliance_value(state.cb_balance, deposits, loans_out, params.reserve_ratio)
    state.compliance_prev = compliance
    return WeekRecord(
        week=week,
        sales=rnd.sales,
        loans=rnd.loans,
        deposits=deposits,
        loans_outstanding=loans_out,
        tax_revenue=tax_revenue,
        cb_balance=state.cb_balance,
        gov_balance=state.gov_balance,
        compliance=compliance,
        accounts=tuple(snapshot),
        default=event,
        market_price=market_price,
    )


def step_week(state: EconomyState, rng: Rng, params: SimParams) -> WeekRecord:
    sellers = assign_sellers(len(state.accounts), rng)
    rnd = transaction_round(state, sellers, rng, params)
    return finish_week(state, rng, params, rnd)


def run_simulation(params: SimParams, seed: int) -> SimResult:
    """Run weeks 2..W from the initial state and summarise."""
    from .market import market_step_week

    state = init_state(params)
    rng = Rng(seed)
    step = market_step_week if params.price_mode == "market" else step_week
    records = [initial_record(state)]
    for _ in range(2, params.weeks + 1):
        records.append(step(state, rng, params))
    sales = [r.sales for r in records]
    cb = [r.cb_balance for r in records]
    return SimResult(
        params=params,
        seed=seed,
        weeks=tuple(records),
        average_weekly_sales=average_over_weeks(sales, params.weeks),
        average_bank_account=sum(cb) / params.weeks,
    )
