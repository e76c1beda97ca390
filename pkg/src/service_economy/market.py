"""Variable-price mode: linear price/quantity curves and a weekly average price.

Buyers quote ``2 - K(h - eA)`` and sellers ``K(h + eA)`` for ``h`` hours
given account balance ``A``. Each week the market price is the mean of the
pairwise clearing prices over the buyer/seller pairs drawn that week, and
every purchase then happens at that price with a balance-dependent quantity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .engine import assign_sellers, finish_week, transaction_round
from .model import EconomyState, SimParams, WeekRecord
from .rng import Rng


class EmptyMarketError(ValueError):
    pass


@dataclass(frozen=True)
class PairQuote:
    buyer: int
    seller: int
    hours: float
    price: float


def buyer_price(h: float, balance: float, k_slope: float, e_sensitivity: float) -> float:
    return 2 - k_slope * (h - e_sensitivity * balance)


def seller_price(h: float, balance: float, k_slope: float, e_sensitivity: float) -> float:
    return k_slope * (h + e_sensitivity * balance)


def pair_quote(
    a_buyer: float,
    a_seller: float,
    k_slope: float,
    e_sensitivity: float,
    buyer: int = 0,
    seller: int = 1,
) -> PairQuote:
    """Quantity and price at which the buyer's and seller's curves cross."""
    if k_slope <= 0:
        raise ValueError("k_slope must be positive")
    hours = 1 / k_slope + e_sensitivity * (a_buyer - a_seller) / 2
    price = 1 + k_slope * e_sensitivity * (a_buyer + a_seller) / 2
    return PairQuote(buyer, seller, hours, price)


def weekly_market_price(quotes: Sequence[PairQuote]) -> float:
    if not quotes:
        raise EmptyMarketError("no buyer/seller pairs to price")
    return sum(q.price for q in quotes) / len(quotes)


def demand_at_price(balance: float, price: float, k_slope: float, e_sensitivity: float) -> float:
    """Hours a buyer takes at ``price``; never negative."""
    if k_slope <= 0:
        raise ValueError("k_slope must be positive")
    # (2 - p)/K is 2/K - p/K, written so the zero-balance case lands on 5.0 exactly.
    return max(0.0, (2 - price) / k_slope + e_sensitivity * balance)


def market_step_week(state: EconomyState, rng: Rng, params: SimParams) -> WeekRecord:
    """One week in market mode.

    Quotes and demanded quantities both use start-of-week balances; the
    purchase branches still test live balances, exactly as in fixed mode.
    """
    k, e = params.k_slope, params.e_sensitivity
    sellers = assign_sellers(len(state.accounts), rng)
    opening = list(state.accounts)
    quotes = [pair_quote(opening[i], opening[j], k, e, i, j) for i, j in enumerate(sellers)]
    try:
        price = weekly_market_price(quotes)
    except EmptyMarketError:
        price = 1.0
        amounts = [0.0] * len(opening)
    else:
        amounts = [price * demand_at_price(a, price, k, e) for a in opening]
    rnd = transaction_round(state, sellers, rng, params, amount_for=amounts.__getitem__)
    return finish_week(state, rng, params, rnd, market_price=price)
