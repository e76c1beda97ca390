"""Exit criteria for the build, one test per criterion.

Each test records a PASS/FAIL line that is printed in the pytest terminal
summary. Tolerances and runtime budgets are fixed here and not tuned.
"""

import math
import os
import random
import time
from contextlib import contextmanager

import pytest

from conftest import ACCEPTANCE_LINES
from service_economy.cli import cli_main
from service_economy.engine import (
    default_probability,
    run_simulation,
    step_week,
    transaction_round,
)
from service_economy.harness import stopped_lending_when_insolvent, sweep
from service_economy.market import (
    buyer_price,
    market_step_week,
    pair_quote,
    seller_price,
)
from service_economy.model import EconomyState, SimParams, init_state
from service_economy.rng import Rng

REPORTED_BASELINE = (6.7925, 6.4151, 6.5094)
REPORTED_LOOSE_CREDIT = (6.5660, 6.7925, 6.8868)
# ">= 500" required; 2000 per configuration gives the >=2-default comparison
# enough power to be meaningful rather than a coin flip.
ENSEMBLE_SEEDS = 2000
SECONDS_BUDGET = 60.0
WORKERS = min(8, os.cpu_count() or 1)


@contextmanager
def criterion(number, text):
    start = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE_LINES.append(f"FAIL  AC{number:>2}  {text}  ({type(exc).__name__}: {exc})")
        raise
    ACCEPTANCE_LINES.append(
        f"PASS  AC{number:>2}  {text}  [{time.perf_counter() - start:.3f} s]"
    )


def best_time(fn, repeat=20):
    best = math.inf
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


@pytest.fixture(scope="module")
def loan_limit_sweep():
    """Ensembles at the baseline loan limit (-5) and the looser one (-15)."""
    t = time.perf_counter()
    table = sweep(
        SimParams(),
        [{"loan_limit": -5.0}, {"loan_limit": -15.0}],
        ENSEMBLE_SEEDS,
        base_seed=0,
        workers=WORKERS,
    )
    return table.rows[0].summary, table.rows[1].summary, time.perf_counter() - t


def test_ac01_hand_trace():
    with criterion(1, "hand-traced two-agent week is exact"):
        params = SimParams(
            n_agents=2, loan_rate_weekly=0.0, deposit_rate_weekly=0.0, tax_rate=0.2,
            banker_spend_fraction=0.0, spend_taxes_multiple=1.0,
        )

        def one_week():
            state = EconomyState(week=1, accounts=[20.0, 20.0], cb_balance=10.0, gov_balance=0.0)
            return step_week(state, Rng(0), params)

        rec = one_week()
        assert rec.accounts == (20.0, 20.0)
        assert (rec.sales, rec.loans) == (2, 0)
        assert (rec.deposits, rec.loans_outstanding) == (38.0, 0.0)
        assert (rec.cb_balance, rec.gov_balance) == (10.0, 0.0)
        assert rec.compliance == 44.2
        assert best_time(one_week) < 1e-3


def test_ac02_conservation():
    with criterion(2, "money conserved to 1e-6 every week, 1000 seeds x default params"):
        t = time.perf_counter()
        worst = 0.0
        for seed in range(1000):
            params = SimParams()
            state = init_state(params)
            rng = Rng(seed)
            for _ in range(2, params.weeks + 1):
                step_week(state, rng, params)
                worst = max(worst, abs(state.money_total() - 10.0))
        assert worst < 1e-6, worst
        assert time.perf_counter() - t < SECONDS_BUDGET


def test_ac03_baseline_sales(loan_limit_sweep):
    with criterion(3, "default params: mean sales in [6.0, 7.2], reported runs inside [p01, p99]"):
        exp1, _, elapsed = loan_limit_sweep
        assert exp1.seed_count >= 500
        assert 6.0 <= exp1.mean_sales <= 7.2, exp1.mean_sales
        for v in REPORTED_BASELINE:
            assert exp1.p01_sales <= v <= exp1.p99_sales, (v, exp1.p01_sales, exp1.p99_sales)
        assert elapsed < SECONDS_BUDGET


def test_ac04_loose_credit(loan_limit_sweep):
    with criterion(4, "loan limit -15: mean sales in [6.0, 7.3], more multi-default runs, insolvent bank stops lending"):
        exp1, exp2, elapsed = loan_limit_sweep
        assert exp2.seed_count >= 500
        assert 6.0 <= exp2.mean_sales <= 7.3, exp2.mean_sales
        assert exp2.p01_sales <= min(REPORTED_LOOSE_CREDIT) and max(REPORTED_LOOSE_CREDIT) <= exp2.p99_sales
        assert exp2.frac_two_plus_defaults > exp1.frac_two_plus_defaults, (
            exp2.frac_two_plus_defaults, exp1.frac_two_plus_defaults)
        stopped = [r for r in exp2.runs if r.stopped_lending_insolvent]
        assert stopped
        # re-derive one such run directly and check it week by week
        run = run_simulation(exp2.params, stopped[0].seed)
        assert stopped_lending_when_insolvent(run)
        last_solvent = max(i for i, w in enumerate(run.weeks) if w.cb_balance >= 0)
        assert all(w.cb_balance < 0 and w.loans == 0 for w in run.weeks[last_solvent + 2:])
        assert elapsed < SECONDS_BUDGET


def test_ac05_lending_freeze():
    with criterion(5, "no loans when last week's compliance or bank capital is negative"):
        params = SimParams(mood_odds=10)
        cases = [(-0.5, 10.0), (5.0, -0.5), (-1.0, -1.0)]

        def frozen_round(compliance_prev, cb):
            state = EconomyState(
                week=5, accounts=[0.0] * 10, cb_balance=cb, gov_balance=0.0,
                compliance_prev=compliance_prev,
            )
            return transaction_round(state, [1, 2, 3, 4, 5, 6, 7, 8, 9, 0], Rng(1), params)

        for compliance_prev, cb in cases:
            assert frozen_round(compliance_prev, cb).loans == 0
        # the same setup with the gate open does lend
        assert frozen_round(0.0, 0.0).loans > 0
        for seed in range(20):
            state = EconomyState(
                week=5, accounts=[0.0] * 10, cb_balance=10.0, gov_balance=0.0, compliance_prev=-3.0,
            )
            assert step_week(state, Rng(seed), params).loans == 0
        assert best_time(lambda: frozen_round(-0.5, 10.0)) < 1e-3


def test_ac06_default_curve():
    with criterion(6, "default probability anchors and monotone on 1e4-point grid"):
        t = time.perf_counter()
        assert default_probability(-600, -500) == 1
        assert default_probability(5, -500) == 0
        assert default_probability(-250, -500) == 0.5
        assert default_probability(-500, -500) == 1
        grid = [-1000 + 1100 * k / 9999 for k in range(10_000)]
        ys = [default_probability(b, -500) for b in grid]
        assert all(0 <= y <= 1 for y in ys)
        assert all(b <= a for a, b in zip(ys, ys[1:]))
        assert time.perf_counter() - t < 1.0


def test_ac07_market_anchor():
    with criterion(7, "market mode at zero balances: price 1.0, 5-hour trades, postings equal fixed mode"):
        t = time.perf_counter()
        base = SimParams(k_slope=0.2, e_sensitivity=0.1)
        for seed in range(50):
            fixed_params = base
            market_params = base.replace(price_mode="market")
            fs, ms = init_state(fixed_params), init_state(market_params)
            fixed = step_week(fs, Rng(seed), fixed_params)
            market = market_step_week(ms, Rng(seed), market_params)
            assert market.market_price == 1.0
            assert pair_quote(0.0, 0.0, 0.2, 0.1).hours == 5.0
            assert market.accounts == fixed.accounts
            assert (market.sales, market.loans) == (fixed.sales, fixed.loans)
            assert market.tax_revenue == fixed.tax_revenue
            assert (market.cb_balance, market.gov_balance) == (fixed.cb_balance, fixed.gov_balance)
            # every sale moved exactly 5 hours at price 1: tax is 0.2 * 5 per sale
            assert market.tax_revenue == pytest.approx(market.sales * 1.0, abs=1e-12)
        assert time.perf_counter() - t < 1.0


def test_ac08_curve_consistency():
    with criterion(8, "1e5 random balance pairs: both curves equal the pair price within 1e-12"):
        t = time.perf_counter()
        rs = random.Random(20240601)
        worst = 0.0
        for _ in range(100_000):
            ai, aj = rs.uniform(-1000, 1000), rs.uniform(-1000, 1000)
            q = pair_quote(ai, aj, 0.2, 0.1)
            pb = buyer_price(q.hours, ai, 0.2, 0.1)
            ps = seller_price(q.hours, aj, 0.2, 0.1)
            worst = max(worst, abs(pb - q.price), abs(ps - q.price), abs(pb - ps))
        assert worst <= 1e-12, worst
        assert time.perf_counter() - t < 1.0


def test_ac09_cli_determinism(tmp_path):
    from service_economy import plotting  # noqa: F401  (import cost is not part of the budget)

    with criterion(9, "two `run --seed 42` invocations give byte-identical CSV and SVG files"):
        t = time.perf_counter()
        a, b = tmp_path / "a", tmp_path / "b"
        assert cli_main(["run", "--seed", "42", "--out", str(a), "--svg"]) == 0
        assert cli_main(["run", "--seed", "42", "--out", str(b), "--svg"]) == 0
        elapsed = time.perf_counter() - t
        names = sorted(p.name for p in a.iterdir())
        assert names == sorted(p.name for p in b.iterdir())
        assert {"weeks.csv", "accounts.csv"} <= set(names)
        assert sum(n.endswith(".svg") for n in names) == 5
        for name in names:
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
        assert elapsed < 1.0, elapsed


def test_ac10_average_convention(loan_limit_sweep):
    with criterion(10, "average weekly sales x W equals the integer sales total for every run"):
        t = time.perf_counter()
        exp1, exp2, _ = loan_limit_sweep
        for summary in (exp1, exp2):
            for run in summary.runs:
                assert run.average_weekly_sales * summary.params.weeks == run.total_sales
        for seed in range(200):
            r = run_simulation(SimParams(), seed)
            assert r.average_weekly_sales * 53 == r.total_sales
            assert r.weeks[0].sales == 0
        assert time.perf_counter() - t < 1.0
