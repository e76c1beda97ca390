import pytest

from service_economy.model import EconomyState, SimParams


@pytest.fixture
def two_rich():
    """Two agents at 20, zero interest: the hand-traced week."""
    params = SimParams(n_agents=2, loan_rate_weekly=0.0, deposit_rate_weekly=0.0)
    state = EconomyState(week=1, accounts=[20.0, 20.0], cb_balance=10.0, gov_balance=0.0)
    return params, state


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
