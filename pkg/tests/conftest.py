"""Shared fixtures: one mid-size cell reused across the unit tests.

Building a certified recurrence table is the expensive step, so the
common (a = 1, n <= 9) cell and one derivative grid are session scoped.
"""

import pytest

from gue_gap_lab import PrecisionPolicy, build_recurrence_table, ladder_states
from gue_gap_lab.differential_eqs import build_a_grid


@pytest.fixture(scope="session")
def policy():
    return PrecisionPolicy()


@pytest.fixture(scope="session")
def table_a1(policy):
    return build_recurrence_table("1", 9, policy)


@pytest.fixture(scope="session")
def states_a1(table_a1):
    return ladder_states(table_a1)


@pytest.fixture(scope="session")
def grid_a1(policy):
    return build_a_grid("1", 5, policy)
