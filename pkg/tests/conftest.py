import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from hequery import gahi, hqp  # noqa: E402
from hequery.codec import Database  # noqa: E402
from hequery.cyclotomic import FieldContext  # noqa: E402
from hequery.ring import RingParams  # noqa: E402

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

TABLE1_ROWS = ["1100", "1010", "1100", "1101", "1000"]
TABLE2_ROWS = ["0010", "1011", "1001", "1011", "1100"]


@pytest.fixture(scope="session")
def table1_db():
    return Database.from_bitstrings(TABLE1_ROWS)


@pytest.fixture(scope="session")
def table2_db():
    return Database.from_bitstrings(TABLE2_ROWS)


@pytest.fixture(scope="session")
def desk_ring():
    """n=16 (degree 8), q about 2^60, t=97."""
    return RingParams.with_q_bits(16, 60, 97)


@pytest.fixture(scope="session")
def small_field():
    """Z_7[x]/<Phi_5>: degree 4, holds 3-bit records and counters up to 6."""
    return FieldContext(5, 7)


@pytest.fixture(scope="session")
def gahi_client_t1(table1_db):
    params = gahi.advise_params(len(table1_db), table1_db.n_bits)
    return gahi.GahiClient(params, 11)


@pytest.fixture(scope="session")
def hqp_client_small(small_field):
    return hqp.HqpClient(small_field, hqp.advise_ring(small_field, 5), 7)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
