import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fbqueue.model import (BatchLaw, Deterministic, Empirical, Erlang, Exponential, HyperExponential,  # noqa: E402
                           QueueModel)

ACCEPTANCE_LINES: list[str] = []


def batch_erlang(B=6):
    return QueueModel(mu=0.8, batch=BatchLaw({1: 0.5, 2: 0.3, 3: 0.2}), service=Erlang(2, 3.0), lam=0.3, B=B)


def hyper_heavy(B=8):
    # rho > 1
    return QueueModel(mu=2.5, batch=BatchLaw({1: 0.6, 2: 0.4}), service=HyperExponential([0.3, 0.7], [0.8, 3.0]),
                      lam=0.4, B=B)


def deterministic(B=6):
    return QueueModel(mu=1.2, batch=BatchLaw({1: 0.6, 3: 0.4}), service=Deterministic(0.5), lam=0.2, B=B)


def empirical(B=6):
    law = Empirical([0.0, 0.3, 1.0, 2.0], [0.0, 0.2, 0.7, 1.0])
    return QueueModel(mu=0.9, batch=BatchLaw({1: 0.6, 3: 0.4}), service=law, lam=0.4, B=B)


def mm1n(mu=0.7, nu=1.0, B=8):
    return QueueModel(mu=mu, batch=BatchLaw.constant(1), service=Exponential(nu), lam=0.0, B=B)


def single_departures(B=7):
    return QueueModel(mu=0.9, batch=BatchLaw({1: 0.5, 2: 0.3, 3: 0.2}), service=Erlang(2, 2.5), lam=0.0, B=B)


PHASE_TYPE = [batch_erlang, hyper_heavy, single_departures]
ALL_FAMILIES = [batch_erlang, hyper_heavy, deterministic, empirical]


@pytest.fixture
def report():
    def add(number: int, passed: bool, detail: str):
        ACCEPTANCE_LINES.append(f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}")
        print(ACCEPTANCE_LINES[-1])
    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
