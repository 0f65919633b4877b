import math

import numpy as np
import pytest

from conftest import ALL_FAMILIES, hyper_heavy
from fbqueue.model import BatchLaw, Exponential, ModelError, QueueModel, cumulant
from fbqueue.root import root_map, solve_c


def test_quadratic_case():
    # M/M/1, unit batches: c solves nu/(nu + s + mu(1-c)) = c
    mu, nu = 1.3, 2.0
    m = QueueModel(mu=mu, batch=BatchLaw.constant(1), service=Exponential(nu), B=2)
    for s in (0.01, 0.5, 3.0):
        b = mu + nu + s
        exact = (b - math.sqrt(b * b - 4 * mu * nu)) / (2 * mu)
        assert solve_c(m, s).c == pytest.approx(exact, abs=1e-14)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_residual_and_bounds(family):
    m = family()
    prev = m.lam
    for s in np.logspace(-3, 2, 12):
        r = solve_c(m, s)
        assert m.lam <= r.c < 1
        assert abs(root_map(m, s, r.c) - r.c) < 1e-13
        # c decreases in s
        assert r.c <= prev or prev == m.lam
        prev = r.c


def test_s_zero():
    m = hyper_heavy()
    assert m.rho > 1
    c = solve_c(m, 0.0).c
    assert c < 1
    k = float(np.real(cumulant(m, c)))
    assert c == pytest.approx(m.lam + (1 - m.lam) * float(np.real(m.service.lt(-k))), abs=1e-13)
    assert solve_c(m.critical(), 0.0).c == 1.0


def test_negative_s():
    with pytest.raises(ModelError):
        solve_c(ALL_FAMILIES[0](), -1.0)
