import numpy as np
import pytest

from conftest import PHASE_TYPE, batch_erlang, single_departures
from fbqueue.exit import sup_inf_law, sup_joint, trivariate, two_sided
from fbqueue.model import ModelError
from oracles import LevelChain

CASES = [(0, 3), (2, 4), (5, 1)]


@pytest.mark.parametrize("family", PHASE_TYPE)
@pytest.mark.parametrize("r, k", CASES)
def test_two_sided_against_chain(family, r, k):
    m = family()
    x = 0.15
    chain = LevelChain(m, x, -r, k)
    for s in (0.05, 0.7):
        law = two_sided(m, x, r, k, s)
        assert law.lower_lt == pytest.approx(chain.exit_lower(s), rel=1e-8, abs=1e-12)
        assert law.upper_lt == pytest.approx(chain.exit_upper(s), rel=1e-8, abs=1e-12)


@pytest.mark.parametrize("family", PHASE_TYPE)
def test_exit_is_certain(family):
    m = family()
    law = two_sided(m, 0.0, 3, 5, 0.0)
    assert law.lower_prob + law.upper_prob == pytest.approx(1.0, abs=1e-12)
    assert 0 < law.lower_prob < 1
    assert law.lower_prob == pytest.approx(LevelChain(m, 0.0, -3, 5).exit_lower(1e-10), abs=1e-7)


def test_overshoot_masses():
    m = batch_erlang()
    r, k, s = 2, 3, 0.4
    law = two_sided(m, 0.0, r, k, s)
    chain = LevelChain(m, 0.0, -r, k)
    for j in (1, 2, 3):
        lo, up = law.overshoot_pmf(j)
        assert lo == pytest.approx(chain.lt(s, chain.down[:, j]), rel=1e-8)
        assert up == pytest.approx(chain.lt(s, chain.up[:, j]), rel=1e-7, abs=1e-12)
    total = sum(law.upper_overshoot(j) for j in range(1, 40))
    assert total == pytest.approx(law.upper_lt, rel=1e-8)


def test_overshoot_at_large_s():
    # λ/c close to 1: the geometric mean runs over a capped table
    m = batch_erlang()
    law = two_sided(m, 0.0, 2, 3, 80.0)
    chain = LevelChain(m, 0.0, -2, 3)
    assert law.upper_overshoot(1) == pytest.approx(chain.lt(80.0, chain.up[:, 1]), rel=1e-6, abs=1e-14)


@pytest.mark.parametrize("family", [batch_erlang, single_departures])
def test_window_laws_against_chain(family):
    m = family()
    r, k, s, x = 2, 4, 0.3, 0.1
    law = sup_inf_law(m, x, r, k, s)
    wide = LevelChain(m, x, -250, k)    # lower barrier far away: sup-only event
    narrow = LevelChain(m, x, -r, k)
    for u, sup_v, win_v in zip(law.u, law.sup_cdf, law.window_cdf):
        assert win_v == pytest.approx(narrow.below_at_exp_time(s, int(u)), rel=1e-8, abs=1e-12)
        assert sup_v == pytest.approx(wide.below_at_exp_time(s, int(u)), rel=1e-6, abs=1e-10)
    assert np.all(np.diff(law.window_cdf) >= -1e-13)


def test_trivariate_bounds_and_errors():
    m = batch_erlang()
    assert trivariate(m, 0.0, 2, 3, 3, 0.5) <= sup_joint(m, 0.0, 3, 3, 0.5) + 1e-14
    with pytest.raises(ModelError):
        trivariate(m, 0.0, 2, 3, 4, 0.5)
    with pytest.raises(ModelError):
        two_sided(m, 0.0, -1, 3, 0.5)
