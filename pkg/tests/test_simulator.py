import csv
import json

import numpy as np
import pytest

from conftest import batch_erlang, single_departures
from fbqueue.exit import two_sided
from fbqueue.model import ModelError
from fbqueue.queueing import SystemState, busy_period_mean, first_loss_mean, transient_counts
from fbqueue.simulator import SimConfig, SimEstimate, simulate, write_histogram_csv, write_summary_json


def test_reproducible():
    cfg = SimConfig(batch_erlang(), SystemState(2), replications=300, seed=11,
                    estimands=("busy_period", "first_loss_time"))
    a, b = simulate(cfg), simulate(cfg)
    assert a.summary() == b.summary()
    c = simulate(SimConfig(batch_erlang(), SystemState(2), replications=300, seed=12))
    assert c.estimates["busy_period"].mean != a.estimates["busy_period"].mean


def test_replication_substreams():
    # replication i draws from its own substream, so a longer run extends a shorter one
    from fbqueue.simulator import replication_rng
    a = replication_rng(3, 7).random(4)
    assert np.array_equal(a, replication_rng(3, 7).random(4))
    assert not np.array_equal(a, replication_rng(3, 8).random(4))


def test_busy_and_first_loss_means():
    m = batch_erlang()
    st = SystemState(2, 0.1)
    res = simulate(SimConfig(m, st, replications=6000, seed=1, estimands=("busy_period", "first_loss_time")))
    assert res.estimates["busy_period"].covers(busy_period_mean(m, st))
    assert res.estimates["first_loss_time"].covers(first_loss_mean(m, st))


def test_exit_side():
    m = single_departures()
    res = simulate(SimConfig(m, replications=6000, seed=0, estimands=("exit_side",), exit_bounds=(2, 3)))
    assert res.estimates["exit_side"].covers(two_sided(m, 0.0, 2, 3, 0.0).upper_prob)


def test_occupancy_at_fixed_time():
    from fbqueue.inversion import InversionRequest, invert
    m = batch_erlang()
    st, t = SystemState(3), 2.0
    res = simulate(SimConfig(m, st, horizon=t, replications=6000, seed=4, estimands=("occupancy_at_t",)))
    for u in (0, 3, m.B + 1):
        exact = invert(InversionRequest(lambda s: transient_counts(m, st, s).masses[u] / s, t, order=16)).value
        assert res.by_level["occupancy_at_t"][u].covers(exact)


def test_exports(tmp_path):
    res = simulate(SimConfig(batch_erlang(), SystemState(1), horizon=3.0, replications=200, seed=5,
                             estimands=("occupancy_at_t", "busy_period")))
    write_histogram_csv(res, "occupancy_at_t", tmp_path / "h.csv")
    rows = list(csv.reader(open(tmp_path / "h.csv")))
    assert rows[0] == ["level", "count"]
    assert sum(int(r[1]) for r in rows[1:]) == 200
    write_summary_json(res, tmp_path / "s.json")
    doc = json.loads((tmp_path / "s.json").read_text())
    assert doc["seed"] == 5 and "busy_period" in doc["estimates"]
    with pytest.raises(ModelError):
        write_histogram_csv(res, "busy_period", tmp_path / "x.csv")


@pytest.mark.parametrize("kwargs", [dict(replications=0), dict(horizon=0.0), dict(estimands=("nope",)),
                                    dict(estimands=("exit_side",)), dict(seed=-1),
                                    dict(initial=SystemState(20))])
def test_config_validation(kwargs):
    with pytest.raises(ModelError):
        SimConfig(batch_erlang(), **kwargs)


def test_estimate_interval():
    e = SimEstimate.from_samples(np.random.default_rng(0).normal(1.0, 2.0, 4000))
    assert e.covers(1.0)
    assert e.half_width_99 == pytest.approx(2.576 * 2.0 / np.sqrt(4000), rel=0.05)
