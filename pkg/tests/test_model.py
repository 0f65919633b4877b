import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import ALL_FAMILIES
from fbqueue.model import (AgeBeyondSupport, BatchLaw, Deterministic, Empirical, Erlang, ModelError, QueueModel,
                           build_model, load_model)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_config_round_trip(family):
    m = family()
    back = build_model(json.loads(json.dumps(m.to_config())))
    assert back.rho == pytest.approx(m.rho, rel=1e-14)
    assert back.service.lt(0.7) == pytest.approx(m.service.lt(0.7), rel=1e-13)
    assert back.B == m.B and back.lam == m.lam


def test_yaml_config(tmp_path):
    p = tmp_path / "m.yaml"
    p.write_text("arrival: {mu: 0.5}\nbatch: {pmf: {1: 0.4, 2: 0.6}}\n"
                 "service: {family: erlang, shape: 2, rate: 3}\njump: {lambda: 0.2}\nbuffer: {B: 4}\n")
    m = load_model(p)
    assert m.batch.mean == pytest.approx(1.6)
    assert m.rho == pytest.approx(0.8 * 0.5 * 1.6 * 2 / 3)


@pytest.mark.parametrize("drop, key", [("arrival", "arrival"), ("buffer", "buffer")])
def test_missing_keys_are_named(drop, key):
    cfg = QueueModel(mu=1, batch=BatchLaw.constant(1), service=Erlang(1, 1.0), B=2).to_config()
    del cfg[drop]
    with pytest.raises(ModelError, match=key):
        build_model(cfg)


def test_unknown_service_family():
    cfg = {"arrival": {"mu": 1}, "batch": {"family": "constant"}, "service": {"family": "pareto"},
           "buffer": {"B": 1}}
    with pytest.raises(ModelError, match="service.family"):
        build_model(cfg)


@pytest.mark.parametrize("kwargs", [dict(mu=0), dict(lam=1.0), dict(B=-1), dict(B=1.5)])
def test_model_validation(kwargs):
    base = dict(mu=1.0, batch=BatchLaw.constant(1), service=Erlang(1, 1.0), lam=0.0, B=2)
    with pytest.raises(ModelError):
        QueueModel(**{**base, **kwargs})


def test_batch_validation():
    with pytest.raises(ModelError, match="normalized"):
        BatchLaw({1: 0.5, 2: 0.4})
    with pytest.raises(ModelError, match="a_0"):
        BatchLaw({0: 0.5, 1: 0.5})
    with pytest.raises(ModelError):
        BatchLaw({1: 1.0}, cap=0)


def test_residual_beyond_support():
    with pytest.raises(AgeBeyondSupport):
        Deterministic(1.0).residual(1.0)
    with pytest.raises(AgeBeyondSupport):
        Empirical([0.0, 1.0], [0.0, 1.0]).residual(2.0)


def test_critical_rescaling():
    m = ALL_FAMILIES[0]().critical()
    assert m.rho == pytest.approx(1.0, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=8),
       st.floats(0.0, 0.5), st.floats(0.0, 0.9))
def test_batch_law_moments(w, tail, ratio):
    w = np.array(w) / sum(w) * (1 - tail)
    b = BatchLaw(list(w), tail_mass=tail, tail_ratio=ratio)
    pmf = b.pmf(3000)
    n = np.arange(len(pmf))
    assert pmf.sum() == pytest.approx(1.0, abs=1e-9)
    assert b.mean == pytest.approx(float(n @ pmf), rel=1e-8)
    assert b.second_moment == pytest.approx(float(n ** 2 @ pmf), rel=1e-7)
    z = 0.63
    assert b.pgf(z) == pytest.approx(float(z ** n @ pmf), rel=1e-12)
    assert b.sf(2) == pytest.approx(float(pmf[3:].sum()), abs=1e-12)


@pytest.mark.parametrize("family", ALL_FAMILIES)
def test_service_lt_matches_samples(family):
    law = family().service
    x = law.sample(np.random.default_rng(0), 200_000)
    assert np.exp(-0.8 * x).mean() == pytest.approx(float(np.real(law.lt(0.8))), abs=5e-3)
    assert x.mean() == pytest.approx(law.mean, rel=1e-2)
