import numpy as np
import pytest
from scipy import integrate, stats

from conftest import batch_erlang, deterministic, empirical
from fbqueue.compound_poisson import lt_row, mixed_coeffs, occupation_row, pmf_at_t
from fbqueue.model import BatchLaw, Exponential, QueueModel


def test_poisson_case():
    m = QueueModel(mu=2.0, batch=BatchLaw.constant(1), service=Exponential(1.0), B=3)
    row = pmf_at_t(m, 3.0, 20)
    assert np.allclose(row.values, stats.poisson.pmf(np.arange(21), 6.0), atol=1e-15, rtol=1e-12)


def test_pmf_by_convolution():
    m = batch_erlang()
    t, K = 1.7, 15
    a = m.batch.pmf(K)
    ref = np.zeros(K + 1)
    conv = np.zeros(K + 1)
    conv[0] = 1.0
    for n in range(60):
        ref += stats.poisson.pmf(n, m.mu * t) * conv
        conv = np.convolve(conv, a)[: K + 1]
    assert np.allclose(pmf_at_t(m, t, K).values, ref, atol=1e-15)


def test_large_intensity_no_underflow():
    m = batch_erlang()
    row = pmf_at_t(m, 2000.0, 4000)
    assert np.isfinite(row.values).all()
    assert row.values.sum() == pytest.approx(1.0, abs=1e-9)


def test_lt_row_is_transform():
    m = batch_erlang()
    s, K = 0.6, 8
    row = lt_row(m, s, K)
    for k in (0, 3, 8):
        ref = integrate.quad(lambda t: s * np.exp(-s * t) * pmf_at_t(m, t, K)[k], 0, np.inf, limit=200)[0]
        assert row[k] == pytest.approx(ref, rel=1e-8)


def test_occupation_row_limit():
    m = batch_erlang()
    occ = occupation_row(m, 200)
    # renewal theorem: time at level i tends to 1 / (mu E kappa)
    assert occ[200] == pytest.approx(1 / (m.mu * m.batch.mean), rel=1e-6)


@pytest.mark.parametrize("family", [batch_erlang, deterministic, empirical])
def test_mixed_coeffs_sum_to_service_lt(family):
    m = family()
    s, x = 0.4, 0.1
    row = mixed_coeffs(m, x, s, 400)
    assert row.values.sum() == pytest.approx(float(np.real(m.service.residual(x).lt(s))), rel=1e-10)
    # θ-coefficients of f̃_x(s - k(θ)) at θ = 0.5
    th = 0.5
    from fbqueue.model import cumulant
    lhs = float(np.real(m.service.residual(x).lt(s - cumulant(m, th))))
    assert float(row.values @ th ** np.arange(401)) == pytest.approx(lhs, rel=1e-10)
