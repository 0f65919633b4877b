"""The finite-buffer queue with partial rejection.

Content ranges over ``0..B+1``.  An arriving batch of κ customers finding
``r`` places taken admits ``min(B+1-r, κ)`` and loses the rest; a service
completion removes ``min(r, δ)``.  While the system is busy its content
minus one behaves like the free process reflected at ``B``, which is how
every formula here is assembled from the resolvent tables.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exit import _int
from .model import ModelError, QueueModel
from .reflected import reflected_passage_geometric, reflection_ratio
from .resolvent import geom_scaled, occupation_a, q_table, table_for

__all__ = ["SystemState", "CountDistribution", "busy_period_lt", "busy_period_mean", "first_loss_lt",
           "first_loss_mean", "first_loss_joint", "first_loss_count", "transient_counts",
           "stationary_dist"]


@dataclass(frozen=True)
class SystemState:
    """``r`` customers present, current service ``x`` time units old."""
    r: int
    x: float = 0.0

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 0:
            raise ModelError("state r must be a nonnegative integer")
        if self.x < 0:
            raise ModelError("service age x must be >= 0")
        if self.r == 0 and self.x != 0:
            raise ModelError("an empty system has no service in progress: r=0 needs x=0")
        object.__setattr__(self, "r", int(self.r))

    def check(self, model: QueueModel) -> "SystemState":
        if self.r > model.B + 1:
            raise ModelError(f"state r={self.r} exceeds capacity B+1={model.B + 1}")
        if self.r:
            model.service.residual(self.x)
        return self


@dataclass(frozen=True)
class CountDistribution:
    """Law of the number in system over ``0..B+1``.

    ``masses[u] = P[d = u]``.  For transient laws ``raw[u]`` keeps the
    transform values as produced by the formulas: ``raw[0] = P[d = 0]`` and,
    for ``u >= 1``, ``raw[u] = P[1 <= d <= u]`` (level 0 excluded), so that
    ``raw[0] + raw[B+1] = 1``.
    """
    masses: np.ndarray
    raw: np.ndarray | None = None
    s: float | None = None
    level0_excluded: bool = True

    def cdf(self, u: int) -> float:
        """``P[d <= u]``."""
        if self.raw is not None:
            return float(self.raw[0] if u == 0 else self.raw[0] + self.raw[u])
        return float(np.sum(self.masses[: u + 1]))

    def total(self) -> float:
        return math.fsum(self.masses.tolist())


def _state(state) -> SystemState:
    if isinstance(state, SystemState):
        return state
    r, x = state if isinstance(state, tuple) else (state, 0.0)
    return SystemState(r, x)


# ---------------------------------------------------------------------------
# busy period


def busy_period_lt(model: QueueModel, state, s: float) -> float:
    """``E e^{-s b_r(x)}``; the busy period is the passage of the reflected process below 0."""
    st = _state(state).check(model)
    if st.r == 0:
        raise ModelError("busy period needs r >= 1 (no busy period started)")
    if s < 0:
        raise ModelError("busy_period_lt needs s >= 0")
    if s == 0:
        return 1.0
    return reflection_ratio(model, st.x, st.r - 1, model.B, s)


def busy_period_mean(model: QueueModel, state) -> float:
    st = _state(state).check(model)
    if st.r == 0:
        raise ModelError("busy period needs r >= 1 (no busy period started)")
    return reflected_passage_geometric(model, st.x, st.r - 1, model.B, 0.0).passage_mean


# ---------------------------------------------------------------------------
# first loss


def _loss_pieces(model: QueueModel, s: float):
    B, mu = model.B, model.mu
    tab0, J = table_for(model, 0.0, s, B + 1)
    a = model.batch.pmf(B + 1)
    eq = tab0.geom("q", B, J)
    ea = tab0.geom("a", B, J)
    qt = math.fsum(a[i] * tab0.Q(B + 1 - i) for i in range(1, B + 2))
    at = math.fsum(a[i] * tab0.A(B + 1 - i) for i in range(1, B + 2))
    w = mu / (s + mu)
    Y = (ea - w * at - s / (s + mu)) / (eq - w * qt)
    return eq, ea, Y


def first_loss_lt(model: QueueModel, state, s: float) -> float:
    """``E e^{-s l_r(x)}``, ``l`` the epoch of the first arrival that loses customers."""
    st = _state(state).check(model)
    if not s > 0:
        raise ModelError("first_loss_lt needs s > 0")
    eq, ea, Y = _loss_pieces(model, s)
    if st.r == 0:
        return 1.0 - ea + eq * Y
    k = model.B + 1 - st.r
    tab = q_table(model, st.x, s, k)
    return 1.0 - tab.A(k) + tab.Q(k) * Y


def first_loss_mean(model: QueueModel, state, *, h: float | None = None) -> float:
    """Mean first-loss time from Richardson-extrapolated difference quotients of the transform.

    The step is chosen so that ``h`` times the mean is about ``1e-3``; two
    extrapolation levels leave a relative error of order ``(h E l)^3``.
    """
    def quotient(step):
        return (1.0 - first_loss_lt(model, state, step)) / step

    if h is None:
        h0 = 1e-4 / max(model.service.mean, 1.0 / model.mu)
        pilot = 2 * quotient(h0) - quotient(2 * h0)
        h = 1e-3 / pilot
    d1, d2, d4 = quotient(h), quotient(2 * h), quotient(4 * h)
    r1, r2 = 2 * d1 - d2, 2 * d2 - d4
    return (4 * r1 - r2) / 3


def _need_single_departures(model: QueueModel):
    if model.lam != 0:
        raise ModelError("joint loss law implemented only for δ≡1 (lambda = 0)")


def _joint(model: QueueModel, st: SystemState, s: float, e) -> float:
    """``E[e^{-s l} w(i)]`` where ``e(i)`` is the weighted excess ``E[w(κ-i); κ>i]``."""
    B, mu = model.B, model.mu
    a = model.batch.pmf(B + 1)
    t0 = q_table(model, 0.0, s, B + 1)
    if st.r == 0:
        k, tab = B + 1, t0
    else:
        k, tab = B + 1 - st.r, q_table(model, st.x, s, B + 1)
    first = mu / s * math.fsum(e(i) * (tab.A(k - i) - tab.A(k - i - 1)) for i in range(k + 1))
    qb = t0.Q(B + 1)
    qt = math.fsum(a[i] * t0.Q(B + 1 - i) for i in range(1, B + 2))
    num = math.fsum(e(i) * (t0.Q(B + 1 - i) - t0.Q(B - i)) for i in range(B + 2))
    return first + mu * tab.Q(k) / qb * num / (s + mu - mu * qt / qb)


def first_loss_joint(model: QueueModel, state, s: float, z: complex) -> complex:
    """``E[e^{-s l_r(x)} z^{i}]`` with ``i`` the number lost at the first loss (``|z| <= 1``)."""
    _need_single_departures(model)
    st = _state(state).check(model)
    if not s > 0:
        raise ModelError("first_loss_joint needs s > 0")
    if abs(z) > 1:
        raise ModelError("first_loss_joint needs |z| <= 1")
    return _joint(model, st, s, lambda i: model.batch.excess_pgf(i, z))


def first_loss_count(model: QueueModel, state, s: float, n: int) -> float:
    """``E[e^{-s l_r(x)}; i = n]``; at small ``s`` this is the law of the number lost."""
    _need_single_departures(model)
    st = _state(state).check(model)
    n = _int("n", n, 1)
    if not s > 0:
        raise ModelError("first_loss_count needs s > 0")
    a = model.batch.pmf(n + model.B + 2)
    return _joint(model, st, s, lambda i: a[n + i])


# ---------------------------------------------------------------------------
# number in system


def _btilde(model: QueueModel, s: float) -> float:
    B = model.B
    a = model.batch.pmf(B)
    terms = [model.batch.sf(B) * busy_period_lt(model, SystemState(B + 1), s)]
    terms += [a[i] * busy_period_lt(model, SystemState(i), s) for i in range(1, B + 1)]
    return math.fsum(terms)


def transient_counts(model: QueueModel, state, s: float, u: int | None = None):
    """Number in system at an independent ``exp(s)`` time.

    With ``u`` given returns the raw transform value ``q^s(u)`` (see
    :class:`CountDistribution` for its level-0 convention); otherwise the
    whole :class:`CountDistribution`.
    """
    st = _state(state).check(model)
    if not s > 0:
        raise ModelError("transient_counts needs s > 0")
    B, lam, mu = model.B, model.lam, model.mu
    tab0, J = table_for(model, 0.0, s, B + 1)
    den = s + mu - mu * _btilde(model, s)
    if st.r == 0:
        b = 1.0
        base = lambda v: tab0.geom("a", v - 1, J)  # noqa: E731
    else:
        b = busy_period_lt(model, st, s)
        tabx = q_table(model, st.x, s, B + 1)
        base = lambda v: tabx.A(v - st.r)  # noqa: E731

    def C(v):
        return (s * tab0.Q(v) / (1 - lam) - s
                + lam * (s + mu) * (tab0.A(v) - tab0.geom("a", v, J)))

    raw = np.empty(B + 2)
    raw[0] = s * b / den
    for v in range(1, B + 1):
        raw[v] = base(v) + b * C(v) / den
    raw[B + 1] = 1.0 - s * b / den
    if u is not None:
        u = _int("u", u, 0)
        if u > B + 1:
            raise ModelError("u must lie in 0..B+1")
        return float(raw[u])
    cdf = raw.copy()
    cdf[1:] += raw[0]
    masses = np.diff(np.concatenate([[0.0], cdf]))
    return CountDistribution(masses, raw, s)


def stationary_dist(model: QueueModel) -> CountDistribution:
    """Long-run law of the number in system."""
    B, lam, mu = model.B, model.lam, model.mu
    tab0, J = table_for(model, 0.0, 0.0, B + 1)
    n = len(tab0.q) - 1
    occ = occupation_a(model, n)
    ahat = model.batch.sf_array(B)
    eq = tab0.geom("q", B, J)
    inner = lam / (1 - lam) * eq + math.fsum((ahat[: B + 1] * tab0.q[B::-1]).tolist())
    pi0 = 1.0 / (1.0 + mu * model.service.mean * inner)

    def C(v):
        if v == 0:
            return 0.0
        return tab0.Q(v) / (1 - lam) - 1 + lam * mu * (occ[v] - geom_scaled(lam, 1.0, occ, v, J))

    Cs = np.array([C(v) for v in range(B + 1)])
    pi = np.empty(B + 2)
    pi[0] = pi0
    pi[1:B + 1] = pi0 * np.diff(Cs)
    pi[B + 1] = 1.0 - pi0 * (1.0 + Cs[B])
    return CountDistribution(pi, None, None)
