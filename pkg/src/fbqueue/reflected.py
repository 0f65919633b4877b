"""The free process reflected at its supremum.

``D̄^B_r(x, t)`` starts at level ``r`` and is pushed back to ``B`` whenever it
would exceed it.  Its first passage below 0 is the busy period of the
queue started with ``r + 1`` customers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .compound_poisson import gauss_legendre_panels
from .exit import _int, s_factor, two_sided, upper_exit_density
from .model import Deterministic, Empirical, ModelError, QueueModel
from .resolvent import q_table, table_for
from .root import solve_c

__all__ = ["ReflectedLaw", "QuadratureError", "reflected_passage_general", "reflected_passage_geometric",
           "reflected_increments", "reflected_ergodic", "reflected_two_sided", "reflection_ratio",
           "upper_completion"]


class QuadratureError(ModelError):
    def __init__(self, msg, achieved):
        super().__init__(msg)
        self.achieved = achieved


@dataclass(frozen=True)
class ReflectedLaw:
    """Passage of ``D̄^B_r(x, ·)`` below zero."""
    model: QueueModel
    x: float
    r: int
    B: int
    s: float
    passage_lt: float       # E e^{-s τ̄}
    passage_mean: float     # E τ̄

    def overshoot_pmf(self, m: int) -> float:
        """``E[e^{-s τ̄}; T̄ = m]``; the overshoot is ge(λ) independent of τ̄."""
        lam = self.model.lam
        return self.passage_lt * (1 - lam) * lam ** (m - 1)

    def increment_cdf(self, u: int) -> float:
        """``P[D̄^k_0(x, ν_s) <= u]`` with ``k = B - r``."""
        return reflected_increments(self.model, self.x, self.B - self.r, u, self.s)

    def ergodic_cdf(self, u: int) -> float:
        return reflected_ergodic(self.model, self.B - self.r, u)


def reflection_ratio(model: QueueModel, x: float, r: int, B: int, s: float) -> float:
    """``(f̃_x + (1-f̃) S_{B-r-1}(x)) / (f̃ + (1-f̃) E S_{δ+B-1})``."""
    k = B - r
    tabx = q_table(model, x, s, max(k, 0))
    tab0, J = table_for(model, 0.0, s, B + 1)
    es = tab0.geom("ssum", B - 1, J)
    ft = float(np.real(model.service.lt(s)))
    fx = float(np.real(model.service.residual(x).lt(s)))
    return (fx + (1 - ft) * tabx.S(k - 1)) / (ft + (1 - ft) * es)


def reflected_passage_geometric(model: QueueModel, x: float, r: int, B: int, s: float) -> ReflectedLaw:
    """Lower passage of the reflected process when ``δ ~ ge(λ)``."""
    r, B = _int("r", r, 0), _int("B", B, 0)
    if r > B:
        raise ModelError("reflected passage needs 0 <= r <= B")
    if s < 0:
        raise ModelError("reflected passage needs s >= 0")
    lt = 1.0 if s == 0 else reflection_ratio(model, x, r, B, s)
    # mean from the s = 0 tables
    tabx = q_table(model, x, 0.0, max(B - r, 0))
    tab0, J = table_for(model, 0.0, 0.0, B + 1)
    es = tab0.geom("ssum", B - 1, J)
    eta = model.service.mean
    mean = model.service.residual(x).mean - eta + eta * (es - tabx.S(B - r - 1))
    return ReflectedLaw(model, float(x), r, B, float(s), lt, mean)


def _residual_lt_many(law, ls, s):
    if isinstance(law, Deterministic):
        return np.exp(-s * (law.d - ls))
    return np.array([float(np.real(law.residual(float(l)).lt(s))) for l in ls])


def _support_end(law) -> float:
    if isinstance(law, Deterministic):
        return law.d
    if isinstance(law, Empirical):
        return float(law.times[-1])
    L = max(law.mean, 1e-3)
    while law.sf(L) > 1e-15:
        L *= 2
    return L


def upper_completion(model: QueueModel, x: float, r: int, k: int, s: float, *, tol: float = 1e-8) -> float:
    """``a^k(x) = ∫ V^k(x, dl, s) f̃_l(s)`` by adaptive quadrature over the exit age."""
    law = model.service
    end = _support_end(law)
    cuts = sorted({0.0, min(x, end), end})
    if isinstance(law, Empirical):
        cuts = sorted(set(cuts) | set(float(t) for t in law.times))
    total, worst = 0.0, 0.0

    def integrand(ls):
        dens = upper_exit_density(model, x, r, k, ls, s)
        return (dens * _residual_lt_many(law, ls, s))[None, :]

    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if hi <= lo:
            continue
        val, ach = gauss_legendre_panels(integrand, lo, hi, tol=tol)
        total += float(val[0])
        worst = max(worst, ach)
    if worst > tol:
        raise QuadratureError(f"exit-age quadrature reached only {worst:.3g} (wanted {tol:.1g})", worst)
    return total


def reflected_passage_general(model: QueueModel, x: float, r: int, B: int, m: int, s: float, *,
                              delta_pmf=None,
                              lower: Optional[Callable[[float, int, int, int, float], float]] = None,
                              upper: Optional[Callable[[float, int, int, float], float]] = None,
                              tol: float = 1e-8) -> float:
    """``E[e^{-s τ̄}; T̄ = m]`` for a general departure-batch law.

    ``delta_pmf[i] = P[δ = i]``.  The free-process ingredients enter as
    callables: ``lower(x, r, k, m, s)`` is the lower-exit transform of
    ``[-r, k]`` with overshoot ``m`` and ``upper(x, r, k, s)`` is
    ``a^k(x) = ∫ V^k(x, dl, s) f̃_l(s)``.  Left as ``None`` they are computed
    from the geometric-δ exit laws of ``model``, which is only valid when
    ``delta_pmf`` is the model's own ge(λ) law.
    """
    r, B, m = _int("r", r, 0), _int("B", B, 0), _int("m", m, 1)
    if r > B:
        raise ModelError("reflected passage needs 0 <= r <= B")
    if not s > 0:
        raise ModelError("reflected_passage_general needs s > 0")
    geo = model.delta_pmf(B + m + 1)
    if delta_pmf is None:
        pd = geo
    else:
        pd = np.zeros(B + m + 2)
        given = np.asarray(delta_pmf, dtype=float)[: B + m + 2]
        pd[: len(given)] = given
        if (lower is None or upper is None) and not np.allclose(pd, geo, atol=1e-14):
            raise ModelError("non-geometric delta needs explicit lower/upper exit callables")
    if lower is None:
        def lower(x_, r_, k_, m_, s_):
            return two_sided(model, x_, r_, k_, s_).lower_overshoot(m_)
    if upper is None:
        def upper(x_, r_, k_, s_):
            return upper_completion(model, x_, r_, k_, s_, tol=tol)

    A0 = math.fsum(pd[k] * upper(0.0, B - k, k, s) for k in range(1, B + 1) if pd[k] > 0)
    bracket = pd[m + B] + math.fsum(pd[i] * lower(0.0, B - i, i, m, s) for i in range(1, B + 1) if pd[i] > 0)
    return lower(x, r, B - r, m, s) + upper(x, r, B - r, s) / (1 - A0) * bracket


def _F(model: QueueModel, s: float, c: float) -> float:
    return s_factor(model, s) * (1 - c) / (1 - model.lam)


def reflected_increments(model: QueueModel, x: float, k: int, u: int, s: float) -> float:
    """``P[D̄^k_0(x, ν_s) <= u]`` for the process reflected at ``k`` and started at 0."""
    k, u = _int("k", k, 0), _int("u", u)
    if u > k:
        raise ModelError("reflected_increments needs u <= k")
    if not s > 0:
        raise ModelError("reflected_increments needs s > 0")
    if u == k:
        return 1.0
    tab = q_table(model, x, s, k)
    c = tab.root.c
    ft = float(np.real(model.service.lt(s)))
    fx = float(np.real(model.service.residual(x).lt(s)))
    return tab.A(u) + c ** (k - u - 1) * _F(model, s, c) * (fx / (1 - ft) + tab.S(k - 1))


def reflected_ergodic(model: QueueModel, k: int, u: int) -> float:
    """Long-run ``P[D̄^k_0 <= u]``; exists only when ``ρ > 1``."""
    k, u = _int("k", k, 0), _int("u", u)
    if model.rho <= 1:
        raise ModelError("no ergodic reflected law (c=1): needs rho > 1")
    if u >= k:
        return 1.0
    c = solve_c(model, 0.0).c
    Ek = model.batch.mean
    pgf = float(np.real(model.batch.pgf(c)))
    return Ek / model.rho * (1 - c) / (1 - pgf) * c ** (k - u - 1)


def reflected_two_sided(model: QueueModel, x: float, r: int, k: int, u: int, s: float) -> float:
    """``P[D̄^k_0(x, ν_s) <= u, no passage below -r before ν_s]``, ``u`` in ``[-r, k]``."""
    r, k, u = _int("r", r, 0), _int("k", k, 0), _int("u", u)
    if not -r <= u <= k:
        raise ModelError("reflected_two_sided needs -r <= u <= k")
    if not s > 0:
        raise ModelError("reflected_two_sided needs s > 0")
    B = r + k
    ratio = reflection_ratio(model, x, r, B, s)
    if u == k:
        return 1.0 - ratio
    tabx = q_table(model, x, s, k)
    tab0, J = table_for(model, 0.0, s, B + 1)
    return tabx.A(u) - ratio * tab0.geom("a", u + r, J)
