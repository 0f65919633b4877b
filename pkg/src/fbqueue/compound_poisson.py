"""Compound-Poisson kernels.

``π(t)`` is the batch-arrival counting process, ``E θ^π(t) = exp(t k(θ))``.
The kernels are

* ``ρ_k(t) = P[π(t) = k]``                       (:func:`pmf_at_t`)
* ``ρ̃_k(s) = s ∫ e^{-st} ρ_k(t) dt``              (:func:`lt_row`)
* ``ρ_i = ∫ ρ_i(t) dt``                           (:func:`occupation_row`)
* ``f_k^s(x) = E[e^{-s η_x}; π(η_x) = k]``        (:func:`mixed_coeffs`)
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import Deterministic, Empirical, ErlangMixture, ModelError, QueueModel, ServiceLaw

__all__ = ["KernelRow", "pmf_at_t", "lt_row", "occupation_row", "mixed_coeffs", "gauss_legendre_panels"]

_RESCALE = 1e250


@dataclass(frozen=True)
class KernelRow:
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)


# ---------------------------------------------------------------------------
# raw array kernels (shared with the resolvent code)


def panjer(a: np.ndarray, mu: float, t, k_max: int) -> np.ndarray:
    """``ρ_k(t)`` for k = 0..k_max, vectorised over ``t``; shape ``(k_max+1, len(t))``.

    Runs the recursion on rescaled columns so that large ``μt`` neither
    underflows ``ρ_0`` nor overflows the intermediate values.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    lam = mu * t
    out = np.zeros((k_max + 1, len(t)))
    out[0] = 1.0
    logscale = -lam.copy()
    ja = np.arange(k_max + 1) * a[: k_max + 1]
    for k in range(1, k_max + 1):
        out[k] = lam / k * (ja[k:0:-1] @ out[:k])
        big = out[k] > _RESCALE
        if np.any(big):
            out[:k + 1, big] /= _RESCALE
            logscale[big] += math.log(_RESCALE)
    with np.errstate(under="ignore"):
        res = out * np.exp(logscale)
    # columns whose scale underflowed: recompute in log space
    res[:, lam == 0] = 0.0
    res[0, lam == 0] = 1.0
    return res


def lt_coeffs(a: np.ndarray, mu: float, sigma: float, k_max: int) -> np.ndarray:
    """Coefficients of ``σ / (σ - k(θ))``: ``σ/(σ+μ)`` then ``μ/(σ+μ) Σ a_j r_{k-j}``."""
    r = np.zeros(k_max + 1)
    r[0] = sigma / (sigma + mu)
    q = mu / (sigma + mu)
    for k in range(1, k_max + 1):
        r[k] = q * (a[k:0:-1] @ r[:k])
    return r


def renewal_mass(a: np.ndarray, k_max: int) -> np.ndarray:
    """``v_0 = 1``, ``v_i = Σ_{j<=i} a_j v_{i-j}``."""
    v = np.zeros(k_max + 1)
    v[0] = 1.0
    for i in range(1, k_max + 1):
        v[i] = a[i:0:-1] @ v[:i]
    return v


def _gl_nodes(order: int):
    return np.polynomial.legendre.leggauss(order)


def gauss_legendre_panels(fun, lo: float, hi: float, *, order: int = 32, tol: float = 1e-11,
                          max_depth: int = 40):
    """Adaptive Gauss-Legendre integral of a vector-valued ``fun(t_array) -> (m, n)``.

    A panel is accepted when its ``order``-point rule agrees with the sum of
    the rules on its two halves to ``tol`` in every component.
    """
    x, w = _gl_nodes(order)

    def rule(a, b):
        t = 0.5 * (b - a) * x + 0.5 * (b + a)
        return 0.5 * (b - a) * (fun(t) @ w)

    total = 0.0
    stack = [(lo, hi, rule(lo, hi), 0)]
    achieved = 0.0
    while stack:
        a, b, whole, depth = stack.pop()
        m = 0.5 * (a + b)
        left, right = rule(a, m), rule(m, b)
        err = np.max(np.abs(left + right - whole))
        if err <= tol or depth >= max_depth:
            total = total + left + right
            achieved = max(achieved, err)
        else:
            stack.append((a, m, left, depth + 1))
            stack.append((m, b, right, depth + 1))
    return total, achieved


# ---------------------------------------------------------------------------
# public operations


def pmf_at_t(model: QueueModel, t: float, k_max: int) -> KernelRow:
    """``ρ_0(t) .. ρ_{k_max}(t)`` by the Panjer recursion."""
    if t < 0:
        raise ModelError("pmf_at_t needs t >= 0")
    if k_max < 0:
        raise ModelError("k_max must be >= 0")
    a = model.batch.pmf(k_max)
    return KernelRow(panjer(a, model.mu, [t], k_max)[:, 0], {"t": t})


def lt_row(model: QueueModel, s: float, k_max: int) -> KernelRow:
    """``ρ̃_0(s) .. ρ̃_{k_max}(s)``; they sum to 1 over all k."""
    if not s > 0:
        raise ModelError("lt_row needs s > 0")
    a = model.batch.pmf(k_max)
    return KernelRow(lt_coeffs(a, model.mu, s, k_max), {"s": s})


def occupation_row(model: QueueModel, k_max: int) -> KernelRow:
    """Expected time ``ρ_i`` spent by ``π`` at level i, i = 0..k_max."""
    a = model.batch.pmf(k_max)
    return KernelRow(renewal_mass(a, k_max) / model.mu, {})


def _mixed_for_law(law: ServiceLaw, a: np.ndarray, mu: float, s: float, k_max: int,
                   tol: float = 1e-11) -> np.ndarray:
    if isinstance(law, ErlangMixture):
        out = np.zeros(k_max + 1)
        cache = {}
        for w, n, v in law.components():
            if v not in cache:
                cache[v] = (v / (v + s)) * lt_coeffs(a, mu, s + v, k_max)
            g = cache[v]
            p = g
            for _ in range(int(n) - 1):
                p = np.convolve(p, g)[: k_max + 1]
            out += w * p
        return out
    if isinstance(law, Deterministic):
        return math.exp(-s * law.d) * panjer(a, mu, [law.d], k_max)[:, 0]
    if isinstance(law, Empirical):
        total = np.zeros(k_max + 1)
        for lo, hi, p in zip(*law.panels()):
            dens = p / (hi - lo)

            def integrand(t, dens=dens):
                return dens * np.exp(-s * t) * panjer(a, mu, t, k_max)

            val, _ = gauss_legendre_panels(integrand, lo, hi, tol=tol)
            total += val
        return total
    raise ModelError(f"no coefficient rule for service family '{law.family}'")


def mixed_coeffs(model: QueueModel, x: float, s: float, k_max: int) -> KernelRow:
    """``f_k^s(x) = E[e^{-s η_x}; π(η_x) = k]`` for k = 0..k_max.

    These are the θ-coefficients of ``f̃_x(s - k(θ))``.
    """
    if s < 0:
        raise ModelError("mixed_coeffs needs s >= 0")
    law = model.service.residual(x)
    a = model.batch.pmf(k_max)
    return KernelRow(_mixed_for_law(law, a, model.mu, s, k_max), {"s": s, "x": x})
