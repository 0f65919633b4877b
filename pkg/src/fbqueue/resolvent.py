"""Resolvent sequences ``Q_k^s(x)``, their partial sums and the ``A`` sequence.

``Q_k^s(x)`` are the power-series coefficients of

    Q_θ^s(x) = (1-λ) f̃_x(s - k(θ)) / ((1-λ) f̃(s - k(θ)) + λ - θ),   |θ| < c(s).

They grow like ``c(s)^{-k}``, so every formula built on them that is
bounded by one involves cancellation of that size; tables are therefore
computed with compensated sums.  Tables also keep the scaled sequences
``Q_k c^k`` (and likewise for ``S`` and ``A``), which stay of order one
far beyond the index where ``Q_k`` itself overflows; geometric-δ means
are formed from those.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .compound_poisson import _mixed_for_law, lt_coeffs, renewal_mass
from .model import ModelError, QueueModel, cumulant
from .root import RootValue, solve_c

__all__ = ["ResolventTable", "GeomExpectations", "q_table", "q_contour", "geom_expectations",
           "geom_mean", "geom_scaled", "truncation_terms", "occupation_a"]

TRUNC_TOL = 1e-12
TRUNC_SAFETY = 10.0
TABLE_CAP = 512
SETTLE_TOL = 1e-14


@dataclass(frozen=True)
class ResolventTable:
    s: float
    x: float
    root: RootValue
    q: np.ndarray        # Q_k^s(x)
    ssum: np.ndarray     # S_k^s(x) = Q_0 + ... + Q_k
    a: np.ndarray        # A_x^k(s)
    lt_row: np.ndarray   # ρ̃_k(s)
    coeffs: np.ndarray   # f_k^s(x)
    scaled: dict         # "q", "ssum", "a" -> sequence times c^k
    lam: float

    def geom(self, which: str, m: int, J: int) -> float:
        """``E X_{δ+m}`` for ``X`` one of ``"q"``, ``"ssum"``, ``"a"``, from the scaled table."""
        return geom_scaled(self.lam, self.root.c, self.scaled[which], m, J)

    @property
    def k_max(self) -> int:
        return len(self.q) - 1

    def Q(self, k: int) -> float:
        return 0.0 if k < 0 else float(self.q[k])

    def S(self, k: int) -> float:
        return 0.0 if k < 0 else float(self.ssum[k])

    def A(self, k: int) -> float:
        return 0.0 if k < 0 else float(self.a[k])


@dataclass(frozen=True)
class GeomExpectations:
    """``E Q_{δ+B}``, ``E S_{δ+B-1}`` and ``E A_0^{δ+B}`` for ``δ ~ ge(λ)``."""
    eq: float
    es: float
    ea: float
    terms: int
    tail_bound: float


def _fsum_conv(a: np.ndarray, b: np.ndarray, k: int) -> float:
    """``Σ_{i=0}^{k} a_i b_{k-i}`` with compensated summation."""
    return math.fsum((a[: k + 1] * b[k::-1]).tolist())


def truncation_terms(model: QueueModel, c: float) -> int:
    """Terms ``J`` so that ``10 (λ/c)^J / (1 - λ/c)`` is below ``1e-12``."""
    lam = model.lam
    if lam == 0:
        return 1
    ratio = lam / c
    if ratio >= 1:
        raise ModelError("geometric expectation diverges: lambda >= c(s)")
    need = math.log(TRUNC_TOL * (1 - ratio) / TRUNC_SAFETY) / math.log(ratio)
    return max(1, int(math.ceil(need)))


def geom_scaled(lam: float, c: float, seq: np.ndarray, m: int, J: int) -> float:
    """``E X_{δ+m}`` from ``seq[n] = X_n c^n``; indices past the end reuse the settled last value."""
    r = lam / c
    n = min(J, len(seq) - 1 - m)
    idx = m + np.arange(1, n + 1)
    vals = np.where(idx >= 0, seq[np.clip(idx, 0, None)], 0.0)
    # (1-λ) λ^{i-1} c^{-(m+i)} = c^{-m} (1-λ)/c (λ/c)^{i-1}
    w = (1 - lam) / c * r ** np.arange(n)
    terms = (w * vals).tolist()
    if J > n:
        terms.append((1 - lam) / c * seq[-1] * (r ** n - r ** J) / (1 - r))
    return math.fsum(terms) * c ** (-m)


def geom_mean(lam: float, seq: np.ndarray, m: int, J: int) -> float:
    """``E seq[δ + m] = (1-λ) Σ_{i=1}^{J} λ^{i-1} seq[m + i]``; ``seq[n] = 0`` for n < 0."""
    idx = m + np.arange(1, J + 1)
    vals = np.where(idx >= 0, seq[np.clip(idx, 0, None)], 0.0)
    w = (1 - lam) * lam ** np.arange(J)
    return math.fsum((w * vals).tolist())


def _build(model: QueueModel, x: float, s: float, k_max: int) -> ResolventTable:
    lam = model.lam
    a = model.batch.pmf(k_max)
    law0 = model.service
    f0 = _mixed_for_law(law0, a, model.mu, s, k_max)
    fx = f0 if x == 0 else _mixed_for_law(law0.residual(x), a, model.mu, s, k_max)
    root = solve_c(model, s)
    c = root.c
    # work with Q_k c^k: the recurrence keeps its form with f_j -> f_j c^j
    pw = c ** np.arange(k_max + 1)
    g0, gx = f0 * pw, fx * pw
    denom = lam + (1 - lam) * f0[0]
    qs = np.zeros(k_max + 1)
    for k in range(k_max + 1):
        terms = [(1 - lam) * gx[k]]
        if k:
            terms.append(c * qs[k - 1])
            terms.extend((-(1 - lam) * qs[:k] * g0[k:0:-1]).tolist())
        qs[k] = math.fsum(terms) / denom
    ss = np.empty(k_max + 1)
    acc = 0.0
    for k in range(k_max + 1):
        acc = c * acc + qs[k]
        ss[k] = acc
    if s > 0:
        rt = lt_coeffs(a, model.mu, s, k_max)
        cum = np.cumsum(rt)
        rts = rt * pw
        as_ = np.array([cum[k] * pw[k] - _fsum_conv(rts, qs, k) / (1 - lam) for k in range(k_max + 1)])
    else:
        rt = np.zeros(k_max + 1)
        as_ = np.zeros(k_max + 1)
    with np.errstate(over="ignore"):
        inv = c ** -np.arange(k_max + 1, dtype=float)
        q, ssum, av = qs * inv, ss * inv, as_ * inv
    return ResolventTable(s, x, root, q, ssum, av, rt, fx, {"q": qs, "ssum": ss, "a": as_}, lam)


@lru_cache(maxsize=256)
def _cached(model: QueueModel, x: float, s: float, k_max: int) -> ResolventTable:
    return _build(model, x, s, k_max)


def q_table(model: QueueModel, x: float, s: float, k_max: int) -> ResolventTable:
    """``Q_0^s(x) .. Q_{k_max}^s(x)`` with partial sums and ``A_x^k(s)``."""
    if s < 0:
        raise ModelError("resolvent needs s >= 0")
    if k_max < 0:
        raise ModelError("k_max must be >= 0")
    model.service.residual(x)  # age check
    return _cached(model, float(x), float(s), int(k_max))


def table_for(model: QueueModel, x: float, s: float, need: int) -> tuple[ResolventTable, int]:
    """Table long enough for indices ``need + J`` plus the truncation ``J``."""
    c = solve_c(model, s).c
    J = truncation_terms(model, c)
    # when λ/c is close to 1, J is huge but the scaled sequences settle long
    # before; geom() sums the settled remainder in closed form
    extra = min(J, TABLE_CAP)
    while True:
        tab = q_table(model, x, s, need + extra + 1)
        if extra >= J or all(settled(v) for v in tab.scaled.values()):
            return tab, J
        extra = min(J, 2 * extra)


def settled(seq: np.ndarray) -> bool:
    a, b = seq[-1], seq[-2]
    return abs(a - b) <= SETTLE_TOL * max(1.0, abs(a))


def geom_expectations(model: QueueModel, x: float, s: float) -> GeomExpectations:
    """Geometric-δ expectations entering the finite-buffer formulas.

    ``E Q_{δ+B}``, ``E S_{δ+B-1}`` and ``E A_0^{δ+B}`` are always at age 0;
    ``x`` is only validated (age-dependent expectations come from
    :meth:`ResolventTable.geom` on ``q_table(model, x, s, ...)``).
    """
    model.service.residual(x)
    tab, J = table_for(model, 0.0, s, model.B + 1)
    B, lam = model.B, model.lam
    c = tab.root.c
    bound = TRUNC_SAFETY * (lam / c) ** J if lam > 0 else 0.0
    return GeomExpectations(eq=tab.geom("q", B, J), es=tab.geom("ssum", B - 1, J),
                            ea=tab.geom("a", B, J), terms=J, tail_bound=bound)


def occupation_a(model: QueueModel, k_max: int) -> np.ndarray:
    """``lim_{s→0} A_0^u(s)/s = Σ_{i<=u} ρ_i [1 - Q_{u-i}(0)/(1-λ)]`` for u = 0..k_max."""
    tab = q_table(model, 0.0, 0.0, k_max)
    rho = renewal_mass(model.batch.pmf(k_max), k_max) / model.mu
    cum = np.cumsum(rho)
    return np.array([cum[u] - _fsum_conv(rho, tab.q, u) / (1 - model.lam) for u in range(k_max + 1)])


def q_contour(model: QueueModel, x: float, s: float, k: int, *, alpha: float | None = None,
              n_points: int = 256, tol: float = 1e-11, max_points: int = 1 << 18) -> float:
    """``Q_k^s(x)`` as a contour integral on ``|θ| = α`` (trapezoidal rule).

    The node count doubles until the relative change drops below ``tol``.
    """
    c = solve_c(model, s).c
    if alpha is None:
        alpha = 0.9 * c
    if not 0 < alpha < c:
        raise ModelError(f"contour radius too large: alpha={alpha} must be below c(s)={c}")
    lam = model.lam
    law0, lawx = model.service, model.service.residual(x)

    def coeff(n):
        th = alpha * np.exp(2j * np.pi * np.arange(n) / n)
        arg = s - cumulant(model, th)
        vals = (1 - lam) * lawx.lt(arg) / ((1 - lam) * law0.lt(arg) + lam - th)
        return (np.fft.fft(vals)[k % n] / n).real / alpha ** k

    n = max(n_points, 2 * (k + 1))
    prev = coeff(n)
    while n < max_points:
        n *= 2
        cur = coeff(n)
        if abs(cur - prev) <= tol * max(1.0, abs(cur)):
            return cur
        prev = cur
    raise ModelError(f"contour integral did not settle with {n} nodes")
