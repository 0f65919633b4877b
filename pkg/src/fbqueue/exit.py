"""One- and two-boundary passage functionals of the free process ``D_x(t)``.

``D_x(t) = π(t) - N_x(t)``: batch arrivals push it up, every service
completion pulls it down by ``δ ~ ge(λ)``.  The two-sided problem is the
exit from ``[-r, k]``; ``B = r + k``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .compound_poisson import panjer
from .model import ModelError, QueueModel, cumulant
from .resolvent import geom_scaled, q_table, settled, table_for
from .root import solve_c

__all__ = ["ExitLaw", "SupInfLaw", "lower_passage", "upper_passage_lt", "upper_passage_density",
           "two_sided", "sup_joint", "trivariate", "sup_inf_law", "s_factor",
           "upper_exit_density"]


def _int(name, v, lo=None):
    if int(v) != v:
        raise ModelError(f"{name} must be an integer")
    v = int(v)
    if lo is not None and v < lo:
        raise ModelError(f"{name} must be >= {lo}")
    return v


def s_factor(model: QueueModel, s: float) -> float:
    """``s / (s - k(c(s)))``, continued to ``s = 0`` by its limit ``max(0, 1 - ρ)``."""
    if s == 0:
        return max(0.0, 1.0 - model.rho)
    c = solve_c(model, s).c
    return s / (s - float(np.real(cumulant(model, c))))


def lower_passage(model: QueueModel, x: float, k: int, m: int, s: float) -> float:
    """``E[e^{-s τ_k(x)}; T_k(x) = m]`` for the passage below level ``-k``."""
    k, m = _int("k", k, 0), _int("m", m, 1)
    if not s > 0:
        raise ModelError("lower_passage needs s > 0")
    c = solve_c(model, s).c
    arg = s - float(np.real(cumulant(model, c)))
    lam = model.lam
    fx = float(np.real(model.service.residual(x).lt(arg)))
    return fx * c ** k * (1 - lam) * lam ** (m - 1)


def upper_passage_lt(model: QueueModel, x: float, k: int, s: float) -> float:
    """``E e^{-s τ^k(x)}``, first passage strictly above level ``k``.

    At ``s = 0`` this is ``P[τ^k(x) < ∞]``.
    """
    k = _int("k", k, 0)
    if s < 0:
        raise ModelError("upper_passage_lt needs s >= 0")
    tab = q_table(model, x, s, k)
    return 1.0 - s_factor(model, s) * tab.Q(k) / (1 - model.lam) - tab.A(k)


def _tail_gen(model: QueueModel, m: int, c: float) -> float:
    """``Σ_{j>=0} c^j P[κ = j + m]``."""
    if c == 0:
        return float(model.batch.pmf(m)[m])
    return float(np.real(model.batch.excess_pgf(m - 1, c))) / c


def upper_passage_density(model: QueueModel, x: float, k: int, l: float, m: int, s: float) -> float:
    """Density in ``l`` of ``E[e^{-s τ^k(x)}; η^k(x) ∈ dl, T^k(x) = m]``.

    ``η^k`` is the service age at the passage and ``T^k`` the overshoot.
    """
    k, m = _int("k", k, 0), _int("m", m, 1)
    if l < 0:
        raise ModelError("l must be >= 0")
    if s < 0:
        raise ModelError("upper_passage_density needs s >= 0")
    mu = model.mu
    a = model.batch.pmf(k + m)
    law = model.service
    tab = q_table(model, x, s, k)
    c = solve_c(model, s).c

    def p_row(t):
        # p_j^m(t) = μ Σ_{i<=j} ρ_i(t) a_{j-i+m},  j = 0..k
        rho = panjer(a, mu, [t], k)[:, 0]
        return np.array([mu * (rho[: j + 1] @ a[m + j:m - 1:-1]) for j in range(k + 1)])

    sf_l = float(law.sf(l))
    out = 0.0
    if l > x:
        sfx = float(law.sf(x))
        out += math.exp(-s * (l - x)) * sf_l / sfx * p_row(l - x)[k]
    if sf_l > 0:
        kc = float(np.real(cumulant(model, c)))
        phi = math.exp(-s * l) * sf_l * mu * math.exp(l * kc) * _tail_gen(model, m, c)
        pl = p_row(l)
        out += phi * tab.Q(k) - math.exp(-s * l) * sf_l * math.fsum(
            (tab.q[: k + 1] * pl[k::-1]).tolist())
    return out


# ---------------------------------------------------------------------------
# l-integrated upper passage, used for the upper overshoot law


def _survival_coeffs(law, a: np.ndarray, mu: float, s: float, coeffs: np.ndarray) -> np.ndarray:
    """``h_i = ∫ e^{-st} P[η > t] ρ_i(t) dt`` from ``(s+μ) h_i = 1{i=0} - f_i^s + μ Σ a_j h_{i-j}``."""
    n = len(coeffs)
    h = np.zeros(n)
    for i in range(n):
        terms = [-coeffs[i]]
        if i == 0:
            terms.append(1.0)
        else:
            terms.extend((mu * a[i:0:-1] * h[:i]).tolist())
        h[i] = math.fsum(terms) / (s + mu)
    return h


def _upper_marginal(model, s, m, qx, hx, h0, k, phi_int):
    """``∫ f^k(x, dl, m, s)``."""
    mu = model.mu
    a = model.batch.pmf(k + m)
    first = mu * (hx[: k + 1] @ a[m + k:m - 1:-1])
    # conv_j = Σ_{i<=j} h0_i a_{j-i+m}
    conv = np.array([h0[: j + 1] @ a[m + j:m - 1:-1] for j in range(k + 1)])
    third = mu * math.fsum((qx[: k + 1] * conv[k::-1]).tolist())
    return first + phi_int * qx[k] - third


@dataclass(frozen=True)
class ExitLaw:
    """Exit of ``D_x`` from ``[-r, k]`` in transform (``s > 0``) or probability (``s = 0``) form."""
    model: QueueModel
    x: float
    r: int
    k: int
    s: float
    lower_lt: float
    upper_lt: float

    @property
    def lower_prob(self) -> float:
        if self.s != 0:
            return two_sided(self.model, self.x, self.r, self.k, 0.0).lower_lt
        return self.lower_lt

    @property
    def upper_prob(self) -> float:
        return 1.0 - self.lower_prob

    def lower_overshoot(self, m: int) -> float:
        """``E[e^{-sχ}; T = m, exit below]``."""
        m = _int("m", m, 1)
        lam = self.model.lam
        return self.lower_lt * (1 - lam) * lam ** (m - 1)

    def upper_overshoot(self, m: int) -> float:
        """``E[e^{-sχ}; T = m, exit above]``."""
        m = _int("m", m, 1)
        model, s, x, k = self.model, self.s, self.x, self.k
        B = self.r + k
        lam, mu = model.lam, model.mu
        tabx = q_table(model, x, s, k)
        tab0, J = table_for(model, 0.0, s, B + 1)
        n = tab0.k_max
        a = model.batch.pmf(n + m)
        h0 = _survival_coeffs(model.service, a, mu, s, tab0.coeffs[: n + 1])
        hx = h0 if x == 0 else _survival_coeffs(model.service.residual(x), a, mu, s, tabx.coeffs)
        c = tab0.root.c
        sig = s - float(np.real(cumulant(model, c)))
        if abs(sig) < 1e-300:
            gint = model.service.mean
        else:
            gint = (1 - float(np.real(model.service.lt(sig)))) / sig
        phi_int = mu * _tail_gen(model, m, c) * gint
        fk = _upper_marginal(model, s, m, tabx.q, hx, h0, k, phi_int)
        if lam == 0:
            ef = _upper_marginal(model, s, m, tab0.q, h0, h0, B + 1, phi_int)
        else:
            # scaled by c^K like the resolvent tables; the table may stop short of B + J
            top = min(B + J, tab0.k_max)
            vals = np.zeros(top + 1)
            for K in range(B + 1, top + 1):
                vals[K] = _upper_marginal(model, s, m, tab0.q, h0, h0, K, phi_int) * c ** K
            if top < B + J and not settled(vals[-3:]):
                raise ModelError("overshoot transform did not settle within the resolvent table")
            ef = geom_scaled(lam, c, vals, B, J)
        return fk - self.lower_lt * ef

    def overshoot_pmf(self, m: int) -> tuple[float, float]:
        """(lower, upper) overshoot masses at ``T = m``."""
        return self.lower_overshoot(m), self.upper_overshoot(m)


def _eq_b(model: QueueModel, s: float, B: int):
    tab0, J = table_for(model, 0.0, s, B + 1)
    return tab0, J, tab0.geom("q", B, J)


def two_sided(model: QueueModel, x: float, r: int, k: int, s: float) -> ExitLaw:
    """Exit from ``[-r, k]``; the interval width plays the role of ``B = r + k``."""
    r, k = _int("r", r, 0), _int("k", k, 0)
    if s < 0:
        raise ModelError("two_sided needs s >= 0")
    B = r + k
    tabx = q_table(model, x, s, k)
    tab0, J, eq = _eq_b(model, s, B)
    ratio = tabx.Q(k) / eq
    if s == 0:
        return ExitLaw(model, x, r, k, 0.0, ratio, 1.0 - ratio)
    ea = tab0.geom("a", B, J)
    upper = 1.0 - tabx.A(k) - ratio * (1.0 - ea)
    return ExitLaw(model, x, r, k, s, ratio, upper)


def sup_joint(model: QueueModel, x: float, k: int, u: int, s: float) -> float:
    """``P[D_x(ν_s) <= u, sup D_x <= k]``, ``ν_s ~ exp(s)`` independent."""
    k, u = _int("k", k, 0), _int("u", u)
    if u > k:
        raise ModelError("sup_joint needs u <= k")
    if not s > 0:
        raise ModelError("sup_joint needs s > 0")
    tab = q_table(model, x, s, k)
    c = tab.root.c
    return tab.A(u) + s_factor(model, s) / (1 - model.lam) * c ** (k - u) * tab.Q(k)


def trivariate(model: QueueModel, x: float, r: int, k: int, u: int, s: float) -> float:
    """``P[D_x(ν_s) <= u, -r <= inf D_x, sup D_x <= k]`` for ``u`` in ``[-r, k]``."""
    r, k, u = _int("r", r, 0), _int("k", k, 0), _int("u", u)
    if not -r <= u <= k:
        raise ModelError("trivariate needs -r <= u <= k")
    if not s > 0:
        raise ModelError("trivariate needs s > 0")
    B = r + k
    tabx = q_table(model, x, s, max(k, 0))
    tab0, J, eq = _eq_b(model, s, B)
    # geometric average taken over A_0 (age 0): after the first downward
    # crossing the service age restarts
    ea = tab0.geom("a", r + u, J)
    return tabx.A(u) - tabx.Q(k) / eq * ea


@dataclass(frozen=True)
class SupInfLaw:
    u: np.ndarray
    sup_cdf: np.ndarray      # P[D(ν_s) <= u, sup <= k]
    window_cdf: np.ndarray   # P[D(ν_s) <= u, -r <= inf, sup <= k]


def sup_inf_law(model: QueueModel, x: float, r: int, k: int, s: float) -> SupInfLaw:
    us = np.arange(-r, k + 1)
    return SupInfLaw(us, np.array([sup_joint(model, x, k, int(u), s) for u in us]),
                     np.array([trivariate(model, x, r, k, int(u), s) for u in us]))


# ---------------------------------------------------------------------------
# age density at the upper exit, summed over the overshoot


def _sum_tail_gen(model: QueueModel, c: float) -> float:
    """``Σ_{m>=1} Σ_{j>=0} c^j P[κ = j + m] = (1 - E c^κ) / (1 - c)``."""
    if c >= 1.0:
        return model.batch.mean
    return float(np.real(1.0 - model.batch.pgf(c))) / (1.0 - c)


def _passage_density_rows(model, ts, n):
    """``P_j(t) = μ Σ_{i<=j} ρ_i(t) P[κ > j - i]`` for j = 0..n; shape (n+1, len(ts))."""
    a = model.batch.pmf(n)
    rho = panjer(a, model.mu, ts, n)
    sfk = model.batch.sf_array(n)
    out = np.empty_like(rho)
    for j in range(n + 1):
        out[j] = model.mu * (sfk[j::-1] @ rho[: j + 1])
    return out


def _one_sided_density(model, x, k_list, ls, s, tab, c):
    """``f^k(x, l, s)`` (summed over the overshoot) for each k in ``k_list``; shape (len(k_list), len(ls))."""
    law = model.service
    ls = np.asarray(ls, dtype=float)
    kmax = max(k_list)
    sf_l = np.asarray(law.sf(ls), dtype=float)
    decay = np.exp(-s * ls) * sf_l
    kc = float(np.real(cumulant(model, c)))
    phi = decay * model.mu * np.exp(ls * kc) * _sum_tail_gen(model, c)
    Pl = _passage_density_rows(model, ls, kmax)
    shifted = ls - x
    ok = shifted > 0
    Px = np.zeros_like(Pl)
    if np.any(ok):
        Px[:, ok] = _passage_density_rows(model, shifted[ok], kmax)
    sfx = float(law.sf(x))
    first = np.where(ok, np.exp(-s * np.where(ok, shifted, 0.0)) * sf_l / sfx, 0.0)
    out = np.empty((len(k_list), len(ls)))
    for row, k in enumerate(k_list):
        conv = tab.q[: k + 1] @ Pl[k::-1]
        out[row] = first * Px[k] + phi * tab.q[k] - decay * conv
    return out


def upper_exit_density(model: QueueModel, x: float, r: int, k: int, ls, s: float) -> np.ndarray:
    """Density in ``l`` of ``E[e^{-sχ}; L ∈ dl, exit above]`` for the interval ``[-r, k]``.

    ``L`` is the service age at the exit epoch.  Vectorised over ``ls``.
    """
    r, k = _int("r", r, 0), _int("k", k, 0)
    B = r + k
    tabx = q_table(model, x, s, k)
    tab0, J, eq = _eq_b(model, s, B)
    c = tab0.root.c
    ls = np.atleast_1d(np.asarray(ls, dtype=float))
    fk = _one_sided_density(model, x, [k], ls, s, tabx, c)[0]
    ks = list(range(B + 1, B + J + 1))
    rows = _one_sided_density(model, 0.0, ks, ls, s, tab0, c)
    w = (1 - model.lam) * model.lam ** np.arange(J)
    return fk - tabx.Q(k) / eq * (w @ rows)
