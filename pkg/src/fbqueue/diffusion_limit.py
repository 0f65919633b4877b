"""Wiener limits at critical load and a convergence comparator.

With ``ρ = 1`` the free process scaled as ``D(t B²)/B`` tends to ``σ w_t``,
``w`` a standard Wiener process.  The functions ``wiener_*`` evaluate the
limit laws; :func:`convergence_report` puts the prelimit quantities for a
sequence of buffer sizes next to them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.special import ndtr

from .exit import sup_joint, trivariate
from .inversion import InversionRequest, invert
from .model import BatchLaw, Erlang, ModelError, QueueModel
from .reflected import reflected_increments, reflected_two_sided, reflection_ratio
from .resolvent import q_table
from .root import solve_c

__all__ = ["WienerSpec", "wiener_trivariate", "wiener_reflected_window", "wiener_sup_window",
           "wiener_reflected_increments", "wiener_trivariate_lt",
           "wiener_reflected_window_lt", "wiener_sup_window_lt", "wiener_reflected_increments_lt", "ConvergenceRow", "ConvergenceReport", "convergence_report",
           "reference_model", "QUANTITIES"]

SERIES_TOL = 1e-14
RHO_TOL = 1e-9


@dataclass(frozen=True)
class WienerSpec:
    """Geometry in continuum units: lower barrier ``-r``, upper ``k``, level ``u``, time ``t``."""
    sigma: float
    r: float = 0.5
    k: float = 0.5
    u: float = 0.0
    t: float = 0.5

    def __post_init__(self):
        if not self.sigma > 0:
            raise ModelError("sigma must be positive")
        if not self.t > 0:
            raise ModelError("t must be positive")


def _sine_series(sig: float, t: float, r: float, v: float, shift: float) -> tuple[float, int]:
    """``(4/π) Σ e^{-t(π ω σ)²/2} sin(r ω π) sin²(v ω π / 2) / ω`` with ``ω = n + shift``."""
    a = t * (math.pi * sig) ** 2 / 2
    total, n = 0.0, 0 if shift else 1
    terms = []
    while True:
        w = n + shift
        e = math.exp(-a * w * w)
        terms.append(e / w * math.sin(r * w * math.pi) * math.sin(v * w * math.pi / 2) ** 2)
        # tail past n: e^{-a m²} <= e^{-a w²} q^{m-n}, q = e^{-a(2w+1)}
        q = math.exp(-a * (2 * w + 1))
        if 4 / math.pi * e * q / (w * (1 - q)) < SERIES_TOL:
            break
        n += 1
    total = 4 / math.pi * math.fsum(terms)
    return total, len(terms)


def wiener_trivariate(spec: WienerSpec) -> float:
    """``P[σw_t <= u, inf σw >= -r, sup σw <= k]`` with ``r + k = 1``."""
    if abs(spec.r + spec.k - 1) > 1e-12:
        raise ModelError("the interval limit needs r + k = 1")
    if not -spec.r <= spec.u <= spec.k:
        raise ModelError("u must lie in [-r, k]")
    if spec.u == -spec.r:
        return 0.0
    return _sine_series(spec.sigma, spec.t, spec.r, spec.r + spec.u, 0.0)[0]


def wiener_reflected_window(spec: WienerSpec, *, with_terms: bool = False):
    """Reflected at ``k``, killed below ``-r``: ``P[σw̄_t <= u, not killed]`` (``r + k = 1``)."""
    if abs(spec.r + spec.k - 1) > 1e-12:
        raise ModelError("the interval limit needs r + k = 1")
    if not -spec.r <= spec.u <= spec.k:
        raise ModelError("u must lie in [-r, k]")
    if spec.u == -spec.r:
        return (0.0, 0) if with_terms else 0.0
    val, n = _sine_series(spec.sigma, spec.t, spec.r, spec.r + spec.u, 0.5)
    return (val, n) if with_terms else val


def wiener_sup_window(spec: WienerSpec) -> float:
    """``P[σw_t <= u, sup σw <= k]``, ``u <= k``."""
    if spec.u > spec.k:
        raise ModelError("u must not exceed k")
    sd = spec.sigma * math.sqrt(spec.t)
    return float(ndtr((2 * spec.k - spec.u) / sd) - ndtr(-spec.u / sd))


def wiener_reflected_increments(spec: WienerSpec) -> float:
    """``P[σw̄^k_t <= u]`` for the process reflected at ``k`` started at 0."""
    if spec.u > spec.k:
        raise ModelError("u must not exceed k")
    if spec.u == spec.k:
        return 1.0
    sd = spec.sigma * math.sqrt(spec.t)
    return float(1.0 - (ndtr((2 * spec.k - spec.u) / sd) - ndtr(spec.u / sd)))


# Transforms ``s ∫ e^{-st} P[...] dt`` of the same laws, from the resolvent
# densities of the killed or reflected Wiener process; ``g = √(2s)/σ``.


def _g(spec: WienerSpec, s: float) -> float:
    if not s > 0:
        raise ModelError("transform needs s > 0")
    return math.sqrt(2 * s) / spec.sigma


def wiener_trivariate_lt(spec: WienerSpec, s: float) -> float:
    r, k, u = spec.r, spec.k, spec.u
    if not -r <= u <= k:
        raise ModelError("u must lie in [-r, k]")
    g = _g(spec, s)
    sh, ch = math.sinh, math.cosh
    if u <= 0:
        return sh(g * k) * (ch(g * (r + u)) - 1) / sh(g * (r + k))
    return (sh(g * k) * (ch(g * r) - 1) + sh(g * r) * (ch(g * k) - ch(g * (k - u)))) / sh(g * (r + k))


def wiener_reflected_window_lt(spec: WienerSpec, s: float) -> float:
    r, k, u = spec.r, spec.k, spec.u
    if not -r <= u <= k:
        raise ModelError("u must lie in [-r, k]")
    g = _g(spec, s)
    sh, ch = math.sinh, math.cosh
    if u <= 0:
        return ch(g * k) * (ch(g * (r + u)) - 1) / ch(g * (r + k))
    return (ch(g * k) * (ch(g * r) - 1) + sh(g * r) * (sh(g * k) - sh(g * (k - u)))) / ch(g * (r + k))


def wiener_sup_window_lt(spec: WienerSpec, s: float) -> float:
    k, u = spec.k, spec.u
    if u > k:
        raise ModelError("u must not exceed k")
    g = _g(spec, s)
    if u <= 0:
        return 0.5 * (math.exp(g * u) - math.exp(-g * (2 * k - u)))
    return 1 - 0.5 * (math.exp(-g * u) + math.exp(-g * (2 * k - u)))


def wiener_reflected_increments_lt(spec: WienerSpec, s: float) -> float:
    k, u = spec.k, spec.u
    if u > k:
        raise ModelError("u must not exceed k")
    g = _g(spec, s)
    if u < 0:
        return 0.5 * (math.exp(g * u) + math.exp(-g * (2 * k - u)))
    return 1 - 0.5 * (math.exp(-g * u) - math.exp(-g * (2 * k - u)))


# ---------------------------------------------------------------------------
# convergence comparator


def reference_model(B: int = 100) -> QueueModel:
    """Critically loaded reference: κ uniform on {1,2}, Erlang(2) service, λ = 0.3.

    The time unit is chosen so that ``σ = 1``.
    """
    batch = BatchLaw({1: 0.5, 2: 0.5})
    m = QueueModel(mu=1.0, batch=batch, service=Erlang(2, 2.0), lam=0.3, B=B).critical()
    # σ² scales like 1/Eη at fixed ρ
    s2 = m.diffusion().sigma2
    return QueueModel(mu=1.0, batch=batch, service=Erlang(2, 2.0 / s2), lam=0.3, B=B).critical()


@dataclass(frozen=True)
class ConvergenceRow:
    B: int
    prelimit: float
    limit: float

    @property
    def deviation(self) -> float:
        return abs(self.prelimit - self.limit) / abs(self.limit)


@dataclass(frozen=True)
class ConvergenceReport:
    quantity: str
    params: dict
    rows: list = field(default_factory=list)

    @property
    def deviations(self) -> list:
        return [row.deviation for row in self.rows]

    @property
    def nonincreasing(self) -> bool:
        d = self.deviations
        return all(b <= a for a, b in zip(d[:-1], d[1:]))


def _sc(x: float, B: int) -> int:
    return int(math.floor(x * B + 1e-9))


def _time_domain(fun, B: int, spec: WienerSpec, order: int, wiener, wiener_lt) -> float:
    """Prelimit probability at time ``t B²`` from its transform ``fun``.

    Only the gap to the Wiener transform is inverted numerically, in scaled
    time; the limit itself comes from its series.  The gap is small and
    smooth where the probabilities themselves may be tiny.
    """
    def gap(s):
        return (fun(s / B ** 2) - wiener_lt(spec, s)) / s
    return wiener(spec) + invert(InversionRequest(gap, spec.t, order=order)).value


def _root(model, B, p):
    s, sig = p["s"], model.diffusion().sigma
    c = solve_c(model, s / B ** 2).c
    return B * (1 - c), math.sqrt(2 * s) / sig


def _resolvent(model, B, p):
    s, k, sig = p["s"], p["k"], model.diffusion().sigma
    g = math.sqrt(2 * s) / sig
    kk = _sc(k, B)
    tab = q_table(model, 0.0, s / B ** 2, kk)
    return tab.Q(kk) / B, 2 * math.sinh(k * g) / (sig * math.sqrt(2 * s) * model.service.mean)


def _partial_sum(model, B, p):
    s, k, sig = p["s"], p["k"], model.diffusion().sigma
    g = math.sqrt(2 * s) / sig
    kk = _sc(k, B)
    tab = q_table(model, 0.0, s / B ** 2, kk)
    return tab.S(kk) / B ** 2, (math.cosh(k * g) - 1) / (s * model.service.mean)


def _passage(model, B, p):
    s, k, sig = p["s"], p["k"], model.diffusion().sigma
    g = math.sqrt(2 * s) / sig
    m = model.with_buffer(B)
    val = reflection_ratio(m, 0.0, B - _sc(k, B), B, s / B ** 2)
    return val, math.cosh(k * g) / math.cosh(g)


def _trivariate(model, B, p):
    r, u, t = p["r"], p["u"], p["t"]
    k = 1 - r
    spec = WienerSpec(model.diffusion().sigma, r, k, u, t)
    R, K, U = _sc(r, B), B - _sc(r, B), _sc(u, B)
    val = _time_domain(lambda s: trivariate(model, 0.0, R, K, U, s), B, spec, p["order"], wiener_trivariate, wiener_trivariate_lt)
    return val, wiener_trivariate(spec)


def _increments(model, B, p):
    k, u, t = p["k"], p["u"], p["t"]
    spec = WienerSpec(model.diffusion().sigma, 1 - k, k, u, t)
    K, U = _sc(k, B), _sc(u, B)
    val = _time_domain(lambda s: reflected_increments(model, 0.0, K, U, s), B, spec, p["order"], wiener_reflected_increments, wiener_reflected_increments_lt)
    return val, wiener_reflected_increments(spec)


def _reflected_window(model, B, p):
    r, u, t = p["r"], p["u"], p["t"]
    spec = WienerSpec(model.diffusion().sigma, r, 1 - r, u, t)
    R, U = _sc(r, B), _sc(u, B)
    val = _time_domain(lambda s: reflected_two_sided(model, 0.0, R, B - R, U, s), B, spec, p["order"], wiener_reflected_window, wiener_reflected_window_lt)
    return val, wiener_reflected_window(spec)


def _sup(model, B, p):
    k, u, t = p["k"], p["u"], p["t"]
    spec = WienerSpec(model.diffusion().sigma, 1 - k, k, u, t)
    K, U = _sc(k, B), _sc(u, B)
    val = _time_domain(lambda s: sup_joint(model, 0.0, K, U, s), B, spec, p["order"], wiener_sup_window, wiener_sup_window_lt)
    return val, wiener_sup_window(spec)


QUANTITIES = {
    "root": (_root, {"s": 1.0}),
    "resolvent": (_resolvent, {"s": 1.0, "k": 0.5}),
    "partial_sum": (_partial_sum, {"s": 1.0, "k": 0.5}),
    "passage": (_passage, {"s": 1.0, "k": 0.5}),
    "trivariate": (_trivariate, {"r": 0.5, "u": 0.0, "t": 0.5, "order": 14}),
    "reflected_increments": (_increments, {"k": 0.5, "u": 0.0, "t": 0.5, "order": 14}),
    "reflected_window": (_reflected_window, {"r": 0.5, "u": 0.0, "t": 0.5, "order": 14}),
    "sup_window": (_sup, {"k": 0.5, "u": 0.0, "t": 0.5, "order": 14}),
}


def convergence_report(model: QueueModel, quantity: str, B_list=(50, 100, 200), **params) -> ConvergenceReport:
    """Scaled prelimit values against their Wiener limits for each buffer size."""
    if abs(model.rho - 1) > RHO_TOL:
        raise ModelError(f"condition (A) not met: rho = {model.rho!r}, needs 1 within {RHO_TOL:g}")
    if quantity not in QUANTITIES:
        raise ModelError(f"unknown quantity {quantity!r}; choose from {sorted(QUANTITIES)}")
    fun, defaults = QUANTITIES[quantity]
    unknown = set(params) - set(defaults)
    if unknown:
        raise ModelError(f"unknown parameter(s) for {quantity}: {sorted(unknown)}")
    p = {**defaults, **params}
    rows = []
    for B in B_list:
        pre, lim = fun(model.with_buffer(int(B)), int(B), p)
        rows.append(ConvergenceRow(int(B), float(pre), float(lim)))
    return ConvergenceReport(quantity, p, rows)
