"""Primitive laws of the M^κ|G^δ|1|B queue and the scalar functionals built on them.

A model bundles

* a Poisson batch-arrival stream with intensity ``mu`` and batch law ``κ``,
* a generic service-time law ``η`` (with residual laws ``η_x`` for an age ``x``),
* a geometric departure-batch law ``δ ~ ge(lam)``, ``P[δ=n] = (1-lam) lam^(n-1)``,
* a buffer parameter ``B`` (the waiting room holds ``B + 1`` customers).

Everything here is immutable once built.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import special, stats
from scipy.optimize import brentq

__all__ = [
    "ModelError",
    "AgeBeyondSupport",
    "BatchLaw",
    "ServiceLaw",
    "ErlangMixture",
    "Exponential",
    "Erlang",
    "HyperExponential",
    "Deterministic",
    "Empirical",
    "QueueModel",
    "DiffusionParams",
    "build_model",
    "load_model",
    "cumulant",
    "residual_lt",
    "DEFAULT_BATCH_CAP",
]

DEFAULT_BATCH_CAP = 64
_PMF_TOL = 1e-12


class ModelError(ValueError):
    """Invalid model parameters or configuration."""


class AgeBeyondSupport(ModelError):
    """The residual service law at this age is undefined (F(x) = 1)."""


# --------------------------------------------------------------------------
# batch law


class BatchLaw:
    """Law of the arrival batch size κ ∈ {1, 2, ...}.

    Stored as explicit weights ``P[κ=i]`` for ``i <= cap`` plus an optional
    geometric tail: ``P[κ = K + j] = tail_mass (1-tail_ratio) tail_ratio^(j-1)``,
    ``j >= 1``, where ``K`` is the last explicit index.
    """

    def __init__(self, weights: Sequence[float] | Mapping[int, float], *,
                 tail_mass: float = 0.0, tail_ratio: float = 0.0,
                 cap: int = DEFAULT_BATCH_CAP):
        if isinstance(weights, Mapping):
            items = {int(k): float(v) for k, v in weights.items()}
            if any(k < 0 for k in items):
                raise ModelError("batch sizes must be nonnegative")
            n = max(items, default=0)
            w = np.zeros(n + 1)
            for k, v in items.items():
                w[k] = v
        else:
            # sequence is P[κ=1], P[κ=2], ...
            w = np.concatenate([[0.0], np.asarray(weights, dtype=float)])
        if len(w) - 1 > cap:
            raise ModelError(f"batch support exceeds cap K_max={cap}")
        if w[0] != 0.0:
            raise ModelError("batch pmf must put zero mass on 0 (a_0 = 0)")
        if np.any(w < 0) or tail_mass < 0:
            raise ModelError("batch pmf has negative weights")
        if not 0.0 <= tail_ratio < 1.0:
            raise ModelError("geometric tail ratio must lie in [0, 1)")
        total = math.fsum(w) + tail_mass
        if abs(total - 1.0) > _PMF_TOL:
            raise ModelError(f"pmf not normalized (sums to {total!r})")
        # trim trailing zeros of the explicit part
        last = int(np.max(np.nonzero(w)[0], initial=0))
        if tail_mass == 0.0:
            tail_ratio = 0.0
        self._w = w[: last + 1].copy() if tail_mass == 0.0 else w.copy()
        self._w.setflags(write=False)
        self.tail_mass = float(tail_mass)
        self.tail_ratio = float(tail_ratio)
        self.cap = cap

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, n: int = 1) -> "BatchLaw":
        if n < 1:
            raise ModelError("constant batch size must be >= 1")
        return cls({n: 1.0})

    @classmethod
    def geometric(cls, p: float) -> "BatchLaw":
        """``P[κ=i] = (1-p) p^(i-1)``, i >= 1."""
        if not 0.0 <= p < 1.0:
            raise ModelError("geometric batch parameter must lie in [0, 1)")
        return cls({1: 1.0 - p}, tail_mass=p, tail_ratio=p)

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "BatchLaw":
        if not 1 <= lo <= hi:
            raise ModelError("uniform batch law needs 1 <= lo <= hi")
        n = hi - lo + 1
        return cls({i: 1.0 / n for i in range(lo, hi + 1)})

    # evaluation -------------------------------------------------------------
    @property
    def explicit_len(self) -> int:
        return len(self._w)

    def pmf(self, n: int) -> np.ndarray:
        """Array ``a_0 .. a_n`` with ``a_i = P[κ=i]``."""
        out = np.zeros(n + 1)
        m = min(n + 1, len(self._w))
        out[:m] = self._w[:m]
        if self.tail_mass > 0 and n >= len(self._w):
            K = len(self._w) - 1
            j = np.arange(1, n - K + 1)
            out[K + 1:] = self.tail_mass * (1 - self.tail_ratio) * self.tail_ratio ** (j - 1)
        return out

    def sf(self, i: int) -> float:
        """``P[κ > i]``."""
        if i < 0:
            return 1.0
        K = len(self._w) - 1
        if i >= K:
            return self.tail_mass * self.tail_ratio ** (i - K)
        return math.fsum(self._w[i + 1:]) + self.tail_mass

    def sf_array(self, n: int) -> np.ndarray:
        """``â_i = P[κ > i]`` for i = 0..n."""
        return np.array([self.sf(i) for i in range(n + 1)])

    def pgf(self, z):
        """``E z^κ`` for ``|z| <= 1`` (complex allowed)."""
        z = np.asarray(z)
        w = self._w
        val = np.polynomial.polynomial.polyval(z, w)
        if self.tail_mass > 0:
            K = len(w) - 1
            q = self.tail_ratio
            val = val + self.tail_mass * (1 - q) * z ** (K + 1) / (1 - q * z)
        return val[()] if np.ndim(val) == 0 else val

    @property
    def mean(self) -> float:
        K = len(self._w) - 1
        m = float(np.dot(np.arange(K + 1), self._w))
        if self.tail_mass > 0:
            q = self.tail_ratio
            m += self.tail_mass * (K + 1.0 / (1 - q))
        return m

    @property
    def second_moment(self) -> float:
        K = len(self._w) - 1
        i = np.arange(K + 1)
        m2 = float(np.dot(i * i, self._w))
        if self.tail_mass > 0:
            q = self.tail_ratio
            # J ~ geometric on {1,2,..}: E J = 1/(1-q), E J^2 = (1+q)/(1-q)^2
            ej, ej2 = 1 / (1 - q), (1 + q) / (1 - q) ** 2
            m2 += self.tail_mass * (K * K + 2 * K * ej + ej2)
        return m2

    def excess_pgf(self, i: int, z):
        """``E^i(z) = E[z^(κ-i); κ > i]``."""
        w = self._w
        K = len(w) - 1
        j = np.arange(i + 1, K + 1)
        val = np.sum(w[i + 1:] * np.power(z, j - i)) if i < K else 0.0 * z
        if self.tail_mass > 0:
            q, tm = self.tail_ratio, self.tail_mass
            if i <= K:
                val = val + tm * (1 - q) * z ** (K + 1 - i) / (1 - q * z)
            else:
                val = val + tm * (1 - q) * q ** (i - K) * z / (1 - q * z)
        return val

    def sample(self, rng: np.random.Generator, size=None):
        K = len(self._w) - 1
        if self.tail_mass == 0.0:
            return rng.choice(K + 1, size=size, p=self._w / self._w.sum())
        probs = np.append(self._w, self.tail_mass)
        idx = rng.choice(K + 2, size=size, p=probs / probs.sum())
        tail = rng.geometric(1 - self.tail_ratio, size=size)
        return np.where(idx == K + 1, K + tail, idx)

    def to_config(self) -> dict:
        d = {"pmf": {str(i): float(v) for i, v in enumerate(self._w) if v > 0}}
        if self.tail_mass > 0:
            d.update(tail_mass=self.tail_mass, tail_ratio=self.tail_ratio)
        return d

    def __repr__(self) -> str:
        tail = f", tail_mass={self.tail_mass}, tail_ratio={self.tail_ratio}" if self.tail_mass else ""
        nz = {i: float(v) for i, v in enumerate(self._w) if v > 0}
        return f"BatchLaw({nz}{tail})"


# --------------------------------------------------------------------------
# service laws


class ServiceLaw:
    """Base class for service-time laws η > 0."""

    family = "abstract"

    def cdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        return 1.0 - self.cdf(x)

    def lt(self, s):
        """``E exp(-s η)``; complex ``s`` with ``Re s >= 0`` allowed."""
        raise NotImplementedError

    def residual(self, x: float) -> "ServiceLaw":
        """Law of ``η_x``: ``P[η_x <= u] = (F(x+u) - F(x)) / (1 - F(x))``."""
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def second_moment(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def ppf(self, u: float) -> float:
        """Quantile by bracketing on the cdf (families override when closed form exists)."""
        if u <= 0:
            return 0.0
        hi = max(self.mean, 1e-12)
        while self.cdf(hi) < u:
            hi *= 2.0
        return brentq(lambda t: self.cdf(t) - u, 0.0, hi, xtol=1e-14, rtol=1e-14)

    def sample_residual(self, x: float, rng: np.random.Generator) -> float:
        """One draw of ``η_x`` by inverse-cdf sampling of ``F_x``."""
        if x == 0:
            return float(self.sample(rng))
        Fx = float(self.cdf(x))
        if Fx >= 1.0:
            raise AgeBeyondSupport(f"age {x} beyond service support")
        u = rng.random()
        return self.ppf(Fx + u * (1.0 - Fx)) - x

    def _check_age(self, x: float) -> None:
        if x < 0:
            raise ModelError("age must be nonnegative")
        if x > 0 and self.sf(x) <= 0.0:
            raise AgeBeyondSupport(f"age {x} beyond service support (F(x) = 1)")

    def to_config(self) -> dict:
        raise NotImplementedError


class ErlangMixture(ServiceLaw):
    """Finite mixture of Erlang laws ``Σ_j w_j Erlang(n_j, ν_j)``.

    Covers exponential, Erlang and hyperexponential service, and is closed
    under taking residual laws.
    """

    family = "erlang_mixture"

    def __init__(self, weights, shapes, rates):
        w = np.asarray(weights, dtype=float)
        n = np.asarray(shapes, dtype=int)
        v = np.asarray(rates, dtype=float)
        if not (w.shape == n.shape == v.shape) or w.ndim != 1 or len(w) == 0:
            raise ModelError("mixture weights, shapes and rates must be equal-length vectors")
        if np.any(w < 0) or abs(w.sum() - 1.0) > _PMF_TOL:
            raise ModelError("mixture weights must be nonnegative and sum to 1")
        if np.any(n < 1) or np.any(v <= 0):
            raise ModelError("Erlang shapes must be >= 1 and rates > 0")
        keep = w > 0
        self.weights, self.shapes, self.rates = w[keep] / w[keep].sum(), n[keep], v[keep]

    def components(self):
        return zip(self.weights, self.shapes, self.rates)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = sum(w * special.gammainc(n, v * np.maximum(x, 0)) for w, n, v in self.components())
        return np.where(x < 0, 0.0, out)[()]

    def sf(self, x):
        x = np.asarray(x, dtype=float)
        out = sum(w * special.gammaincc(n, v * np.maximum(x, 0)) for w, n, v in self.components())
        return np.where(x < 0, 1.0, out)[()]

    def lt(self, s):
        return sum(w * (v / (v + s)) ** n for w, n, v in self.components())

    def residual(self, x: float) -> ServiceLaw:
        self._check_age(x)
        if x == 0:
            return self
        ws, ns, vs = [], [], []
        for w, n, v in self.components():
            # remaining phases j = 1..n with weight e^{-vx}(vx)^{n-j}/(n-j)!
            done = np.arange(n)
            logp = -v * x + done * math.log(v * x) - special.gammaln(done + 1)
            ws.extend(w * np.exp(logp))
            ns.extend(n - done)
            vs.extend([v] * n)
        ws = np.asarray(ws)
        if ws.sum() <= 0:
            raise AgeBeyondSupport(f"age {x} beyond numerical service support")
        return ErlangMixture(ws / ws.sum(), ns, vs)

    @property
    def mean(self) -> float:
        return float(sum(w * n / v for w, n, v in self.components()))

    @property
    def second_moment(self) -> float:
        return float(sum(w * n * (n + 1) / v ** 2 for w, n, v in self.components()))

    def sample(self, rng, size=None):
        idx = rng.choice(len(self.weights), size=size, p=self.weights)
        return rng.gamma(self.shapes[idx], 1.0 / self.rates[idx])

    def to_config(self) -> dict:
        return {"family": "erlang_mixture", "weights": self.weights.tolist(),
                "shapes": self.shapes.tolist(), "rates": self.rates.tolist()}

    def __repr__(self) -> str:
        return (f"ErlangMixture(weights={self.weights.tolist()}, shapes={self.shapes.tolist()}, "
                f"rates={self.rates.tolist()})")


class Exponential(ErlangMixture):
    family = "exponential"

    def __init__(self, rate: float):
        super().__init__([1.0], [1], [rate])
        self.rate = float(rate)

    def residual(self, x: float) -> ServiceLaw:
        self._check_age(x)
        return self

    def ppf(self, u):
        return -math.log1p(-u) / self.rate

    def to_config(self):
        return {"family": "exponential", "rate": self.rate}

    def __repr__(self):
        return f"Exponential(rate={self.rate})"


class Erlang(ErlangMixture):
    family = "erlang"

    def __init__(self, shape: int, rate: float):
        super().__init__([1.0], [shape], [rate])
        self.shape, self.rate = int(shape), float(rate)

    def ppf(self, u):
        return float(stats.gamma.ppf(u, self.shape, scale=1.0 / self.rate))

    def to_config(self):
        return {"family": "erlang", "shape": self.shape, "rate": self.rate}

    def __repr__(self):
        return f"Erlang(shape={self.shape}, rate={self.rate})"


class HyperExponential(ErlangMixture):
    family = "hyperexponential"

    def __init__(self, probs, rates):
        super().__init__(probs, [1] * len(probs), rates)

    def to_config(self):
        return {"family": "hyperexponential", "probs": self.weights.tolist(), "rates": self.rates.tolist()}

    def __repr__(self):
        return f"HyperExponential(probs={self.weights.tolist()}, rates={self.rates.tolist()})"


class Deterministic(ServiceLaw):
    family = "deterministic"

    def __init__(self, d: float):
        if not d > 0:
            raise ModelError("deterministic service time must be positive")
        self.d = float(d)

    def cdf(self, x):
        return np.where(np.asarray(x) >= self.d, 1.0, 0.0)[()]

    def sf(self, x):
        return np.where(np.asarray(x) >= self.d, 0.0, 1.0)[()]

    def lt(self, s):
        return np.exp(-s * self.d)

    def residual(self, x: float) -> ServiceLaw:
        if x < 0:
            raise ModelError("age must be nonnegative")
        if x >= self.d:
            raise AgeBeyondSupport(f"age {x} beyond deterministic service time {self.d}")
        return self if x == 0 else Deterministic(self.d - x)

    @property
    def mean(self):
        return self.d

    @property
    def second_moment(self):
        return self.d ** 2

    def sample(self, rng, size=None):
        return np.full(size, self.d) if size is not None else self.d

    def ppf(self, u):
        return self.d

    def to_config(self):
        return {"family": "deterministic", "d": self.d}

    def __repr__(self):
        return f"Deterministic(d={self.d})"


class Empirical(ServiceLaw):
    """Tabulated cdf, linear between knots (piecewise-uniform density).

    ``times`` strictly increasing with ``times[0] >= 0``; ``cdf`` nondecreasing
    from 0 to 1.
    """

    family = "empirical"

    def __init__(self, times, cdf):
        t = np.asarray(times, dtype=float)
        F = np.asarray(cdf, dtype=float)
        if t.ndim != 1 or t.shape != F.shape or len(t) < 2:
            raise ModelError("empirical table needs matching times/cdf vectors of length >= 2")
        if t[0] < 0 or np.any(np.diff(t) <= 0):
            raise ModelError("empirical times must be >= 0 and strictly increasing")
        if np.any(np.diff(F) < 0) or abs(F[0]) > _PMF_TOL or abs(F[-1] - 1) > _PMF_TOL:
            raise ModelError("empirical cdf must be nondecreasing from 0 to 1")
        F = F.copy()
        F[0], F[-1] = 0.0, 1.0
        self.times, self.F = t, F
        self.p = np.diff(F)          # panel masses
        self.lo, self.hi = t[:-1], t[1:]

    def panels(self):
        """Nonempty panels as (lo, hi, mass)."""
        keep = self.p > 0
        return self.lo[keep], self.hi[keep], self.p[keep]

    def cdf(self, x):
        return np.interp(x, self.times, self.F, left=0.0, right=1.0)

    def lt(self, s):
        s = np.asarray(s)
        lo, hi, p = self.panels()
        h = hi - lo
        if np.ndim(s) == 0:
            if s == 0:
                return 1.0
            z = s * h
            # (e^{-s lo} - e^{-s hi}) / (s h) written to stay accurate as s -> 0
            val = np.sum(p * np.exp(-s * lo) * (-np.expm1(-z)) / z)
            return val
        return np.array([self.lt(si) for si in s.ravel()]).reshape(s.shape)

    def residual(self, x: float) -> ServiceLaw:
        self._check_age(x)
        if x == 0:
            return self
        Fx = float(self.cdf(x))
        keep = self.times > x
        t = np.concatenate([[0.0], self.times[keep] - x])
        F = np.concatenate([[0.0], (self.F[keep] - Fx) / (1.0 - Fx)])
        return Empirical(t, np.clip(F, 0.0, 1.0))

    @property
    def mean(self):
        lo, hi, p = self.panels()
        return float(np.sum(p * (lo + hi) / 2))

    @property
    def second_moment(self):
        lo, hi, p = self.panels()
        return float(np.sum(p * (lo * lo + lo * hi + hi * hi) / 3))

    def ppf(self, u):
        # strictly increasing part of the cdf is invertible by interpolation
        return float(np.interp(u, self.F, self.times))

    def sample(self, rng, size=None):
        u = rng.random(size)
        return np.interp(u, self.F, self.times)

    def to_config(self):
        return {"family": "empirical", "times": self.times.tolist(), "cdf": self.F.tolist()}

    def __repr__(self):
        return f"Empirical(n_knots={len(self.times)}, mean={self.mean:.6g})"


# --------------------------------------------------------------------------
# the model


@dataclass(frozen=True)
class DiffusionParams:
    rho: float
    sigma2: float

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class QueueModel:
    mu: float
    batch: BatchLaw
    service: ServiceLaw
    lam: float = 0.0
    B: int = 0

    def __post_init__(self):
        if not self.mu > 0:
            raise ModelError("arrival intensity mu must be positive")
        if not 0.0 <= self.lam < 1.0:
            raise ModelError("lambda must lie in [0, 1)")
        if int(self.B) != self.B or self.B < 0:
            raise ModelError("buffer B must be a nonnegative integer")
        object.__setattr__(self, "B", int(self.B))

    @property
    def rho(self) -> float:
        """Load ``(1-λ) μ Eκ Eη``."""
        return (1.0 - self.lam) * self.mu * self.batch.mean * self.service.mean

    @property
    def mean_delta(self) -> float:
        return 1.0 / (1.0 - self.lam)

    def diffusion(self) -> DiffusionParams:
        b, sv = self.batch, self.service
        Ek, Eh = b.mean, sv.mean
        sigma2 = self.mu * ((b.second_moment - Ek) + Ek * sv.second_moment / ((1 - self.lam) * Eh ** 2))
        return DiffusionParams(self.rho, sigma2)

    def with_buffer(self, B: int) -> "QueueModel":
        return replace(self, B=B)

    def critical(self) -> "QueueModel":
        """Same shapes with ``mu`` rescaled so that ``rho = 1`` exactly."""
        mu = 1.0 / ((1.0 - self.lam) * self.batch.mean * self.service.mean)
        return replace(self, mu=mu)

    def delta_pmf(self, n: int) -> np.ndarray:
        """``P[δ = i]`` for i = 0..n."""
        out = np.zeros(n + 1)
        i = np.arange(1, n + 1)
        out[1:] = (1 - self.lam) * self.lam ** (i - 1)
        return out

    def to_config(self) -> dict:
        return {"arrival": {"mu": self.mu}, "batch": self.batch.to_config(),
                "service": self.service.to_config(), "jump": {"lambda": self.lam},
                "buffer": {"B": self.B}}


def cumulant(model: QueueModel, theta):
    """``k(θ) = μ (E θ^κ - 1)`` for ``|θ| <= 1``."""
    if np.any(np.abs(theta) > 1 + 1e-15):
        raise ModelError("cumulant needs |theta| <= 1")
    return model.mu * (model.batch.pgf(theta) - 1.0)


def residual_lt(model: QueueModel, x: float, s):
    """``E exp(-s η_x)``."""
    if np.any(np.real(s) < 0):
        raise ModelError("residual_lt needs Re(s) >= 0")
    return model.service.residual(x).lt(s)


# --------------------------------------------------------------------------
# configuration

_SERVICE_KEYS = {
    "exponential": ("rate",),
    "erlang": ("shape", "rate"),
    "hyperexponential": ("probs", "rates"),
    "deterministic": ("d",),
    "empirical": ("times", "cdf"),
    "erlang_mixture": ("weights", "shapes", "rates"),
}


def _need(section: Mapping, key: str, where: str):
    if key not in section:
        raise ModelError(f"missing config key '{where}.{key}'")
    return section[key]


def _service_from_config(cfg: Mapping) -> ServiceLaw:
    fam = _need(cfg, "family", "service")
    if fam not in _SERVICE_KEYS:
        raise ModelError(f"unsupported service family '{fam}' (key 'service.family')")
    p = [_need(cfg, k, "service") for k in _SERVICE_KEYS[fam]]
    if fam == "exponential":
        return Exponential(float(p[0]))
    if fam == "erlang":
        return Erlang(int(p[0]), float(p[1]))
    if fam == "hyperexponential":
        return HyperExponential(p[0], p[1])
    if fam == "deterministic":
        return Deterministic(float(p[0]))
    if fam == "empirical":
        return Empirical(p[0], p[1])
    return ErlangMixture(*p)


def _batch_from_config(cfg: Mapping) -> BatchLaw:
    cap = int(cfg.get("cap", DEFAULT_BATCH_CAP))
    if "pmf" in cfg:
        pmf = cfg["pmf"]
        if isinstance(pmf, Mapping):
            pmf = {int(k): float(v) for k, v in pmf.items()}
        return BatchLaw(pmf, tail_mass=float(cfg.get("tail_mass", 0.0)),
                        tail_ratio=float(cfg.get("tail_ratio", 0.0)), cap=cap)
    fam = cfg.get("family")
    if fam == "constant":
        return BatchLaw.constant(int(cfg.get("n", 1)))
    if fam == "geometric":
        return BatchLaw.geometric(float(_need(cfg, "p", "batch")))
    if fam == "uniform":
        return BatchLaw.uniform(int(_need(cfg, "lo", "batch")), int(_need(cfg, "hi", "batch")))
    raise ModelError("config needs 'batch.pmf' or a supported 'batch.family' "
                     "(constant, geometric, uniform)")


def build_model(config: Mapping[str, Any]) -> QueueModel:
    """Validate a nested config mapping and build a :class:`QueueModel`.

    Schema::

        arrival: {mu: float}
        batch:   {pmf: {size: prob, ...}} | {family: constant|geometric|uniform, ...}
        service: {family: exponential|erlang|hyperexponential|deterministic|empirical, ...}
        jump:    {lambda: float}          # optional, default 0
        buffer:  {B: int}
    """
    arrival = _need(config, "arrival", "<root>")
    mu = float(_need(arrival, "mu", "arrival"))
    batch = _batch_from_config(_need(config, "batch", "<root>"))
    service = _service_from_config(_need(config, "service", "<root>"))
    lam = float(config.get("jump", {}).get("lambda", 0.0))
    B = _need(_need(config, "buffer", "<root>"), "B", "buffer")
    if int(B) != B:
        raise ModelError("buffer.B must be an integer")
    return QueueModel(mu=mu, batch=batch, service=service, lam=lam, B=int(B))


def load_model(path: str | Path) -> QueueModel:
    """Read a JSON or YAML config file."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() in (".yaml", ".yml"):
        import yaml
        cfg = yaml.safe_load(text)
    else:
        cfg = json.loads(text)
    if not isinstance(cfg, Mapping):
        raise ModelError("config root must be a mapping")
    return build_model(cfg)
