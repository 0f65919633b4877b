"""Gaver-Stehfest inversion of Laplace transforms sampled on the positive real axis.

The Stehfest weights alternate in sign and grow roughly like ``10^{0.6 N}``,
so they are formed and combined in mpmath arithmetic.  Transforms may return
plain floats or mpmath numbers; the latter keep their full precision.
With ``mp_samples`` the sample points themselves are handed over as mpmath
numbers, for transforms that can be evaluated in extended precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import mpmath as mp

from .model import ModelError

__all__ = ["InversionRequest", "InversionResult", "InversionError", "invert", "stehfest_weights"]


class InversionError(ModelError):
    pass


@dataclass(frozen=True)
class InversionRequest:
    transform: Callable[[float], float]
    t: float
    order: int = 14
    precision: int | None = None   # working decimal digits, default max(40, 2.2 * order)
    mp_samples: bool = False       # pass sample points as mpmath numbers instead of floats

    def __post_init__(self):
        if self.order % 2 or self.order < 6:
            raise InversionError("Stehfest order must be even and >= 6")
        if not self.t > 0:
            raise InversionError("inversion time t must be positive")

    @property
    def digits(self) -> int:
        return self.precision or max(40, int(2.2 * self.order + 0.999))


@dataclass(frozen=True)
class InversionResult:
    value: float
    error_estimate: float
    order: int
    flagged: bool = False


@lru_cache(maxsize=64)
def stehfest_weights(order: int, digits: int) -> tuple:
    n2 = order // 2
    with mp.workdps(digits):
        out = []
        for k in range(1, order + 1):
            acc = mp.mpf(0)
            for j in range((k + 1) // 2, min(k, n2) + 1):
                acc += (mp.mpf(j) ** n2 * mp.factorial(2 * j)
                        / (mp.factorial(n2 - j) * mp.factorial(j) * mp.factorial(j - 1)
                           * mp.factorial(k - j) * mp.factorial(2 * j - k)))
            out.append((-1) ** (k + n2) * acc)
        return tuple(out)


def _combine(samples: dict, order: int, t: float, digits: int):
    w = stehfest_weights(order, digits)
    with mp.workdps(digits):
        ln2t = mp.log(2) / mp.mpf(t)
        return ln2t * mp.fsum(w[k - 1] * samples[k] for k in range(1, order + 1))


def invert(request: InversionRequest, *, tol: float | None = None) -> InversionResult:
    """Value of the original function at ``request.t``.

    The error estimate is the change from order ``N - 2`` to ``N``; when it
    exceeds ``tol`` the result is flagged rather than rejected.
    """
    N, t, digits = request.order, request.t, request.digits
    samples = {}
    with mp.workdps(digits):
        ln2t = mp.log(2) / mp.mpf(t)
        for k in range(1, N + 1):
            s = ln2t * k
            try:
                val = request.transform(s if request.mp_samples else float(s))
            except Exception as exc:  # noqa: BLE001 - reported with the sample point
                raise InversionError(f"transform failed at s={float(s):.6g}: {exc}") from exc
            if not mp.isfinite(val):
                raise InversionError(f"transform not finite at s={float(s):.6g}")
            samples[k] = mp.mpf(val) if not isinstance(val, mp.mpf) else val
        # order N-2 uses the same sample points k ln2 / t, k <= N-2
        hi = _combine(samples, N, t, digits)
        lo = _combine(samples, N - 2, t, digits)
    err = float(abs(hi - lo))
    return InversionResult(float(hi), err, N, bool(tol is not None and err > tol))
