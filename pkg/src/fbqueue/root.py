"""The root ``c(s)`` of ``θ = λ + (1-λ) f̃(s - k(θ))`` on ``[0, 1]``."""
from __future__ import annotations

from dataclasses import dataclass

from scipy.optimize import brentq

from .model import ModelError, QueueModel, cumulant

__all__ = ["RootValue", "RootStagnation", "solve_c", "root_map"]


class RootStagnation(ModelError):
    """Fixed-point iteration stopped improving before the tolerance was met."""

    def __init__(self, msg, *, s, last, residual, iterations):
        super().__init__(msg)
        self.s, self.last, self.residual, self.iterations = s, last, residual, iterations


@dataclass(frozen=True)
class RootValue:
    c: float
    s: float
    residual: float
    iterations: int
    method: str


def root_map(model: QueueModel, s: float, theta: float) -> float:
    """``λ + (1-λ) f̃(s - k(θ))``."""
    val = model.service.lt(s - cumulant(model, theta))
    return model.lam + (1.0 - model.lam) * float(val.real if hasattr(val, "real") else val)


def solve_c(model: QueueModel, s: float, *, tol: float = 1e-14, max_iter: int = 100_000) -> RootValue:
    """Smallest root of ``θ = λ + (1-λ) f̃(s - k(θ))`` in ``[0, 1]``.

    For ``s > 0`` the root lies in ``(λ, 1)``. At ``s = 0`` the root is 1
    when ``ρ <= 1`` and lies strictly below 1 otherwise.
    """
    if s < 0:
        raise ModelError("c(s) is defined for s >= 0")
    lam = model.lam
    if s == 0 and model.rho <= 1:
        return RootValue(1.0, 0.0, 0.0, 0, "exact")

    h = lambda th: root_map(model, s, th) - th  # noqa: E731
    # increasing iteration from λ converges monotonically to the smallest root
    th = lam
    best = abs(h(th))
    stall = 0
    for it in range(1, max_iter + 1):
        nxt = root_map(model, s, th)
        step = nxt - th
        prev, th = th, nxt
        if abs(step) <= tol:
            # slow contraction leaves an error of step / (1 - slope); one secant step removes it
            hp, ht = step, h(th)
            if ht != hp:
                cand = th - ht * (th - prev) / (ht - hp)
                if lam < cand <= 1 and abs(h(cand)) <= abs(ht):
                    th = cand
            return RootValue(th, s, abs(h(th)), it, "fixed-point")
        r = abs(step)
        # geometric convergence too slow: hand over to bracketing
        if it > 50 and r > 0.98 * best:
            stall += 1
            if stall > 20:
                break
        best = min(best, r)

    # bracketing fallback; at s = 0 with ρ > 1 keep away from the trivial root 1
    hi = 1.0 if s > 0 else 1.0 - 1e-10
    lo = max(th - 1e-9, lam)
    if h(lo) < 0:
        lo = lam
    try:
        root = brentq(h, lo, hi, xtol=1e-16, rtol=1e-15, maxiter=500, full_output=True)
        root, info = root[0], root[1]
    except ValueError as exc:
        raise RootStagnation(f"root search stalled at s={s}: {exc}", s=s, last=th,
                             residual=abs(h(th)), iterations=max_iter) from exc
    return RootValue(root, s, abs(h(root)), it + info.iterations, "brentq")
