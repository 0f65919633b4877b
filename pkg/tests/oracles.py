"""Independent oracles: finite continuous-time Markov chains for phase-type service.

An Erlang-mixture service law is phase-type: a service is a component and a
count of remaining exponential stages.  With that phase, the free process,
the reflected processes and the queue are finite (or truncated) Markov
chains, and every transform of a hitting time solves a linear system
``(sI - G) h = b``.  Nothing here touches the resolvent sequence.
"""
from __future__ import annotations

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import spsolve

from fbqueue.model import ErlangMixture, QueueModel


class Phases:
    """Stage space for the fresh service law plus the residual law at age ``x``."""

    def __init__(self, model: QueueModel, x: float = 0.0):
        fresh = model.service
        if not isinstance(fresh, ErlangMixture):
            raise TypeError("CTMC oracle needs an Erlang-mixture service law")
        self.rate, self.next = [], []   # per phase: stage rate, next stage (-1 = completion)
        self.fresh_init = self._add(fresh)
        self.resid_init = self._add(fresh.residual(x))
        self.n = len(self.rate)

    def _add(self, law):
        init = {}
        for w, n, v in law.components():
            base = len(self.rate)
            for j in range(n):
                self.rate.append(v)
                self.next.append(base + j + 1 if j < n - 1 else -1)
            init[base] = init.get(base, 0.0) + w
        return init

    def completion_lt(self, s: float) -> np.ndarray:
        """``E e^{-s (remaining service)}`` from each phase."""
        out = np.zeros(self.n)
        for p in reversed(range(self.n)):
            v = self.rate[p]
            nx = self.next[p]
            out[p] = v / (v + s) * (1.0 if nx < 0 else out[nx])
        return out


class LevelChain:
    """``(level, phase)`` chain on ``lo..hi``.

    Arrivals add κ; above ``hi`` the path is either capped at ``hi``
    (``cap=True``, reflection at the supremum) or killed (upper exit).  A
    completion subtracts δ ~ ge(λ) and starts a fresh service; going below
    ``lo`` kills the path (lower exit).
    """

    def __init__(self, model: QueueModel, x: float, lo: int, hi: int, *, cap: bool = False,
                 m_max: int = 30):
        self.model, self.lo, self.hi, self.cap = model, lo, hi, cap
        ph = self.ph = Phases(model, x)
        nph = ph.n
        n = self.N = (hi - lo + 1) * nph
        mu, lam = model.mu, model.lam
        a = model.batch.pmf(hi - lo + m_max + 1)
        rows, cols, vals = [], [], []
        out = np.zeros(n)
        self.up = np.zeros((n, m_max + 1))     # column 0: total rate, column m: overshoot m
        self.down = np.zeros((n, m_max + 1))
        self.done = np.zeros((n, nph))         # completion rates, by phase completing

        def add(i, j, v):
            rows.append(i); cols.append(j); vals.append(v)

        for d in range(lo, hi + 1):
            for p in range(nph):
                i = self.idx(d, p)
                for j in range(1, hi - d + 1):
                    if a[j] > 0:
                        add(i, self.idx(d + j, p), mu * a[j])
                over = mu * model.batch.sf(hi - d)
                if cap:
                    if d < hi:
                        add(i, self.idx(hi, p), over)
                        out[i] += over
                else:
                    self.up[i, 0] = over
                    for m in range(1, m_max + 1):
                        self.up[i, m] = mu * a[hi - d + m]
                    out[i] += over
                out[i] += mu * (1 - model.batch.sf(hi - d))
                v = ph.rate[p]
                out[i] += v
                nx = ph.next[p]
                if nx >= 0:
                    add(i, self.idx(d, nx), v)
                    continue
                for g in range(1, d - lo + 1):
                    pg = (1 - lam) * lam ** (g - 1)
                    for q, w in ph.fresh_init.items():
                        add(i, self.idx(d - g, q), v * pg * w)
                self.down[i, 0] = v * lam ** (d - lo)
                for m in range(1, m_max + 1):
                    self.down[i, m] = v * (1 - lam) * lam ** (d - lo + m - 1)
        self.G = (sparse.csr_matrix((vals, (rows, cols)), shape=(n, n)) - sparse.diags(out)).tocsc()
        self.init = np.zeros(n)
        for q, w in ph.resid_init.items():
            self.init[self.idx(0 if lo <= 0 <= hi else lo, q)] = w

    def idx(self, d, p):
        return (d - self.lo) * self.ph.n + p

    def start_at(self, d):
        v = np.zeros(self.N)
        for q, w in self.ph.resid_init.items():
            v[self.idx(d, q)] = w
        return v

    def solve(self, s, b):
        return spsolve((s * sparse.identity(self.N, format="csc") - self.G).tocsc(), b)

    def lt(self, s, b, start=None):
        init = self.init if start is None else start
        return float(init @ self.solve(s, b))

    def exit_lower(self, s, start=None):
        return self.lt(s, self.down[:, 0], start)

    def exit_upper(self, s, start=None):
        return self.lt(s, self.up[:, 0], start)

    def upper_then_completion(self, s, start=None):
        """``E[e^{-s(χ + remaining service)}; upper exit]``."""
        g = self.ph.completion_lt(s)
        b = self.up[:, 0] * np.tile(g, self.hi - self.lo + 1)
        return self.lt(s, b, start)

    def level_indicator(self, u):
        ind = np.zeros(self.N)
        for d in range(self.lo, min(u, self.hi) + 1):
            ind[self.idx(d, 0):self.idx(d, 0) + self.ph.n] = 1.0
        return ind

    def below_at_exp_time(self, s, u, start=None):
        """``s ∫ e^{-st} P[level(t) <= u, not killed] dt``."""
        return s * self.lt(s, self.level_indicator(u), start)


class QueueChain:
    """The queue: an idle state followed by ``LevelChain`` levels ``1..B+1``.

    Arrivals at content ``r`` raise it to ``min(r + κ, B+1)``.  A completion
    removes ``min(r, δ)``; reaching 0 means the idle state.  With
    ``kill_on_loss`` every arrival that loses customers kills the path, so
    the chain describes the first-loss time.
    """

    def __init__(self, model: QueueModel, x: float = 0.0, *, kill_on_loss: bool = False,
                 m_max: int = 40):
        self.model = model
        top = self.top = model.B + 1
        self.body = LevelChain(model, x, 1, top, cap=not kill_on_loss, m_max=m_max)
        body, ph = self.body, self.body.ph
        n = self.N = body.N + 1
        mu = model.mu
        G = sparse.lil_matrix((n, n))
        G[1:, 1:] = body.G
        G[1:, 0] = body.down[:, 0].reshape(-1, 1)
        a = model.batch.pmf(top + m_max + 1)
        for j in range(1, top + 1):
            pj = a[j] if (j < top or kill_on_loss) else model.batch.sf(top - 1)
            for q, w in ph.fresh_init.items():
                G[0, 1 + body.idx(j, q)] += mu * pj * w
        G[0, 0] = -mu
        self.G = G.tocsc()
        self.loss = np.zeros((n, m_max + 1))
        if kill_on_loss:
            self.loss[1:] = body.up
            self.loss[0, 0] = mu * model.batch.sf(top)
            for m in range(1, m_max + 1):
                self.loss[0, m] = mu * a[top + m]
        lv = np.zeros(n, dtype=int)
        for r in range(1, top + 1):
            lv[1 + body.idx(r, 0):1 + body.idx(r, 0) + ph.n] = r
        self.levels = lv

    def start(self, r: int) -> np.ndarray:
        v = np.zeros(self.N)
        if r == 0:
            v[0] = 1.0
        else:
            v[1:] = self.body.start_at(r)
        return v

    def _solve(self, s, b):
        return spsolve((s * sparse.identity(self.N, format="csc") - self.G).tocsc(), b)

    def stationary(self) -> np.ndarray:
        n = self.N
        A = np.vstack([self.G.toarray().T, np.ones(n)])
        b = np.zeros(n + 1)
        b[-1] = 1
        pi = np.linalg.lstsq(A, b, rcond=None)[0]
        return np.bincount(self.levels, weights=pi, minlength=self.top + 1)

    def transient(self, r: int, t: float) -> np.ndarray:
        p = self.start(r) @ expm(self.G.toarray() * t)
        return np.bincount(self.levels, weights=p, minlength=self.top + 1)

    def resolvent_levels(self, r: int, s: float) -> np.ndarray:
        """``s ∫ e^{-st} P[content(t) = u] dt`` for u = 0..B+1."""
        p = spsolve((s * sparse.identity(self.N, format="csc") - self.G).T.tocsc(), self.start(r))
        return s * np.bincount(self.levels, weights=p, minlength=self.top + 1)

    def busy_period_lt(self, r: int, s: float) -> float:
        return self.body.exit_lower(s, self.body.start_at(r))

    def busy_period_mean(self, r: int) -> float:
        h = spsolve((-self.body.G).tocsc(), np.ones(self.body.N))
        return float(self.body.start_at(r) @ h)

    def first_loss_lt(self, r: int, s: float, m: int = 0) -> float:
        """``E[e^{-sτ}; lost = m]`` at the first lossy arrival (``m = 0``: any count)."""
        return float(self.start(r) @ self._solve(s, self.loss[:, m]))

    def first_loss_mean(self, r: int) -> float:
        h = spsolve((-self.G).tocsc(), np.ones(self.N))
        return float(self.start(r) @ h)


def mm1n_stationary(mu: float, nu: float, N: int) -> np.ndarray:
    """Truncated geometric law of the M/M/1/N queue, levels 0..N."""
    r = mu / nu
    w = r ** np.arange(N + 1)
    return w / w.sum()
