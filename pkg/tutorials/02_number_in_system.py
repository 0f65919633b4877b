"""
Number in system: stationary and transient laws
===============================================

The transient law at an exponential time comes out of the resolvent
tables directly.  Inverting it numerically gives the law at a fixed time,
which settles on the stationary law as time grows.
"""

from pathlib import Path

import numpy as np

from fbqueue import InversionRequest, SystemState, invert, load_model, stationary_dist, transient_counts

model = load_model(Path(__file__).resolve().parent.parent / "configs" / "batch_erlang.yaml")
pi = stationary_dist(model)
print("stationary law:", np.round(pi.masses, 5))

state = SystemState(3)


# P[number <= u] at time t, by inverting the transform divided by s
def cdf_at(t, u, order=14):
    req = InversionRequest(lambda s: transient_counts(model, state, s).cdf(u) / s, t, order=order)
    return invert(req).value


for t in (0.5, 2.0, 10.0, 50.0):
    row = [cdf_at(t, u) for u in range(model.B + 2)]
    print(f"t={t:5.1f}", " ".join(f"{v:.4f}" for v in row))

print("limit ", " ".join(f"{v:.4f}" for v in np.cumsum(pi.masses)))
