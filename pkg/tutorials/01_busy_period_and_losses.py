"""
Busy periods and the first lost customer
========================================

A small buffer, batches of one to three customers, Erlang service and
geometric departure batches.  We compute the busy-period transform and
mean, the time to the first loss, and check both against simulation.
"""

from fbqueue import BatchLaw, Erlang, QueueModel, SimConfig, SystemState, simulate
from fbqueue import busy_period_lt, busy_period_mean, first_loss_lt, first_loss_mean

model = QueueModel(mu=0.8, batch=BatchLaw({1: 0.5, 2: 0.3, 3: 0.2}),
                   service=Erlang(2, 3.0), lam=0.3, B=6)
print(f"load rho = {model.rho:.4f}")

# two customers present, the service in progress is 0.1 time units old
state = SystemState(2, 0.1)

for s in (0.01, 0.1, 1.0):
    print(f"E exp(-{s} b) = {busy_period_lt(model, state, s):.6f}")

mean_b = busy_period_mean(model, state)
print(f"mean busy period  {mean_b:.6f}")

# first loss: the first arrival that does not fit completely
print(f"E exp(-0.1 l)      {first_loss_lt(model, state, 0.1):.6f}")
mean_l = first_loss_mean(model, state)
print(f"mean first loss    {mean_l:.6f}")

# simulation with 99% intervals
res = simulate(SimConfig(model, state, replications=20_000, seed=1,
                         estimands=("busy_period", "first_loss_time")))
for name, exact in (("busy_period", mean_b), ("first_loss_time", mean_l)):
    e = res.estimates[name]
    print(f"{name:16s} simulated {e.mean:.4f} ± {e.half_width_99:.4f}   exact {exact:.4f}")
