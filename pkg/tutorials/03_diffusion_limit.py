"""
Heavy traffic: buffer size against the Wiener limit
===================================================

At critical load the free process, with levels scaled by the buffer size
B and time by B², behaves like σ times a Wiener process.  The deviations
of the prelimit quantities from their Wiener counterparts shrink like 1/B.
"""

from fbqueue import convergence_report, reference_model
from fbqueue.diffusion_limit import WienerSpec, wiener_trivariate

model = reference_model()
print(f"rho = {model.rho:.12f}, sigma = {model.diffusion().sigma:.6f}")

for quantity in ("root", "resolvent", "passage", "trivariate", "reflected_window"):
    rep = convergence_report(model, quantity, (50, 100, 200))
    devs = " ".join(f"{d:.4f}" for d in rep.deviations)
    print(f"{quantity:18s} {devs}   nonincreasing={rep.nonincreasing}")

# the limit itself: stay inside [-1/2, 1/2] up to time 1/2 and end below 0
print("Wiener window probability:", wiener_trivariate(WienerSpec(1.0, 0.5, 0.5, 0.0, 0.5)))
