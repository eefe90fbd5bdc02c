"""Exact evolution against product formulas: per-step error and order.

A PF_p step of size dt misses the exact propagator by O(dt^(p+1)).  The
log-log slope of the per-step error against dt exposes the order; time
reversal and unitarity come along for free.
"""

import numpy as np

from trotterkit import (
    ExactEvolver,
    FormulaSpec,
    build_qimf,
    empirical_step_error,
    fit_loglog_slope,
    pf_step,
    zero_state,
)

n = 8
split = build_qimf(n, hx=0.8090, hy=0.9045, j=1.0)
ev = ExactEvolver(split.hamiltonian())
psi = zero_state(n)

dts = [0.02, 0.04, 0.06, 0.08, 0.1]
print(f"per-step error on |0>^{n}, dt in {dts}")
for order in (1, 2, 4):
    spec = FormulaSpec(order, split)
    errs = [empirical_step_error(spec, psi, dt, ev) for dt in dts]
    slope = fit_loglog_slope(dts, errs)
    print(f"  PF{order}: errors {errs[0]:.2e} .. {errs[-1]:.2e}, "
          f"slope {slope:.2f} (expect {order + 1})")

spec2 = FormulaSpec(2, split)
forward = pf_step(spec2, psi, 0.3)
back = pf_step(spec2, forward, -0.3)
print(f"\nPF2 time reversal: |psi - U(-dt)U(dt)psi| = {back.distance(psi):.2e}")
print(f"norm after a step: {forward.norm():.15f}")

exact = ev.evolve(psi, 1.0)
steps = 200
cur = psi
for _ in range(steps):
    cur = pf_step(spec2, cur, 1.0 / steps)
print(f"\nPF2 with r={steps} steps over t=1: total error {exact.distance(cur):.2e}")
