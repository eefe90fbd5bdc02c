"""Randomized measurements: observables, purities, and the error functional.

Each snapshot measures every qubit in a random X/Y/Z basis.  Averages of
simple snapshot functionals estimate local observables and subsystem
purities, and - the piece the adaptive protocol needs - the second moment
<E^dag E> of the leading Trotter error, using only local Pauli data.
"""

import math

import numpy as np

from trotterkit import (
    ExactEvolver,
    PauliSum,
    PauliTerm,
    build_qimf,
    collect_shadows,
    estimate_pauli,
    estimate_purity,
    estimate_trotter_error,
    expectation,
    leading_error_terms,
    reduced_density_matrix,
    zero_state,
)
from trotterkit.shadows import exact_error_second_moment

n, t, dt = 8, 2.0, 1e-3
split = build_qimf(n, hx=0.8090, hy=0.9045, j=1.0)
ev = ExactEvolver(split.hamiltonian())
psi = ev.evolve(zero_state(n), t)

m = 64 * n * n
shadows = collect_shadows(psi, m, rng_seed=42, source_descriptor=f"t={t}")
print(f"collected {m} snapshots of the evolved state (seeded, reproducible)")

term = PauliTerm(1.0, ((3, "Z"), (4, "Z")), n)
est = estimate_pauli(shadows, term)
exact = expectation(psi, PauliSum(n, [term])).real
print(f"\n<Z3 Z4>: shadow estimate {est:+.4f}, exact {exact:+.4f}")

rho = reduced_density_matrix(psi, (3, 4))
print(f"purity of qubits (3,4): estimate {estimate_purity(shadows, (3, 4)):.4f}, "
      f"exact {rho.purity():.4f}")
print(f"  (median of means over 10 batches: "
      f"{estimate_purity(shadows, (3, 4), batches=10):.4f})")

print("\nleading-error second moments for the PF2 step:")
for ets in leading_error_terms(split, 2):
    est = estimate_trotter_error(shadows, ets, dt)
    truth = dt**3 * math.sqrt(exact_error_second_moment(ets, psi))
    print(f"  {ets.label}: estimated error {est.value:.3e} "
          f"(exact {truth:.3e}, stderr of moment {est.stderr:.2f})")
