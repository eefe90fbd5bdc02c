"""The bound family, evaluated side by side on one evolved state.

Worst case prices every input; the normalized Frobenius norm prices a random
one.  The state-aware bounds sit in between, tracking how mixed the local
marginals of the actual input are, and the sliced long-time procedure turns
the per-step picture into a step count for a full simulation.
"""

from trotterkit import (
    ExactEvolver,
    SplitBoundData,
    average_case_bound,
    build_qimf,
    converged_segmented_steps,
    distance_based_bound,
    entanglement_based_bound,
    leading_error_terms,
    light_cone_bound,
    pf2_concrete_bound,
    purity_based_bound,
    refined_pauli_bound,
    worst_case_bound,
    zero_state,
)

n, dt, t_probe = 8, 1e-3, 4.0
split = build_qimf(n, hx=0.8090, hy=0.9045, j=1.0)
data = SplitBoundData(split)
ev = ExactEvolver(split.hamiltonian())
psi = ev.evolve(zero_state(n), t_probe)

print(f"PF2 per-step bounds at dt={dt}, state = exact trajectory at t={t_probe}")
print(f"  worst case (1-norm counting)   {worst_case_bound(split, 2, dt, data):.4e}")
print(f"  concrete state-aware bound     {pf2_concrete_bound(split, psi, dt, data).value:.4e}")
print(f"  average case (Frobenius)       {average_case_bound(split, 2, dt, data):.4e}")

ets1, ets2 = leading_error_terms(split, 2)
print("\nper-family leading bounds (first nested commutator set):")
for name, fn in [("distance-based", distance_based_bound),
                 ("entanglement-based", entanglement_based_bound),
                 ("purity-based", purity_based_bound),
                 ("refined (exact expectation)", refined_pauli_bound)]:
    rep = fn(ets1, psi, dt)
    print(f"  {name:<28} {rep.value:.4e}")
lc = light_cone_bound(ets1, psi, depth=2, dt=dt)
print(f"  {'light-cone (depth 2)':<28} {lc.value:.4e}")

r_star, c_used, history = converged_segmented_steps(
    split, zero_state(n), float(n), 1e-5, ev, data=data)
print(f"\nsliced long-time bound at t={n}, eps=1e-5:")
for c, r in history:
    print(f"  C={c:>2}: r* = {r}")
print(f"converged at C={c_used}: {r_star} steps")
