"""Symbolic Pauli algebra: spin-chain models, commutators, and norms.

The error analysis of product formulas runs on nested commutators of the
Hamiltonian parts.  This script builds the two lattice models, evaluates the
commutators that control first- and second-order Trotter error, and compares
the three norms the bounds use.
"""

import numpy as np

from trotterkit import build_heisenberg, build_qimf, commutator, nested_commutator_norm_sum

n = 8
hx, hy, j = 0.8090, 0.9045, 1.0

split = build_qimf(n, hx, hy, j)
a, b = split.parts
print(f"mixed-field Ising chain on {n} qubits")
print(f"  part A (X fields + XX couplings): {len(a)} terms, "
      f"commuting={split.within_part_commuting[0]}")
print(f"  part B (Y fields):                {len(b)} terms, "
      f"commuting={split.within_part_commuting[1]}")

e = commutator(a, b)
print(f"\n[A, B] has {len(e)} strings; the site-0 block reads")
for letters in ({0: "Z"}, {0: "Z", 1: "X"}, {0: "X", 1: "Z"}):
    print(f"  {letters} -> {e.coefficient_of(letters):+.4f}")
print(f"expected 2i hx hy = {2j * hx * hy:.4f}i and 2i J hy = {2j * j * hy:.4f}i")

print("\nnorms of [A, B]:")
print(f"  coefficient 1-norm (worst-case surrogate)  {e.one_norm():.4f}")
print(f"  normalized Frobenius (average-case)        {e.frobenius_norm():.4f}")
print(f"  exact spectral (dense on support)          {e.spectral_norm_dense():.4f}")
print(f"counting formula 2 hx hy N + 4 hy J (N-1) = "
      f"{2 * hx * hy * n + 4 * hy * j * (n - 1):.4f}")

alpha3 = nested_commutator_norm_sum(split, 3)
print(f"\nremainder coefficient at depth 3 (1-norm route): {alpha3:.2f}")

heis = build_heisenberg(6, [0.5] * 6)
print(f"\nHeisenberg chain on 6 qubits with uniform field 0.5")
print(f"  even-bond part: {len(heis.parts[0])} terms, "
      f"commuting={heis.within_part_commuting[0]} "
      "(fields anticommute with their own bond)")
eh = commutator(heis.parts[0], heis.parts[1])
print(f"  [A, B]: {len(eh)} strings, Frobenius {eh.frobenius_norm():.4f}")
