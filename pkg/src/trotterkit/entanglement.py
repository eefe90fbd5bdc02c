"""Reduced density matrices and entanglement diagnostics.

Everything here is exact linear algebra on small supports: partial traces of
pure states, von Neumann and Renyi-2 entropies (reported in bits), the trace
distance to the maximally mixed state (full trace norm, no 1/2 factor), and
exhaustive approximate-uniformity certification over subsystem choices.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DimensionMismatchError,
    InvalidOperatorError,
    ResourceLimitError,
)
from .states import StateVector

RDM_QUBIT_CAP = 8
SUBSET_CAP = 20_000
EIGENVALUE_DUST = -1e-10
LN2 = math.log(2.0)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian unit-trace matrix on an explicit sorted qubit support."""

    matrix: np.ndarray
    support: tuple[int, ...]

    def __post_init__(self):
        d = 1 << len(self.support)
        if self.matrix.shape != (d, d):
            raise DimensionMismatchError(
                f"matrix shape {self.matrix.shape} vs support of {len(self.support)} qubits"
            )
        if abs(np.trace(self.matrix) - 1.0) > 1e-10:
            raise InvalidOperatorError("density matrix trace deviates from 1")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        """Spectrum, validated against negative dust and clipped to [0, 1]."""
        vals = np.linalg.eigvalsh(self.matrix)
        if vals.min() < EIGENVALUE_DUST:
            raise InvalidOperatorError(
                f"density matrix eigenvalue {vals.min():.3e} below tolerance"
            )
        return np.clip(vals, 0.0, 1.0)

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)


def reduced_density_matrix(psi: StateVector, support: Iterable[int],
                           cap: int = RDM_QUBIT_CAP) -> DensityMatrix:
    """Exact partial trace of |psi><psi| onto the given qubits."""
    support = tuple(sorted(set(int(q) for q in support)))
    n = psi.n_qubits
    if any(q < 0 or q >= n for q in support):
        raise DimensionMismatchError("support outside register")
    if len(support) > cap:
        raise ResourceLimitError(
            f"support of {len(support)} qubits exceeds RDM cap {cap}"
        )
    if not support:
        return DensityMatrix(np.array([[1.0 + 0j]]), ())
    k = len(support)
    tensor = psi.amplitudes.reshape([2] * n)
    # axis a of the reshape holds qubit n-1-a; lead with the support qubits,
    # most significant first, so the row index is little-endian in `support`
    axes = [n - 1 - q for q in reversed(support)]
    axes += [a for a in range(n) if a not in axes]
    block = tensor.transpose(axes).reshape(1 << k, -1)
    return DensityMatrix(block @ block.conj().T, support)


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    vals = rho.eigenvalues()
    vals = vals[vals > 0]
    return float(-(vals * np.log2(vals)).sum())


def renyi2_entropy(rho: DensityMatrix) -> float:
    """S2 = -log2 tr(rho^2), in bits."""
    return float(-math.log2(rho.purity()))


def dist_to_maximally_mixed(rho: DensityMatrix) -> float:
    """tr |rho - I/d| (full trace norm, matching the bound definitions)."""
    vals = rho.eigenvalues()
    return float(np.abs(vals - 1.0 / rho.dim).sum())


def pinsker_distance_bound(rho: DensityMatrix) -> float:
    """sqrt(2 ln2 (log2 d - S)) >= tr|rho - I/d|, the relative-entropy route."""
    gap = max(math.log2(rho.dim) - von_neumann_entropy(rho), 0.0)
    return math.sqrt(2.0 * LN2 * gap)


@dataclass(frozen=True)
class UniformityReport:
    """Worst-case trace distance to maximal mixing over all k-subsets."""

    k: int
    delta: float
    witness_subset: tuple[int, ...]

    def __post_init__(self):
        if not 0.0 <= self.delta <= 2.0 + 1e-12:
            raise InvalidOperatorError(f"delta {self.delta} outside [0, 2]")


def k_uniformity(psi: StateVector, k: int, subset_cap: int = SUBSET_CAP,
                 rdm_cap: int = RDM_QUBIT_CAP) -> UniformityReport:
    """Exhaustive max of tr|rho_S - I/2^k| over all k-qubit subsets."""
    if k < 1 or k > psi.n_qubits:
        raise DimensionMismatchError("k outside register")
    if k > min(6, rdm_cap):
        raise ResourceLimitError(f"k={k} above uniformity cap")
    n_subsets = math.comb(psi.n_qubits, k)
    if n_subsets > subset_cap:
        raise ResourceLimitError(
            f"{n_subsets} subsets exceed enumeration cap {subset_cap}"
        )
    worst, witness = -1.0, None
    for subset in combinations(range(psi.n_qubits), k):
        d = dist_to_maximally_mixed(reduced_density_matrix(psi, subset, cap=rdm_cap))
        if d > worst:
            worst, witness = d, subset
    return UniformityReport(k, worst, witness)


def mutual_information(psi: StateVector, supp_a: Iterable[int], supp_b: Iterable[int],
                       cap: int = RDM_QUBIT_CAP) -> float:
    """I(A:B) = S(A) + S(B) - S(AB) in bits; supports must be disjoint."""
    sa = tuple(sorted(set(supp_a)))
    sb = tuple(sorted(set(supp_b)))
    if set(sa) & set(sb):
        raise DimensionMismatchError("mutual information needs disjoint supports")
    s_a = von_neumann_entropy(reduced_density_matrix(psi, sa, cap))
    s_b = von_neumann_entropy(reduced_density_matrix(psi, sb, cap))
    s_ab = von_neumann_entropy(reduced_density_matrix(psi, sa + sb, cap))
    value = s_a + s_b - s_ab
    if value < -1e-9:
        raise InvalidOperatorError(f"mutual information {value:.3e} below -1e-9")
    return max(value, 0.0)


def write_entropy_csv(path, rows: Sequence[tuple[float, str, float, float, float]]) -> None:
    """Entropy trajectory rows: (t, subset_label, S_vn_bits, S_renyi2_bits, trace_dist)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "subset_label", "S_vn_bits", "S_renyi2_bits", "trace_dist"])
        for t, label, svn, s2, dist in rows:
            w.writerow([f"{t:.10g}", label, f"{svn:.10f}", f"{s2:.10f}", f"{dist:.10f}"])
