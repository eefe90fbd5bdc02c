"""Dense statevector simulation.

The substrate for every experiment: exact evolution ``exp(-iHt)`` (cached
eigendecomposition up to a dense cap, Lanczos beyond it), exact stage
exponentials for product-formula stepping, expectation values, and seeded
computational-basis sampling.

A Pauli string acts on amplitudes as a bit-flip permutation plus a phase
vector, so every operator application here is a handful of O(2^N) vector
operations; nothing below builds a 2^N x 2^N matrix unless explicitly asked
to (``ExactEvolver`` with the eigendecomposition method, ``dense_unitary``).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    ContractViolationError,
    DimensionMismatchError,
    InvalidOperatorError,
    ResourceLimitError,
)
from .pauli import PauliSum, PauliTerm, _I_POWERS, _parity_signs, part_commutes

NORM_TOL = 1e-10
DEFAULT_DENSE_CAP = 12
CLUSTER_CAP = 6

_SINGLE_QUBIT_KETS = {
    "0": np.array([1.0, 0.0], dtype=np.complex128),
    "1": np.array([0.0, 1.0], dtype=np.complex128),
    "+": np.array([1.0, 1.0], dtype=np.complex128) / math.sqrt(2),
    "-": np.array([1.0, -1.0], dtype=np.complex128) / math.sqrt(2),
    "+i": np.array([1.0, 1.0j], dtype=np.complex128) / math.sqrt(2),
    "-i": np.array([1.0, -1.0j], dtype=np.complex128) / math.sqrt(2),
}
# +1 eigenstates of each Pauli letter
EIGENSTATE_OF = {"X": "+", "Y": "+i", "Z": "0"}


class StateVector:
    """Normalized amplitude vector over 2^N little-endian basis states."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes: np.ndarray, n_qubits: int | None = None,
                 check_norm: bool = True):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.ndim != 1:
            raise DimensionMismatchError("amplitudes must be one-dimensional")
        n = int(round(math.log2(amps.size)))
        if 1 << n != amps.size:
            raise DimensionMismatchError(f"length {amps.size} is not a power of two")
        if n_qubits is not None and n_qubits != n:
            raise DimensionMismatchError(
                f"{amps.size} amplitudes inconsistent with {n_qubits} qubits"
            )
        if check_norm and abs(np.linalg.norm(amps) - 1.0) > 1e-8:
            raise ContractViolationError(
                f"state norm {np.linalg.norm(amps):.3e} deviates from 1"
            )
        self.amplitudes = amps
        self.n_qubits = n

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def renormalized(self) -> "StateVector":
        return StateVector(self.amplitudes / self.norm())

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), check_norm=False)

    def distance(self, other: "StateVector") -> float:
        """Plain l2 distance between amplitude vectors (phase sensitive)."""
        return float(np.linalg.norm(self.amplitudes - other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) ** 2)

    def __repr__(self):
        return f"StateVector({self.n_qubits} qubits)"


def zero_state(n: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps)


def basis_state(n: int, index: int) -> StateVector:
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def product_state(labels: Sequence[str]) -> StateVector:
    """Tensor product of single-qubit kets; ``labels[q]`` names qubit q's state.

    Valid labels: ``0 1 + - +i -i``.
    """
    amps = np.array([1.0], dtype=np.complex128)
    for label in reversed(labels):  # qubit 0 is the least significant bit
        amps = np.kron(amps, _SINGLE_QUBIT_KETS[label])
    return StateVector(amps)


def random_state(n: int, rng) -> StateVector:
    rng = np.random.default_rng(rng)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(amps / np.linalg.norm(amps))


def graph_state(n: int, edges: Iterable[tuple[int, int]]) -> StateVector:
    """Graph state: |+>^n with a CZ applied across every edge."""
    idx = np.arange(1 << n)
    signs = np.ones(1 << n)
    for u, v in edges:
        signs *= 1.0 - 2.0 * ((idx >> u) & (idx >> v) & 1)
    return StateVector(signs / math.sqrt(1 << n))


# ---------------------------------------------------------------------------
# Compiled Pauli application
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _CompiledString:
    """Permutation+phase action of one Pauli string on amplitude arrays."""

    coefficient: complex
    perm: np.ndarray    # row index -> source index (an involution)
    phase: np.ndarray   # phase picked up at each destination row

    def apply(self, arr: np.ndarray) -> np.ndarray:
        out = arr[self.perm]
        if out.ndim > 1:
            out *= self.phase.reshape((-1,) + (1,) * (out.ndim - 1))
        else:
            out *= self.phase
        return out


def compile_string(term: PauliTerm, n_qubits: int) -> _CompiledString:
    dim = 1 << n_qubits
    idx = np.arange(dim)
    flip = 0
    zy = 0
    n_y = 0
    for site, letter in term.letters:
        if letter in ("X", "Y"):
            flip |= 1 << site
        if letter in ("Z", "Y"):
            zy |= 1 << site
        if letter == "Y":
            n_y += 1
    perm = idx ^ flip
    phase = _I_POWERS[n_y % 4] * _parity_signs(perm, zy)
    return _CompiledString(complex(term.coefficient), perm, phase.astype(np.complex128))


class CompiledPauliSum:
    """A PauliSum pre-lowered to permutation+phase actions for one register."""

    def __init__(self, s: PauliSum, n_qubits: int | None = None):
        self.n_qubits = n_qubits or s.n_qubits
        self.strings = [compile_string(t, self.n_qubits) for t in s]

    def apply(self, arr: np.ndarray) -> np.ndarray:
        out = np.zeros_like(arr)
        for cs in self.strings:
            contrib = cs.apply(arr)
            contrib *= cs.coefficient
            out += contrib
        return out

    def expectation(self, psi: StateVector) -> complex:
        amps = psi.amplitudes
        total = 0.0 + 0.0j
        for cs in self.strings:
            total += cs.coefficient * np.vdot(amps, cs.apply(amps))
        return complex(total)


def apply_pauli_sum(s: PauliSum, arr: np.ndarray, n_qubits: int | None = None) -> np.ndarray:
    """Apply an operator to raw amplitudes (result need not be normalized)."""
    return CompiledPauliSum(s, n_qubits).apply(arr)


def expectation(psi: StateVector, o: PauliSum) -> complex:
    """Exact <psi|O|psi>."""
    if o.n_qubits != psi.n_qubits:
        raise DimensionMismatchError("operator and state register sizes differ")
    return CompiledPauliSum(o).expectation(psi)


# ---------------------------------------------------------------------------
# Group (stage) exponentials
# ---------------------------------------------------------------------------

class GroupExponential:
    """Exact ``exp(-i theta * part)`` applier for one split part.

    Two exact strategies:

    * term path - every pair of strings commutes, so the exponential is the
      ordered product of per-string rotations ``cos(theta c) I - i sin(theta c) P``
      (bit-mask order fixed by the canonical term ordering);
    * cluster path - strings are grouped into connected clusters by support
      overlap; clusters act on disjoint qubits, so exponentiating each cluster
      densely on its own support is still exact.  Used for parts (e.g.
      Heisenberg blocks with fields) that are not term-wise commuting.

    Raises ``ContractViolationError`` if a non-commuting cluster exceeds
    ``cluster_cap`` qubits; the caller must then refine the split.
    """

    def __init__(self, part: PauliSum, commuting: bool | None = None,
                 cluster_cap: int = CLUSTER_CAP):
        self.n_qubits = part.n_qubits
        self.part = part
        if not part.is_hermitian():
            raise InvalidOperatorError("stage generator must be Hermitian")
        self.commuting = part_commutes(part) if commuting is None else commuting
        if self.commuting:
            self._strings = [(float(t.coefficient.real), compile_string(t, self.n_qubits))
                             for t in part]
            self._clusters = None
        else:
            self._strings = None
            self._clusters = _split_clusters(part, cluster_cap)

    def apply(self, arr: np.ndarray, theta: float) -> np.ndarray:
        if self.commuting:
            out = arr
            for c, cs in self._strings:
                rotated = cs.apply(out)
                out = math.cos(theta * c) * out + (-1j * math.sin(theta * c)) * rotated
            return out
        out = arr
        for cluster in self._clusters:
            out = cluster.apply(out, theta)
        return out


class _DenseCluster:
    """Dense exponential of a connected sub-operator on its own support."""

    def __init__(self, op: PauliSum, n_qubits: int):
        self.support = op.support
        h = op.dense_on_support()
        self.eigvals, self.eigvecs = np.linalg.eigh(h)
        self.gather = _support_gather_indices(self.support, n_qubits)

    def apply(self, arr: np.ndarray, theta: float) -> np.ndarray:
        u = (self.eigvecs * np.exp(-1j * theta * self.eigvals)) @ self.eigvecs.conj().T
        out = arr.copy()
        block = arr[self.gather]                      # (2^k, rest, *tail)
        out[self.gather] = np.tensordot(u, block, axes=(1, 0))
        return out


def _split_clusters(part: PauliSum, cluster_cap: int) -> list[_DenseCluster]:
    # union-find over terms sharing support sites
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    terms = list(part)
    site_owner: dict[int, int] = {}
    for i, t in enumerate(terms):
        parent[i] = i
        for s in t.support:
            if s in site_owner:
                union(i, site_owner[s])
            else:
                site_owner[s] = i

    groups: dict[int, list[PauliTerm]] = {}
    for i, t in enumerate(terms):
        if t.weight == 0:
            continue  # identity contributes only a global phase; drop it
        groups.setdefault(find(i), []).append(t)

    clusters = []
    for members in groups.values():
        op = PauliSum(part.n_qubits, members)
        if len(op.support) > cluster_cap:
            raise ContractViolationError(
                f"non-commuting cluster spans {len(op.support)} qubits "
                f"(cap {cluster_cap}); use a finer Hamiltonian split"
            )
        clusters.append(_DenseCluster(op, part.n_qubits))
    clusters.sort(key=lambda c: c.support)
    return clusters


def _support_gather_indices(support: tuple[int, ...], n_qubits: int) -> np.ndarray:
    """Index table of shape (2^k, 2^(n-k)) mapping (support bits, rest bits)
    to global basis indices."""
    k = len(support)
    rest = [q for q in range(n_qubits) if q not in support]
    sup_idx = np.zeros(1 << k, dtype=np.int64)
    for m, q in enumerate(support):
        sup_idx |= ((np.arange(1 << k) >> m) & 1) << q
    rest_idx = np.zeros(1 << len(rest), dtype=np.int64)
    for m, q in enumerate(rest):
        rest_idx |= ((np.arange(1 << len(rest)) >> m) & 1) << q
    return sup_idx[:, None] | rest_idx[None, :]


def apply_group_exponential(part: PauliSum, psi: StateVector, theta: float,
                            commuting: bool | None = None) -> StateVector:
    """Apply ``exp(-i theta * part)`` exactly to a state."""
    if part.n_qubits != psi.n_qubits:
        raise DimensionMismatchError("part and state register sizes differ")
    out = GroupExponential(part, commuting).apply(psi.amplitudes, theta)
    return StateVector(out, check_norm=False)


# ---------------------------------------------------------------------------
# Exact evolution
# ---------------------------------------------------------------------------

class ExactEvolver:
    """Reference propagator ``exp(-iHt)``.

    Up to ``dense_cap`` qubits the Hamiltonian is eigendecomposed once and
    cached; beyond the cap a Lanczos propagator with adaptive substeps is used
    (residual target ``krylov_tol``).
    """

    def __init__(self, hamiltonian: PauliSum, method: str = "auto",
                 dense_cap: int = DEFAULT_DENSE_CAP, krylov_tol: float = 1e-10,
                 krylov_dim: int = 30):
        if not hamiltonian.is_hermitian():
            raise InvalidOperatorError("Hamiltonian must have real coefficients")
        self.hamiltonian = hamiltonian
        self.n_qubits = hamiltonian.n_qubits
        self.dense_cap = dense_cap
        self.krylov_tol = krylov_tol
        self.krylov_dim = krylov_dim
        if method == "auto":
            method = "eigendecomposition" if self.n_qubits <= dense_cap else "krylov"
        if method not in ("eigendecomposition", "krylov"):
            raise ValueError(f"unknown method {method!r}")
        if method == "eigendecomposition" and self.n_qubits > dense_cap:
            raise ResourceLimitError(
                f"{self.n_qubits} qubits exceeds dense cap {dense_cap}"
            )
        self.method = method

    @cached_property
    def _eig(self):
        h = self.hamiltonian.dense(cap=self.dense_cap)
        w, v = np.linalg.eigh(h)
        return w, v

    @cached_property
    def _compiled(self):
        return CompiledPauliSum(self.hamiltonian)

    def evolve(self, psi: StateVector, t: float) -> StateVector:
        if psi.n_qubits != self.n_qubits:
            raise DimensionMismatchError("state size does not match Hamiltonian")
        if t == 0.0:
            return psi.copy()
        if self.method == "eigendecomposition":
            w, v = self._eig
            out = v @ (np.exp(-1j * w * t) * (v.conj().T @ psi.amplitudes))
        else:
            out = _lanczos_expv(self._compiled.apply, psi.amplitudes, t,
                                self.krylov_tol, self.krylov_dim)
        return StateVector(out, check_norm=False).renormalized()

    def dense_unitary(self, t: float) -> np.ndarray:
        """Dense exp(-iHt); only available on the eigendecomposition path."""
        if self.method != "eigendecomposition":
            raise ResourceLimitError("dense unitary requires the dense path")
        w, v = self._eig
        return (v * np.exp(-1j * w * t)) @ v.conj().T


def _lanczos_expv(apply_h, v: np.ndarray, t: float, tol: float, m_max: int) -> np.ndarray:
    """exp(-i t H) v by Lanczos with adaptive time substepping."""
    remaining = float(t)
    dt = float(t)
    cur = v
    sign = 1.0 if t >= 0 else -1.0
    remaining = abs(remaining)
    dt = abs(dt)
    while remaining > 0:
        step = min(dt, remaining)
        out, err, happy = _lanczos_single(apply_h, cur, sign * step, tol, m_max)
        if not happy:
            dt = step / 2
            if dt < 1e-12:
                raise ContractViolationError("Lanczos substep underflow")
            continue
        cur = out
        remaining -= step
    return cur


def _lanczos_single(apply_h, v, t, tol, m_max):
    norm_v = np.linalg.norm(v)
    basis = [v / norm_v]
    alphas, betas = [], []
    for j in range(m_max):
        w = apply_h(basis[j])
        alpha = float(np.real(np.vdot(basis[j], w)))
        w = w - alpha * basis[j]
        if j > 0:
            w = w - betas[-1] * basis[j - 1]
        # full reorthogonalization keeps the small problem well conditioned
        for b in basis:
            w = w - np.vdot(b, w) * b
        alphas.append(alpha)
        beta = float(np.linalg.norm(w))
        tmat = np.diag(alphas).astype(np.complex128)
        if len(betas) > 0:
            off = np.array(betas)
            tmat += np.diag(off, 1) + np.diag(off, -1)
        small = scipy.linalg.expm(-1j * t * tmat)
        col = small[:, 0]
        err = abs(beta * col[-1]) * abs(t)
        if beta < 1e-14 or err < tol:
            out = norm_v * (np.stack(basis, axis=1) @ col)
            return out, err, True
        betas.append(beta)
        basis.append(w / beta)
    return v, np.inf, False


# ---------------------------------------------------------------------------
# Sampling and I/O
# ---------------------------------------------------------------------------

def sample_bits(psi: StateVector, rng) -> np.ndarray:
    """Draw one computational-basis outcome; returns bits indexed by qubit."""
    rng = np.random.default_rng(rng)
    probs = np.abs(psi.amplitudes) ** 2
    probs = probs / probs.sum()
    index = int(rng.choice(probs.size, p=probs))
    return np.array([(index >> q) & 1 for q in range(psi.n_qubits)], dtype=np.uint8)


def export_state(psi: StateVector, path, seed_provenance: str = "") -> None:
    """Write raw little-endian complex64 amplitudes plus a JSON sidecar."""
    path = str(path)
    psi.amplitudes.astype("<c8").tofile(path)
    sidecar = {
        "n_qubits": psi.n_qubits,
        "norm": psi.norm(),
        "seed_provenance": seed_provenance,
    }
    with open(path + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=1)


def import_state(path) -> StateVector:
    """Read a state written by :func:`export_state` (renormalizes the
    float32 quantization)."""
    path = str(path)
    with open(path + ".json") as fh:
        sidecar = json.load(fh)
    raw = np.fromfile(path, dtype="<c8").astype(np.complex128)
    if raw.size != 1 << int(sidecar["n_qubits"]):
        raise DimensionMismatchError("sidecar qubit count disagrees with payload")
    return StateVector(raw / np.linalg.norm(raw))
