"""Randomized Pauli measurements emulated on the statevector.

Snapshots follow the standard single-qubit Clifford shadow scheme: each qubit
is measured in a uniformly random X/Y/Z basis and the record keeps (basis,
outcome) per qubit.  Estimators implemented on top: linear Pauli observables
(inverse-channel weight 3 per matched qubit), subsystem purities via the
two-copy swap U-statistic with an optional median-of-means, and the refined
Trotter-error functional <E^dag E> whose square root prices the next
simulation segment.

Snapshot i draws its bases and its outcome from a dedicated stream seeded by
(seed, i), so shadow sets are reproducible bit for bit and collection could
be distributed without changing results.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, InvalidOperatorError, ResourceLimitError
from .pauli import PauliSum, PauliTerm
from .states import StateVector

BASIS_LETTERS = ("X", "Y", "Z")
_LETTER_CODE = {"X": 0, "Y": 1, "Z": 2}

_SQ2 = 1.0 / math.sqrt(2.0)
# rotation taking the measured basis to the computational basis
_ROTATIONS = (
    np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128),          # X: H
    np.array([[_SQ2, -1j * _SQ2], [_SQ2, 1j * _SQ2]], dtype=np.complex128),  # Y: H Sdg
    np.eye(2, dtype=np.complex128),                                          # Z
)

_MAGIC = b"TKSH"


@dataclass(frozen=True)
class ShadowSnapshot:
    """One randomized-measurement record."""

    bases: tuple[str, ...]
    outcomes: tuple[int, ...]
    seed_tag: tuple[int, int]


class ShadowSet:
    """M snapshots stored columnar: uint8 basis codes and outcome bits."""

    def __init__(self, bases: np.ndarray, outcomes: np.ndarray, seed: int,
                 source_descriptor: str = ""):
        if bases.shape != outcomes.shape or bases.ndim != 2:
            raise DimensionMismatchError("bases/outcomes must share an (M, N) shape")
        if bases.shape[0] < 1:
            raise ValueError("a shadow set needs at least one snapshot")
        self.bases = np.ascontiguousarray(bases, dtype=np.uint8)
        self.outcomes = np.ascontiguousarray(outcomes, dtype=np.uint8)
        self.seed = int(seed)
        self.source_descriptor = source_descriptor

    @property
    def m(self) -> int:
        return self.bases.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.bases.shape[1]

    def snapshot(self, i: int) -> ShadowSnapshot:
        return ShadowSnapshot(
            tuple(BASIS_LETTERS[b] for b in self.bases[i]),
            tuple(int(b) for b in self.outcomes[i]),
            (self.seed, i),
        )


def _rotate_to_basis(amps: np.ndarray, basis_codes: np.ndarray, n: int) -> np.ndarray:
    out = amps
    for q in range(n):
        code = basis_codes[q]
        if code == 2:
            continue
        u = _ROTATIONS[code]
        tensor = out.reshape([2] * n)
        axis = n - 1 - q
        tensor = np.moveaxis(np.tensordot(u, tensor, axes=(1, axis)), 0, axis)
        out = tensor.reshape(-1)
    return out


def collect_shadows(psi: StateVector, m: int, rng_seed: int,
                    source_descriptor: str = "") -> ShadowSet:
    """M independent random-Pauli-basis snapshots of a state."""
    if m < 1:
        raise ValueError("need at least one snapshot")
    n = psi.n_qubits
    bases = np.empty((m, n), dtype=np.uint8)
    uniforms = np.empty(m)
    for i in range(m):
        stream = np.random.default_rng([rng_seed, i])
        bases[i] = stream.integers(0, 3, size=n, dtype=np.uint8)
        uniforms[i] = stream.random()

    outcomes = np.empty((m, n), dtype=np.uint8)
    # snapshots sharing a basis string share the rotated distribution
    order = np.lexsort(bases.T[::-1])
    i0 = 0
    while i0 < m:
        i1 = i0
        row = bases[order[i0]]
        while i1 < m and np.array_equal(bases[order[i1]], row):
            i1 += 1
        group = order[i0:i1]
        rotated = _rotate_to_basis(psi.amplitudes, row, n)
        cdf = np.cumsum(np.abs(rotated) ** 2)
        cdf /= cdf[-1]
        idx = np.searchsorted(cdf, uniforms[group], side="right")
        for q in range(n):
            outcomes[group, q] = (idx >> q) & 1
        i0 = i1
    return ShadowSet(bases, outcomes, rng_seed, source_descriptor)


# ---------------------------------------------------------------------------
# Linear observables
# ---------------------------------------------------------------------------

def _per_snapshot_values(shadows: ShadowSet, term: PauliTerm) -> np.ndarray:
    """Single-snapshot estimates of one Hermitian weighted string."""
    coeff = term.coefficient
    if abs(coeff.imag) > 1e-12 * max(abs(coeff), 1.0):
        raise InvalidOperatorError("shadow estimation needs Hermitian terms")
    if term.weight == 0:
        return np.full(shadows.m, coeff.real)
    sites = np.array(term.support)
    codes = np.array([_LETTER_CODE[l] for _, l in term.letters], dtype=np.uint8)
    match = (shadows.bases[:, sites] == codes).all(axis=1)
    signs = 1.0 - 2.0 * shadows.outcomes[:, sites].astype(np.float64)
    vals = np.where(match, signs.prod(axis=1), 0.0)
    return coeff.real * (3.0 ** term.weight) * vals


def estimate_pauli(shadows: ShadowSet, p: PauliTerm) -> float:
    """Unbiased estimate of <c P> from the shadow set."""
    return float(_per_snapshot_values(shadows, p).mean())


def estimate_sum(shadows: ShadowSet, s: PauliSum) -> tuple[float, float]:
    """(estimate, standard error) for a Hermitian PauliSum observable."""
    totals = np.zeros(shadows.m)
    for t in s:
        totals += _per_snapshot_values(shadows, t)
    est = float(totals.mean())
    stderr = float(totals.std(ddof=1) / math.sqrt(shadows.m)) if shadows.m > 1 else 0.0
    return est, stderr


# ---------------------------------------------------------------------------
# Purity
# ---------------------------------------------------------------------------

def _pair_kernel_table() -> np.ndarray:
    """K[a, a', b, c] = tr[(3 u^dag|b><b|u - I)(3 v^dag|c><c|v - I)]."""
    table = np.empty((3, 3, 2, 2))
    for a in range(3):
        for ap in range(3):
            cross = _ROTATIONS[a] @ _ROTATIONS[ap].conj().T
            for b in range(2):
                for c in range(2):
                    table[a, ap, b, c] = 9.0 * abs(cross[b, c]) ** 2 - 4.0
    return table


_KERNEL = _pair_kernel_table()


def estimate_purity(shadows: ShadowSet, support: Sequence[int],
                    batches: int | None = None) -> float:
    """U-statistic estimate of tr(rho_S^2) over ordered snapshot pairs.

    ``batches`` switches to median-of-means over that many contiguous
    batches (robust variant; the plain mean is the default).
    """
    support = tuple(sorted(set(int(q) for q in support)))
    if len(support) > 4:
        raise ResourceLimitError("purity estimation capped at 4-qubit supports")
    if shadows.m < 2:
        raise ValueError("purity estimation needs at least two snapshots")
    if batches is not None:
        if batches < 1 or batches > shadows.m // 2:
            raise ValueError("batch count must leave two snapshots per batch")
        edges = np.linspace(0, shadows.m, batches + 1, dtype=int)
        vals = [
            _purity_mean(shadows.bases[a:b], shadows.outcomes[a:b], support)
            for a, b in zip(edges[:-1], edges[1:])
        ]
        return float(np.median(vals))
    return _purity_mean(shadows.bases, shadows.outcomes, support)


def _purity_mean(bases: np.ndarray, outcomes: np.ndarray, support) -> float:
    m = bases.shape[0]
    k = len(support)
    # code each snapshot's restriction to the support in base 6
    codes = np.zeros(m, dtype=np.int64)
    for q in support:
        codes = codes * 6 + (bases[:, q] * 2 + outcomes[:, q])
    n_codes = 6 ** k
    counts = np.bincount(codes, minlength=n_codes).astype(np.float64)
    live = np.nonzero(counts)[0]
    # pair kernel factorizes over the support qubits
    table = np.ones((live.size, live.size))
    ci = live.copy()
    cj = live.copy()
    for _ in range(k):
        ai, bi = divmod(ci % 6, 2)
        aj, bj = divmod(cj % 6, 2)
        table *= _KERNEL[ai[:, None], aj[None, :], bi[:, None], bj[None, :]]
        ci //= 6
        cj //= 6
    nc = counts[live]
    total = nc @ table @ nc - (np.diag(table) * nc).sum()
    return float(total / (m * (m - 1)))


# ---------------------------------------------------------------------------
# Refined Trotter-error functional
# ---------------------------------------------------------------------------

def refined_error_observable(ets) -> tuple[PauliSum, float]:
    """Expand sum_{j,j'} E_j^dag E_j' into (traceless observable, offset).

    The identity component is an exact constant that needs no measurement;
    the rest is a Hermitian PauliSum of local strings.
    """
    e = ets.total()
    obs = e.adjoint() @ e
    offset = obs.identity_coefficient
    if abs(offset.imag) > 1e-10 * max(abs(offset), 1.0):
        raise InvalidOperatorError("E^dag E must have a real identity component")
    traceless = obs + PauliSum.identity(obs.n_qubits, -offset)
    if not traceless.is_hermitian(tol=1e-9):
        raise InvalidOperatorError("E^dag E expansion produced complex coefficients")
    return traceless, float(offset.real)


@dataclass(frozen=True)
class TrotterErrorEstimate:
    """Shadow estimate of the per-step leading error dt^(p+1) ||E |psi>||."""

    value: float
    second_moment: float        # estimate of <E^dag E>, clamped at 0
    raw_second_moment: float    # unclamped estimate
    stderr: float               # standard error of the second moment

    def second_moment_inflated(self, sigmas: float = 2.0) -> float:
        """Conservative upper value for step solving: estimate + k sigma."""
        return max(self.raw_second_moment + sigmas * self.stderr, 0.0)


def estimate_trotter_error(shadows: ShadowSet, ets, dt: float) -> TrotterErrorEstimate:
    """Estimate dt^(p+1) sqrt(<E^dag E>) from shadow data.

    Negative statistical dips of the second moment are clamped to zero before
    the square root; the unclamped value and its standard error ride along
    for uncertainty propagation.
    """
    obs, offset = refined_error_observable(ets)
    est, stderr = estimate_sum(shadows, obs)
    raw = est + offset
    clamped = max(raw, 0.0)
    return TrotterErrorEstimate(
        value=dt ** (ets.order + 1) * math.sqrt(clamped),
        second_moment=clamped,
        raw_second_moment=raw,
        stderr=stderr,
    )


def exact_error_second_moment(ets, psi: StateVector) -> float:
    """Exact <psi| E^dag E |psi> (the M -> infinity reference)."""
    from .states import apply_pauli_sum

    e_psi = apply_pauli_sum(ets.total(), psi.amplitudes)
    return float(np.vdot(e_psi, e_psi).real)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def save_shadows(shadows: ShadowSet, path) -> None:
    """Compact binary: header, then 3 bits per qubit per snapshot."""
    header = _MAGIC + struct.pack(
        "<BHIq", 1, shadows.n_qubits, shadows.m, shadows.seed
    )
    bits = np.empty((shadows.m, shadows.n_qubits, 3), dtype=np.uint8)
    bits[:, :, 0] = (shadows.bases >> 1) & 1
    bits[:, :, 1] = shadows.bases & 1
    bits[:, :, 2] = shadows.outcomes
    payload = np.packbits(bits.reshape(-1))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def load_shadows(path) -> ShadowSet:
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != _MAGIC:
        raise ValueError("not a shadow-set file")
    version, n, m, seed = struct.unpack("<BHIq", blob[4:4 + 15])
    if version != 1:
        raise ValueError(f"unsupported shadow-set version {version}")
    bits = np.unpackbits(np.frombuffer(blob[19:], dtype=np.uint8),
                         count=m * n * 3).reshape(m, n, 3)
    bases = (bits[:, :, 0] << 1) | bits[:, :, 1]
    return ShadowSet(bases.astype(np.uint8), bits[:, :, 2].astype(np.uint8), seed)
