"""Product-formula steppers and empirical Trotter errors.

Builds flat stage plans for PF1, PF2 and the recursive even-order family,
applies them through exact stage exponentials, and measures the resulting
errors against exact evolution: per step on a state, accumulated over a
trajectory, or as operator norms of the dense difference.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import (
    ContractViolationError,
    NoSolutionError,
    ResourceLimitError,
)
from .pauli import HamiltonianSplit, PauliSum
from .states import ExactEvolver, GroupExponential, StateVector


def suzuki_coefficient(k: int) -> float:
    """Recursion coefficient p_k = 1 / (4 - 4^(1/(2k-1))) for order 2k."""
    if k < 2:
        raise ValueError("recursion coefficient defined for k >= 2")
    return 1.0 / (4.0 - 4.0 ** (1.0 / (2 * k - 1)))


def _pf1_plan(n_parts: int) -> list[tuple[int, float]]:
    # operator product runs left to right over increasing part index, so the
    # application order (rightmost factor first) is decreasing index
    return [(l, 1.0) for l in reversed(range(n_parts))]


def _pf2_plan(n_parts: int) -> list[tuple[int, float]]:
    # operator (fwd product of half steps)(reverse product of half steps);
    # in application order that reads forward then backward, giving the
    # palindrome A/2 B ... B A/2 for two parts
    fwd = [(l, 0.5) for l in range(n_parts)]
    return _merge_adjacent(fwd + list(reversed(fwd)))


def _pf2k_plan(k: int, n_parts: int) -> list[tuple[int, float]]:
    plan = _pf2_plan(n_parts)
    for kk in range(2, k + 1):
        p = suzuki_coefficient(kk)
        outer = [(l, c * p) for l, c in plan]
        middle = [(l, c * (1.0 - 4.0 * p)) for l, c in plan]
        plan = _merge_adjacent(outer + outer + middle + outer + outer)
    return plan


def _merge_adjacent(plan):
    merged: list[tuple[int, float]] = []
    for part, coeff in plan:
        if merged and merged[-1][0] == part:
            merged[-1] = (part, merged[-1][1] + coeff)
        else:
            merged.append((part, coeff))
    return [(p, c) for p, c in merged if c != 0.0]


@dataclass
class FormulaSpec:
    """A product formula of a given order bound to one Hamiltonian split.

    ``stage_plan`` lists ``(part index, duration coefficient)`` in application
    order; coefficients for each part sum to 1.
    """

    order: int
    split: HamiltonianSplit
    stage_plan: list[tuple[int, float]] = field(default=None)

    def __post_init__(self):
        L = self.split.n_parts
        if self.stage_plan is None:
            if self.order == 1:
                plan = _pf1_plan(L)
            elif self.order >= 2 and self.order % 2 == 0:
                plan = _pf2k_plan(self.order // 2, L)
            else:
                raise ValueError("order must be 1 or an even integer")
            self.stage_plan = plan
        self._group_exps = [
            GroupExponential(p, commuting=flag)
            for p, flag in zip(self.split.parts, self.split.within_part_commuting)
        ]

    @property
    def n_qubits(self) -> int:
        return self.split.n_qubits

    def stage_coefficient_sums(self) -> np.ndarray:
        sums = np.zeros(self.split.n_parts)
        for part, coeff in self.stage_plan:
            sums[part] += coeff
        return sums

    def apply(self, arr: np.ndarray, dt: float) -> np.ndarray:
        """Apply one step to an amplitude array (columns evolve together)."""
        out = arr
        for part, coeff in self.stage_plan:
            out = self._group_exps[part].apply(out, coeff * dt)
        return out

    def dense_step(self, dt: float) -> np.ndarray:
        """Dense unitary of a single step (register must be dense-sized)."""
        dim = 1 << self.n_qubits
        return self.apply(np.eye(dim, dtype=np.complex128), dt)


def pf_step(spec: FormulaSpec, psi: StateVector, dt: float) -> StateVector:
    """One product-formula step of duration dt."""
    return StateVector(spec.apply(psi.amplitudes, dt), check_norm=False)


def pf_trajectory(spec: FormulaSpec, psi: StateVector, dt: float, steps: int) -> StateVector:
    out = psi.amplitudes
    for _ in range(steps):
        out = spec.apply(out, dt)
    return StateVector(out, check_norm=False)


def empirical_step_error(spec: FormulaSpec, psi: StateVector, dt: float,
                         ev: ExactEvolver) -> float:
    """l2 distance between the exact and product-formula step on a state."""
    exact = ev.evolve(psi, dt)
    approx = pf_step(spec, psi, dt)
    return exact.distance(approx)


def empirical_total_error(spec: FormulaSpec, psi0: StateVector, t: float, r: int,
                          ev: ExactEvolver) -> float:
    """|| U0(t) psi0 - (PF(t/r))^r psi0 ||."""
    if r < 1:
        raise ValueError("need at least one step")
    exact = ev.evolve(psi0, t)
    approx = pf_trajectory(spec, psi0, t / r, r)
    return exact.distance(approx)


@dataclass
class TrajectoryRecord:
    """Per-step error log along a product-formula trajectory."""

    times: list[float]
    per_step_errors: list[float]
    norms: list[float]
    states: list[StateVector] | None = None

    def cumulative_bounds(self) -> list[float]:
        out, acc = [], 0.0
        for e in self.per_step_errors:
            acc += e
            out.append(acc)
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "step_error", "cumulative_error_bound", "norm"])
            for t, e, c, n in zip(self.times, self.per_step_errors,
                                  self.cumulative_bounds(), self.norms):
                w.writerow([f"{t:.10g}", f"{e:.12e}", f"{c:.12e}", f"{n:.12f}"])


def record_trajectory(spec: FormulaSpec, psi0: StateVector, dt: float, steps: int,
                      ev: ExactEvolver, keep_states: bool = False) -> TrajectoryRecord:
    """Run a PF trajectory and record the per-step error at every step."""
    rec = TrajectoryRecord([], [], [], [] if keep_states else None)
    psi = psi0
    for i in range(steps):
        rec.times.append((i + 1) * dt)
        rec.per_step_errors.append(empirical_step_error(spec, psi, dt, ev))
        psi = pf_step(spec, psi, dt)
        rec.norms.append(psi.norm())
        if keep_states:
            rec.states.append(psi)
    return rec


# ---------------------------------------------------------------------------
# Operator-norm errors
# ---------------------------------------------------------------------------

def operator_norm_error(spec: FormulaSpec, dt: float, ev: ExactEvolver,
                        mode: str = "spectral", dense_cap: int = 10,
                        big_dense: bool = False, frobenius_samples: int = 0,
                        rng=None) -> float:
    """Norm of U0(dt) - PF(dt) over the full register.

    ``spectral`` is the largest singular value of the dense difference;
    ``frobenius`` the normalized Frobenius norm sqrt(tr(D^dag D)/2^N).  Dense
    work above ``dense_cap`` qubits requires ``big_dense=True`` (the matrices
    run to hundreds of MB at 12 qubits); ``frobenius`` alternatively accepts
    ``frobenius_samples > 0`` for the stochastic trace estimator.
    """
    n = spec.n_qubits
    if mode == "frobenius" and frobenius_samples > 0:
        from .states import random_state

        rng = np.random.default_rng(rng)
        acc = 0.0
        for _ in range(frobenius_samples):
            psi = random_state(n, rng)
            acc += empirical_step_error(spec, psi, dt, ev) ** 2
        return math.sqrt(acc / frobenius_samples)
    if n > dense_cap and not big_dense:
        raise ResourceLimitError(
            f"{n} qubits exceeds dense norm cap {dense_cap}; pass big_dense=True"
        )
    diff = ev.dense_unitary(dt) - spec.dense_step(dt)
    if mode == "spectral":
        return _largest_singular_value(diff)
    if mode == "frobenius":
        return float(np.linalg.norm(diff) / math.sqrt(diff.shape[0]))
    raise ValueError(f"unknown mode {mode!r}")


def composed_difference_norms(spec: FormulaSpec, t: float, r: int, ev: ExactEvolver,
                              dense_cap: int = 10, big_dense: bool = False
                              ) -> tuple[float, float]:
    """(spectral, frobenius) norms of U0(t) - PF(t/r)^r via dense powering."""
    n = spec.n_qubits
    if n > dense_cap and not big_dense:
        raise ResourceLimitError(
            f"{n} qubits exceeds dense norm cap {dense_cap}; pass big_dense=True"
        )
    step = spec.dense_step(t / r)
    power = _matrix_power(step, r)
    diff = ev.dense_unitary(t) - power
    frob = float(np.linalg.norm(diff) / math.sqrt(diff.shape[0]))
    return _largest_singular_value(diff), frob


def _largest_singular_value(m: np.ndarray, rel_tol: float = 1e-9,
                            max_iter: int = 500) -> float:
    """Top singular value; power iteration on M^dag M above LAPACK sizes."""
    if m.shape[0] < 2048:
        return float(np.linalg.svd(m, compute_uv=False)[0])
    rng = np.random.default_rng(0)
    v = rng.normal(size=m.shape[1]) + 1j * rng.normal(size=m.shape[1])
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iter):
        w = m.conj().T @ (m @ v)
        new_sigma = math.sqrt(float(np.linalg.norm(w)))
        v = w / np.linalg.norm(w)
        if abs(new_sigma - sigma) <= rel_tol * max(new_sigma, 1e-300):
            return new_sigma
        sigma = new_sigma
    return sigma


def _matrix_power(m: np.ndarray, r: int) -> np.ndarray:
    result = None
    base = m
    while r:
        if r & 1:
            result = base if result is None else result @ base
        r >>= 1
        if r:
            base = base @ base
    return result


# ---------------------------------------------------------------------------
# Minimal step search
# ---------------------------------------------------------------------------

def min_steps_search(error_fn: Callable[[int], float], epsilon: float,
                     r_lo: int = 1, r_hi: int = 1 << 24,
                     monotonicity_probe: bool = True) -> int:
    """Least integer r in [r_lo, r_hi] with error_fn(r) <= epsilon.

    ``error_fn`` must be nonincreasing on the bracket; a three-point probe
    guards the assumption (the quoted minimal step counts in the experiments
    rely on it).  Raises ``NoSolutionError`` if even r_hi misses the target.
    """
    if r_lo > r_hi:
        raise ValueError("empty bracket")
    e_lo = error_fn(r_lo)
    if e_lo <= epsilon:
        return r_lo
    e_hi = error_fn(r_hi)
    if e_hi > epsilon:
        raise NoSolutionError(
            f"error {e_hi:.3e} at r_hi={r_hi} still above target {epsilon:.3e}",
            boundary_value=e_hi,
        )
    if monotonicity_probe:
        mid = (r_lo + r_hi) // 2
        e_mid = error_fn(mid)
        slack = 1e-9
        if not (e_lo >= e_mid - slack * max(1.0, abs(e_mid))
                and e_mid >= e_hi - slack * max(1.0, abs(e_hi))):
            raise ContractViolationError(
                "error_fn is not nonincreasing on the bracket "
                f"({e_lo:.3e}, {e_mid:.3e}, {e_hi:.3e})"
            )
    lo, hi = r_lo, r_hi  # invariant: error(lo) > eps >= error(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if error_fn(mid) <= epsilon:
            hi = mid
        else:
            lo = mid
    return hi


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log(y) against log(x)."""
    if len(xs) < 2:
        raise ValueError("need at least two points to fit a slope")
    lx, ly = np.log(np.asarray(xs, float)), np.log(np.asarray(ys, float))
    return float(np.polyfit(lx, ly, 1)[0])
