"""Measurement-assisted adaptive Trotter stepping.

The protocol inserts measurement checkpoints into a PF2 simulation: at each
checkpoint the current (Trotterized) state is measured with randomized Pauli
snapshots, the two leading-error second moments <E1^dag E1> and <E2^dag E2>
are estimated, and the step count for the next interval is solved from the
concrete PF2 bound with those measured values in place of the worst-case
norms.  Interval 0 has no measurement and is seeded with the worst-case
counting values, so a run with zero checkpoints reproduces the non-adaptive
baseline exactly.

Measured second moments enter the solver inflated by ``inflation_sigmas``
standard errors (shot noise must not talk the solver into too few steps);
an exact-expectation mode replaces the estimates with true expectations to
expose the measurement-free optimum.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .bounds import SplitBoundData
from .errors import NoSolutionError
from .formulas import FormulaSpec, min_steps_search, pf_trajectory
from .pauli import HamiltonianSplit
from .shadows import collect_shadows, estimate_trotter_error, exact_error_second_moment
from .states import StateVector


@dataclass
class AdaptivePlan:
    """Checkpoint schedule and error budget for one adaptive run."""

    total_time: float
    epsilon: float
    checkpoints: tuple[float, ...] = ()
    shots_per_checkpoint: int | None = None   # default 64 N^2 at run time
    exact_expectations: bool = False
    inflation_sigmas: float = 2.0
    verify_monotone: bool = False
    # once the measured moments stop improving (within 5% of the previous
    # checkpoint), skip further measurements and reuse the last values
    stop_when_saturated: bool = False
    per_interval_steps: list[int] | None = None
    per_interval_budgets: list[float] | None = None

    def __post_init__(self):
        t = self.total_time
        cps = tuple(float(c) for c in self.checkpoints)
        if any(not 0.0 < c < t for c in cps) or list(cps) != sorted(set(cps)):
            raise ValueError("checkpoints must be strictly increasing inside (0, t)")
        self.checkpoints = cps

    @classmethod
    def uniform(cls, total_time: float, epsilon: float, n_checkpoints: int,
                **kwargs) -> "AdaptivePlan":
        cps = tuple(total_time * i / (n_checkpoints + 1)
                    for i in range(1, n_checkpoints + 1))
        return cls(total_time, epsilon, cps, **kwargs)

    def boundaries(self) -> list[float]:
        return [0.0, *self.checkpoints, self.total_time]

    def interval_lengths(self) -> list[float]:
        b = self.boundaries()
        return [b[i + 1] - b[i] for i in range(len(b) - 1)]

    def budgets(self) -> list[float]:
        return [self.epsilon * d / self.total_time for d in self.interval_lengths()]


def resolve_interval_steps(measured_e1: float, measured_e2: float,
                           data: SplitBoundData, delta: float, budget: float,
                           r_hi: int = 1 << 27) -> int:
    """Least r with r * measured-PF2-bound(delta/r) <= budget."""
    if measured_e1 < 0 or measured_e2 < 0:
        raise ValueError("measured second moments must be nonnegative")

    def total_error(r: int) -> float:
        return r * data.pf2_from_measured(measured_e1, measured_e2, delta / r)

    # each term of the bound is a negative power of r, hence monotone
    return min_steps_search(total_error, budget, 1, r_hi, monotonicity_probe=False)


@dataclass
class CheckpointRecord:
    index: int
    time: float
    mode: str
    measured_e1: float
    measured_e2: float
    stderr_e1: float
    stderr_e2: float
    used_e1: float
    used_e2: float
    resolved_r: int
    dt: float
    budget: float
    monotone_violation: bool = False

    def to_json(self) -> str:
        return json.dumps(self.__dict__)


@dataclass
class AdaptiveRunResult:
    final_state: StateVector
    plan: AdaptivePlan
    audit_log: list[CheckpointRecord]
    total_steps: int

    def write_audit(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self.audit_log:
                fh.write(rec.to_json() + "\n")

    def plan_json(self) -> str:
        return json.dumps({
            "total_time": self.plan.total_time,
            "epsilon": self.plan.epsilon,
            "checkpoints": list(self.plan.checkpoints),
            "per_interval_steps": self.plan.per_interval_steps,
            "per_interval_budgets": self.plan.per_interval_budgets,
            "total_steps": self.total_steps,
        }, indent=1)


def run_adaptive(split: HamiltonianSplit, psi0: StateVector, plan: AdaptivePlan,
                 rng_seed: int, data: SplitBoundData | None = None
                 ) -> AdaptiveRunResult:
    """Execute the checkpointed protocol; deterministic under the seed."""
    data = data or SplitBoundData(split)
    ets1, ets2 = data.ets_pf2()
    spec = FormulaSpec(2, split)
    n = split.n_qubits
    shots = plan.shots_per_checkpoint or 64 * n * n

    boundaries = plan.boundaries()
    lengths = plan.interval_lengths()
    budgets = plan.budgets()

    # worst-case seeding for the unmeasured first interval
    m1 = data.one_norm_bba ** 2
    m2 = data.one_norm_aab ** 2

    audit: list[CheckpointRecord] = []
    steps: list[int] = []
    psi = psi0
    saturated = False
    prev_moments = None
    for i, (delta, budget) in enumerate(zip(lengths, budgets)):
        mode = "worst_case_seed"
        e1_est = e2_est = None
        if i > 0 and saturated:
            mode = "saturated_reuse"
        elif i > 0:
            t_i = boundaries[i]
            if plan.exact_expectations:
                mode = "exact_expectation"
                m1 = exact_error_second_moment(ets1, psi)
                m2 = exact_error_second_moment(ets2, psi)
                e1 = e2 = (m1, m2, 0.0, 0.0)
            else:
                mode = "shadow_estimate"
                cp_seed = int(np.random.default_rng([rng_seed, i]).integers(2 ** 62))
                shadows = collect_shadows(psi, shots, cp_seed,
                                          source_descriptor=f"checkpoint {i} t={t_i:g}")
                e1_est = estimate_trotter_error(shadows, ets1, 1.0)
                e2_est = estimate_trotter_error(shadows, ets2, 1.0)
                m1 = e1_est.second_moment_inflated(plan.inflation_sigmas)
                m2 = e2_est.second_moment_inflated(plan.inflation_sigmas)
            if plan.stop_when_saturated and prev_moments is not None:
                p1, p2 = prev_moments
                if m1 >= 0.95 * p1 and m2 >= 0.95 * p2:
                    saturated = True
            prev_moments = (m1, m2)
        try:
            r = resolve_interval_steps(m1, m2, data, delta, budget)
        except NoSolutionError as exc:
            raise NoSolutionError(
                f"interval {i} unsolvable with measured values "
                f"({m1:.4g}, {m2:.4g}): {exc}",
                boundary_value=exc.boundary_value,
            ) from exc
        steps.append(r)
        audit.append(CheckpointRecord(
            index=i, time=boundaries[i], mode=mode,
            measured_e1=e1_est.raw_second_moment if e1_est else m1,
            measured_e2=e2_est.raw_second_moment if e2_est else m2,
            stderr_e1=e1_est.stderr if e1_est else 0.0,
            stderr_e2=e2_est.stderr if e2_est else 0.0,
            used_e1=m1, used_e2=m2, resolved_r=r, dt=delta / r, budget=budget,
        ))
        if plan.verify_monotone and i > 0:
            half = pf_trajectory(spec, psi, delta / r, r // 2 or 1)
            v1 = exact_error_second_moment(ets1, half)
            v2 = exact_error_second_moment(ets2, half)
            audit[-1].monotone_violation = bool(v1 > m1 or v2 > m2)
            psi = pf_trajectory(spec, half, delta / r, r - (r // 2 or 1))
        else:
            psi = pf_trajectory(spec, psi, delta / r, r)

    resolved = replace(plan, per_interval_steps=steps, per_interval_budgets=budgets)
    return AdaptiveRunResult(psi, resolved, audit, sum(steps))


# ---------------------------------------------------------------------------
# Gate-cost accounting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GateCostModel:
    """Asymptotic gate-count model for cost comparisons.

    ``g1`` prices a simulation segment under worst-case analysis, ``g2``
    under average-case (post-measurement) analysis; both take (duration,
    error budget).  ``m`` counts state copies burned per checkpoint, ``m_o``
    copies for the final measurement.
    """

    g1: Callable[[float, float], float]
    g2: Callable[[float, float], float]
    m: float
    m_o: float

    @classmethod
    def lattice_default(cls, n: int, kappa1: float = 1.0, kappa2: float = 1.0,
                        m: float | None = None, m_o: float | None = None
                        ) -> "GateCostModel":
        """Worst case N^2 t^2 / eps, average case N^1.5 t^2 / eps, N^2 shots."""
        return cls(
            g1=lambda t, eps: kappa1 * n**2 * t**2 / eps,
            g2=lambda t, eps: kappa2 * n**1.5 * t**2 / eps,
            m=m if m is not None else n**2,
            m_o=m_o if m_o is not None else n**2,
        )


def gate_cost(model: GateCostModel, t_c: float, t: float, epsilon: float
              ) -> tuple[float, float]:
    """(adaptive cost, baseline cost) for a single checkpoint at t_c.

    Adaptive: prepare to t_c for M measurement copies, then re-prepare and
    finish under average-case pricing for the M_o output copies.  Baseline:
    the whole duration under worst-case pricing.
    """
    if not 0.0 < t_c < t:
        raise ValueError("checkpoint must lie strictly inside (0, t)")
    eps_c = epsilon * t_c / t
    eps_r = epsilon * (t - t_c) / t
    prep = model.g1(t_c, eps_c)
    adaptive = prep * model.m + (prep + model.g2(t - t_c, eps_r)) * model.m_o
    baseline = model.g1(t, epsilon) * model.m_o
    return adaptive, baseline


def adaptive_gate_cost(model: GateCostModel, checkpoints: Sequence[float],
                       t: float, epsilon: float) -> float:
    """Multi-checkpoint total with re-preparation fully accounted.

    Interval 0 is priced worst-case (nothing measured yet), later intervals
    average-case.  Each checkpoint c pays for re-preparing the state across
    intervals 0..c-1 times ``m`` copies; the final preparation spans all
    intervals times ``m_o``.
    """
    boundaries = [0.0, *sorted(checkpoints), t]
    lengths = [boundaries[i + 1] - boundaries[i] for i in range(len(boundaries) - 1)]
    budgets = [epsilon * d / t for d in lengths]
    interval_cost = [
        (model.g1 if i == 0 else model.g2)(d, max(b, 1e-300))
        for i, (d, b) in enumerate(zip(lengths, budgets))
    ]
    total = 0.0
    for c in range(1, len(lengths)):       # re-preparation at checkpoint c
        total += sum(interval_cost[:c]) * model.m
    total += sum(interval_cost) * model.m_o   # final preparation
    return total
