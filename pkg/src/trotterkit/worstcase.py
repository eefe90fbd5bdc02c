"""Product states that realize worst-case Trotter error.

Given the leading error operator written (up to a global phase) as a real
combination of Pauli strings, a maximal disjoint-support set of positive
strings is selected greedily and each of its qubits is placed in the +1
eigenstate of its letter; leftover qubits fall back to |0>.  The resulting
product state is stabilized by every selected string, which pushes
<E^dag E> to its extensive square-of-mass value.

Selection order is ascending weight, then leftmost support, then descending
coefficient: low-weight strings pack more stabilized mass per qubit, and
this ordering reproduces the known constructions for both spin-chain models
(all-|0> for the mixed-field Ising chain, alternating |+>/|+i> for the
uniform-field Heisenberg chain).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidOperatorError, NoSolutionError
from .formulas import fit_loglog_slope
from .pauli import HamiltonianSplit, PauliSum, PauliTerm
from .states import (
    EIGENSTATE_OF,
    StateVector,
    apply_pauli_sum,
    expectation,
    product_state,
)


def factor_global_phase(e: PauliSum) -> tuple[complex, PauliSum]:
    """Split off a global i^k phase so every coefficient is real.

    The residual sign freedom is fixed by making the canonically first term
    positive.  Raises if the coefficients are not uniformly real or uniformly
    imaginary (then no quarter-turn phase can realize them).
    """
    if len(e) == 0:
        return 1.0 + 0.0j, e
    coeffs = [t.coefficient for t in e]
    tol = 1e-12 * max(abs(c) for c in coeffs)
    if all(abs(c.imag) <= tol for c in coeffs):
        phase = 1.0 + 0.0j
    elif all(abs(c.real) <= tol for c in coeffs):
        phase = 1.0j
    else:
        raise InvalidOperatorError(
            "coefficients mix real and imaginary parts; no global phase factors them"
        )
    reduced = e * (1.0 / phase)
    first = next(iter(reduced))
    if first.coefficient.real < 0:
        phase *= -1.0
        reduced = reduced * -1.0
    return phase, reduced


def check_worst_case_conditions(e: PauliSum, tolerance: float = 0.1
                              ) -> tuple[float, float, bool]:
    """(positive mass, negative mass, heuristic flag).

    The worst-case construction wants the positive-coefficient mass to be
    extensive while the negative mass stays subleading; with only finite N
    available the asymptotic condition is operationalized as
    ``sum_b <= tolerance * sum_a``.
    """
    _, reduced = factor_global_phase(e)
    sum_a = sum(t.coefficient.real for t in reduced if t.coefficient.real > 0)
    sum_b = sum(-t.coefficient.real for t in reduced if t.coefficient.real < 0)
    return sum_a, sum_b, sum_b <= tolerance * sum_a


@dataclass(frozen=True)
class StabilizerProductState:
    """Product state defined by one +1 Pauli eigenstate per qubit."""

    single_qubit_stabilizers: tuple[str, ...]
    stab_terms: tuple[PauliTerm, ...]
    n_qubits: int

    def state(self) -> StateVector:
        return product_state([EIGENSTATE_OF[l] for l in self.single_qubit_stabilizers])

    def stabilized_mass(self) -> float:
        return float(sum(t.coefficient.real for t in self.stab_terms))

    def verify(self, tol: float = 1e-10) -> bool:
        psi = self.state()
        for t in self.stab_terms:
            p = PauliSum(self.n_qubits, [t.with_coefficient(1.0)])
            if abs(expectation(psi, p) - 1.0) > tol:
                return False
        return True


def build_worst_case_state(e: PauliSum) -> StabilizerProductState:
    """Greedy maximal disjoint-support selection over positive strings."""
    _, reduced = factor_global_phase(e)
    positive = [t for t in reduced if t.coefficient.real > 0 and t.weight > 0]
    if not positive:
        raise NoSolutionError("no positive-coefficient strings to stabilize")
    positive.sort(key=lambda t: (t.weight, t.support[0], -t.coefficient.real, t.letters))
    taken: set[int] = set()
    chosen: list[PauliTerm] = []
    letters = ["Z"] * e.n_qubits
    for t in positive:
        if any(q in taken for q in t.support):
            continue
        chosen.append(t)
        taken.update(t.support)
        for q, letter in t.letters:
            letters[q] = letter
    return StabilizerProductState(tuple(letters), tuple(chosen), e.n_qubits)


def leading_error_operator(split: HamiltonianSplit, order: int) -> PauliSum:
    """Scaled leading error of the step: sum of the commutator families."""
    from .bounds import leading_error_terms

    total = PauliSum.zero(split.n_qubits)
    for ets in leading_error_terms(split, order):
        total = total + ets.total() * ets.scale
    return total


def error_norm_on_state(e: PauliSum, psi: StateVector) -> float:
    """|| E |psi> ||."""
    return float(np.linalg.norm(apply_pauli_sum(e, psi.amplitudes)))


def verify_worst_case_scaling(split_builder: Callable[[int], HamiltonianSplit],
                              order: int, n_range: Sequence[int],
                              state_builder: Callable[[PauliSum, int], StateVector] | None = None,
                              dt: float | None = None,
                              ev_builder: Callable[[HamiltonianSplit], object] | None = None
                              ) -> float:
    """Fitted log-log slope of the leading error mass against system size.

    By default measures ||E |psi_N>|| with the greedy worst-case state; pass
    ``state_builder`` for other inputs (e.g. random states), or ``dt`` to
    measure the empirical step error instead of the operator application.
    """
    if len(n_range) < 2:
        raise ValueError("need at least two system sizes to fit a slope")
    values = []
    for n in n_range:
        split = split_builder(n)
        e = leading_error_operator(split, order)
        if state_builder is None:
            psi = build_worst_case_state(e).state()
        else:
            psi = state_builder(e, n)
        if dt is None:
            values.append(error_norm_on_state(e, psi))
        else:
            from .formulas import FormulaSpec, empirical_step_error
            from .states import ExactEvolver

            ev = ExactEvolver(split.hamiltonian())
            values.append(empirical_step_error(FormulaSpec(order, split), psi, dt, ev))
    return fit_loglog_slope(list(n_range), values)
