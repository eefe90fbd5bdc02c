"""Tests for the error-bound family."""

import math

import numpy as np
import pytest

from trotterkit.bounds import (
    BoundReport,
    SplitBoundData,
    average_case_bound,
    converged_segmented_steps,
    distance_based_bound,
    entanglement_based_bound,
    leading_error_terms,
    light_cone_bound,
    mps_cost_model,
    pf1_concrete_bound,
    pf2_concrete_bound,
    purity_based_bound,
    qimf_counting_norms,
    refined_pauli_bound,
    segmented_bound_steps,
    worst_case_bound,
)
from trotterkit.errors import ModelError
from trotterkit.formulas import FormulaSpec, empirical_step_error
from trotterkit.pauli import (
    HamiltonianSplit,
    PauliSum,
    PauliTerm,
    build_qimf,
    commutator,
)
from trotterkit.states import (
    ExactEvolver,
    apply_pauli_sum,
    graph_state,
    random_state,
    zero_state,
)

TYPICAL = dict(hx=0.8090, hy=0.9045, j=1.0)

RING6 = [(i, (i + 1) % 6) for i in range(6)]


def commuting_split(n=4):
    # A and B share the X basis, so every commutator vanishes
    a = PauliSum(n, [PauliTerm(0.7, ((q, "X"),), n) for q in range(n)])
    b = PauliSum(n, [PauliTerm(0.4, ((q, "X"), (q + 1, "X")), n) for q in range(n - 1)])
    return HamiltonianSplit((a, b))


class TestLeadingErrorTerms:
    def test_qimf_pf1_groups_match_published_terms(self):
        n, hx, hy, j = 6, 0.8090, 0.9045, 1.0
        (ets,) = leading_error_terms(build_qimf(n, hx, hy, j), 1)
        assert len(ets) == n
        for q, group in enumerate(ets.groups):
            assert group.coefficient_of({q: "Z"}) == pytest.approx(2j * hx * hy)
            if q < n - 1:
                assert group.coefficient_of({q: "Z", q + 1: "X"}) == pytest.approx(2j * j * hy)
                assert group.coefficient_of({q: "X", q + 1: "Z"}) == pytest.approx(2j * j * hy)
        assert ets.scale == 0.5

    def test_commuting_split_is_empty(self):
        (ets,) = leading_error_terms(commuting_split(), 1)
        assert len(ets) == 0

    def test_pf2_sets_match_symbolic_commutators(self):
        split = build_qimf(5, **TYPICAL)
        a, b = split.parts
        ets1, ets2 = leading_error_terms(split, 2)
        assert ets1.total().allclose(commutator(b, commutator(b, a)))
        assert ets2.total().allclose(commutator(a, commutator(a, b)))
        assert (ets1.scale, ets2.scale) == (1 / 12, 1 / 24)

    def test_requires_two_parts(self):
        split = build_qimf(4, **TYPICAL)
        solo = HamiltonianSplit((split.parts[0],))
        with pytest.raises(ModelError):
            leading_error_terms(solo, 1)

    def test_pair_norm_symmetric(self):
        (ets,) = leading_error_terms(build_qimf(5, **TYPICAL), 1)
        for j, jp in [(0, 1), (1, 3), (2, 4)]:
            assert ets.pair_norm(j, jp) == pytest.approx(ets.pair_norm(jp, j))


class TestTheoremStyleBounds:
    def test_uniform_state_collapses_to_frobenius_part(self):
        # field-only chain: error terms are single-site, and a ring cluster
        # state has every 2-qubit marginal maximally mixed
        split = build_qimf(6, hx=0.809, hy=0.9045, j=0.0)
        (ets,) = leading_error_terms(split, 1)
        psi = graph_state(6, RING6)
        rep = distance_based_bound(ets, psi, 0.01)
        assert rep.breakdown["distance_term"] == pytest.approx(0.0, abs=1e-12)
        expect = 0.5 * 0.01**2 * ets.frobenius_total()
        assert rep.value == pytest.approx(expect)

    def test_product_state_distance_dominates(self):
        (ets,) = leading_error_terms(build_qimf(8, **TYPICAL), 1)
        rep = distance_based_bound(ets, zero_state(8), 0.01)
        assert rep.breakdown["distance_term"] > rep.breakdown["frobenius_term"]

    def test_entanglement_dominates_distance(self, rng):
        (ets,) = leading_error_terms(build_qimf(6, **TYPICAL), 1)
        for seed in range(5):
            psi = random_state(6, seed)
            d = distance_based_bound(ets, psi, 0.01).value
            e = entanglement_based_bound(ets, psi, 0.01).value
            assert d <= e + 1e-12

    def test_average_below_entanglement_family(self, rng):
        split = build_qimf(6, **TYPICAL)
        data = SplitBoundData(split)
        (ets,) = leading_error_terms(split, 1)
        for seed in range(3):
            psi = random_state(6, seed)
            avg = average_case_bound(split, 1, 0.01, data)
            assert avg <= distance_based_bound(ets, psi, 0.01).value + 1e-12

    def test_purity_based_report(self, rng):
        (ets,) = leading_error_terms(build_qimf(6, **TYPICAL), 1)
        psi = random_state(6, 0)
        rep = purity_based_bound(ets, psi, 0.01)
        assert rep.value > 0
        assert "renyi2_variant_value" in rep.breakdown
        # the purity route loosens the distance route (tr|M| <= d ||M||_F)
        assert rep.value >= distance_based_bound(ets, psi, 0.01).value - 1e-12

    def test_refined_pauli_matches_direct_norm(self, rng):
        (ets,) = leading_error_terms(build_qimf(5, **TYPICAL), 1)
        psi = random_state(5, 1)
        rep = refined_pauli_bound(ets, psi, 0.01)
        e_psi = apply_pauli_sum(ets.total(), psi.amplitudes)
        assert rep.value == pytest.approx(0.5 * 0.01**2 * np.linalg.norm(e_psi))


class TestConcreteBounds:
    def test_commuting_split_gives_zero(self):
        split = commuting_split()
        psi = zero_state(4)
        assert pf1_concrete_bound(split, psi, 0.01).value == pytest.approx(0.0)
        assert pf2_concrete_bound(split, psi, 0.01).value == pytest.approx(0.0)

    def test_pf1_bound_dominates_empirical(self):
        n, dt = 8, 1e-3
        split = build_qimf(n, **TYPICAL)
        ev = ExactEvolver(split.hamiltonian())
        spec = FormulaSpec(1, split)
        psi = zero_state(n)
        bound = pf1_concrete_bound(split, psi, dt).value
        emp = empirical_step_error(spec, psi, dt, ev)
        assert bound >= emp

    def test_pf2_bound_dominates_empirical_random(self):
        n = 6
        split = build_qimf(n, **TYPICAL)
        data = SplitBoundData(split)
        ev = ExactEvolver(split.hamiltonian())
        spec = FormulaSpec(2, split)
        for seed in range(5):
            psi = random_state(n, seed)
            for dt in (0.01, 0.004):
                assert pf2_concrete_bound(split, psi, dt, data).value >= \
                    empirical_step_error(spec, psi, dt, ev)

    def test_haar_state_ratio_band(self):
        # measured at N=10: Delta_E ~ 485 vs F^2 ~ 80, bound ~ 2.7x the pure
        # Frobenius part; entangled states sit well below the product state
        n, dt = 10, 1e-3
        split = build_qimf(n, **TYPICAL)
        data = SplitBoundData(split)
        haar = pf1_concrete_bound(split, random_state(n, 3), dt, data).value
        prod = pf1_concrete_bound(split, zero_state(n), dt, data).value
        froeb_part = dt**2 / 2 * data.frob_ab
        assert 1.0 <= haar / froeb_part <= 3.5
        assert haar < prod

    def test_pf2_breakdown_carries_both_delta_placements(self):
        split = build_qimf(5, **TYPICAL)
        rep = pf2_concrete_bound(split, zero_state(5), 1e-3)
        assert "value_alt_delta_placement" in rep.breakdown
        # the dt^6-inside placement is the smaller (derivation) value
        assert rep.value <= rep.breakdown["value_alt_delta_placement"]


class TestBaselines:
    def test_pf1_counting_value(self):
        split = build_qimf(12, **TYPICAL)
        val = worst_case_bound(split, 1, 1e-3)
        assert val == pytest.approx(1e-6 / 2 * 57.3598, rel=1e-4)

    def test_commuting_split_zero(self):
        split = commuting_split()
        assert worst_case_bound(split, 2, 0.1) == 0.0
        assert average_case_bound(split, 2, 0.1) == 0.0

    def test_average_below_worst(self):
        for n in (4, 8, 12):
            split = build_qimf(n, **TYPICAL)
            data = SplitBoundData(split)
            for order in (1, 2):
                assert average_case_bound(split, order, 0.01, data) <= \
                    worst_case_bound(split, order, 0.01, data)

    def test_sm_counting_surface(self):
        vals = qimf_counting_norms(12, **{"hx": 0.8090, "hy": 0.9045, "j": 1.0})
        assert vals["one_norm_ab"] == pytest.approx(57.3598, abs=1e-3)
        # printed line and exact coefficient sum disagree; both available
        assert vals["frobenius_sq_ab_printed"] != pytest.approx(
            vals["frobenius_sq_ab_exact"], rel=1e-3)
        split = build_qimf(12, **TYPICAL)
        e = commutator(split.parts[0], split.parts[1])
        assert e.frobenius_norm() ** 2 == pytest.approx(
            vals["frobenius_sq_ab_exact"], rel=1e-10)


class TestLightCone:
    def test_large_depth_equals_entanglement_bound(self, rng):
        (ets,) = leading_error_terms(build_qimf(6, **TYPICAL), 1)
        psi = random_state(6, 2)
        lc = light_cone_bound(ets, psi, depth=6, dt=0.01)
        ent = entanglement_based_bound(ets, psi, 0.01)
        assert lc.value == pytest.approx(ent.value, rel=1e-12)

    def test_product_state_depth_zero_matches_entanglement(self):
        (ets,) = leading_error_terms(build_qimf(6, **TYPICAL), 1)
        psi = zero_state(6)
        lc = light_cone_bound(ets, psi, depth=0, dt=0.01)
        ent = entanglement_based_bound(ets, psi, 0.01)
        assert lc.value == pytest.approx(ent.value, rel=1e-9)

    def test_light_cone_never_exceeds_entanglement(self):
        # shallow-entangled input: evolve a product state briefly
        n = 10
        split = build_qimf(n, **TYPICAL)
        ev = ExactEvolver(split.hamiltonian())
        psi = ev.evolve(zero_state(n), 0.4)
        (ets,) = leading_error_terms(split, 1)
        for depth in (0, 1, 2):
            lc = light_cone_bound(ets, psi, depth=depth, dt=0.01)
            ent = entanglement_based_bound(ets, psi, 0.01)
            assert lc.value <= ent.value + 1e-10


class TestSegmentedBound:
    def test_single_slice_matches_direct_search(self):
        n, t, eps = 5, 2.0, 1e-4
        split = build_qimf(n, **TYPICAL)
        ev = ExactEvolver(split.hamiltonian())
        r_star, per_slice = segmented_bound_steps(split, zero_state(n), t, eps, 1, ev)
        assert per_slice == [r_star]

    def test_more_slices_track_entanglement_growth(self):
        n, t, eps = 6, 6.0, 1e-4
        split = build_qimf(n, **TYPICAL)
        ev = ExactEvolver(split.hamiltonian())
        r1, _ = segmented_bound_steps(split, zero_state(n), t, eps, 1, ev)
        r8, _ = segmented_bound_steps(split, zero_state(n), t, eps, 8, ev)
        # refining slices lets late slices use entangled-state distances
        assert r8 < r1

    def test_convergence_loop(self):
        n, t, eps = 6, 6.0, 1e-4
        split = build_qimf(n, **TYPICAL)
        ev = ExactEvolver(split.hamiltonian())
        r_star, c_used, history = converged_segmented_steps(
            split, zero_state(n), t, eps, ev)
        assert c_used <= 64
        assert history[-1][1] == r_star
        c_vals = [c for c, _ in history]
        assert c_vals == sorted(c_vals)


class TestNormScalingExponents:
    def test_frobenius_grows_like_sqrt_n(self):
        sizes = range(4, 13)
        vals = [commutator(*build_qimf(n, **TYPICAL).parts).frobenius_norm()
                for n in sizes]
        slope = np.polyfit(np.log(list(sizes)), np.log(vals), 1)[0]
        assert slope == pytest.approx(0.5, abs=0.1)

    def test_one_norm_grows_like_n(self):
        # at N in {4..12} the boundary offset inflates the fit to ~1.12, so
        # the Theta(N) law is checked on the cheap symbolic route at sizes
        # where the bulk dominates
        sizes = [64, 128, 256, 512, 1024]
        vals = [commutator(*build_qimf(n, **TYPICAL).parts).one_norm()
                for n in sizes]
        slope = np.polyfit(np.log(sizes), np.log(vals), 1)[0]
        assert slope == pytest.approx(1.0, abs=0.05)
        small = [commutator(*build_qimf(n, **TYPICAL).parts).one_norm()
                 for n in range(4, 13)]
        small_slope = np.polyfit(np.log(np.arange(4, 13)), np.log(small), 1)[0]
        assert small_slope == pytest.approx(1.12, abs=0.02)  # boundary effect


class TestMpsCostModel:
    def test_trivial_bond(self):
        mem, ops = mps_cost_model(0, 10, 1)
        assert ops == 40
        assert mem == 10

    def test_formula_plug_in(self):
        mem, ops = mps_cost_model(8, 10, 2)
        assert ops == 4 * 16 * 4 * 10
        assert mem == pytest.approx(4 * 10)

    def test_exponential_trend(self):
        _, base = mps_cost_model(4, 10)
        _, doubled = mps_cost_model(8, 10)
        assert doubled / base == pytest.approx(2 ** ((8 - 4) / 2))


class TestBoundReport:
    def test_json_round_trip(self):
        rep = BoundReport("worst", 0.5, 1e-3, {"a": 0.2}, "zero_state", 1.0)
        back = BoundReport.from_json(rep.to_json())
        assert back.kind == "worst" and back.value == 0.5
        assert back.breakdown == {"a": 0.2}

    def test_kind_validated(self):
        with pytest.raises(ValueError):
            BoundReport("bogus", 0.1, 0.1)
