"""Tests for the symbolic Pauli layer: algebra, norms, model builders."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trotterkit.errors import (
    DimensionMismatchError,
    ModelError,
    ResourceLimitError,
)
from trotterkit.pauli import (
    PauliSum,
    PauliTerm,
    build_heisenberg,
    build_qimf,
    commutator,
    nested_commutator_norm_sum,
    part_commutes,
)

from conftest import pauli_sum_dense_oracle

TYPICAL = dict(hx=0.8090, hy=0.9045, j=1.0)


def single(n, q, letter, c=1.0):
    return PauliSum.from_label(n, c, {q: letter})


class TestAlgebraBasics:
    def test_merge_and_drop(self):
        terms = [PauliTerm(1.0, ((0, "X"),), 2), PauliTerm(-1.0, ((0, "X"),), 2)]
        assert len(PauliSum(2, terms)) == 0

    def test_site_bounds(self):
        with pytest.raises(DimensionMismatchError):
            PauliTerm(1.0, ((3, "X"),), 2)

    def test_self_commutator_empty(self):
        a = single(2, 0, "X")
        assert len(commutator(a, a)) == 0

    def test_xy_gives_2iz(self):
        c = commutator(single(1, 0, "X"), single(1, 0, "Y"))
        assert c.coefficient_of({0: "Z"}) == pytest.approx(2j)
        assert len(c) == 1

    def test_mismatched_registers(self):
        with pytest.raises(DimensionMismatchError):
            commutator(single(2, 0, "X"), single(3, 0, "X"))

    def test_antisymmetry(self):
        a = build_qimf(4, **TYPICAL).parts[0]
        b = build_qimf(4, **TYPICAL).parts[1]
        lhs = commutator(a, b)
        rhs = commutator(b, a) * -1.0
        assert lhs.allclose(rhs)

    def test_hermitian_inputs_give_imaginary_coefficients(self):
        split = build_qimf(5, **TYPICAL)
        for t in commutator(split.parts[0], split.parts[1]):
            assert abs(t.coefficient.real) < 1e-14

    def test_product_expansion(self):
        # (X0)(Y0) = iZ0 ; (X0 X1)(Y1) = i X0 Z1
        a = PauliSum(2, [PauliTerm(1.0, ((0, "X"), (1, "X")), 2)])
        b = single(2, 1, "Y")
        prod = a @ b
        assert prod.coefficient_of({0: "X", 1: "Z"}) == pytest.approx(1j)


@st.composite
def random_pauli_sum(draw, n=3, max_terms=4):
    k = draw(st.integers(1, max_terms))
    terms = []
    for _ in range(k):
        sites = draw(st.lists(st.integers(0, n - 1), unique=True, min_size=0, max_size=n))
        letters = tuple((s, draw(st.sampled_from("XYZ"))) for s in sites)
        re = draw(st.floats(-2, 2, allow_nan=False))
        im = draw(st.floats(-2, 2, allow_nan=False))
        terms.append(PauliTerm(complex(re, im), letters, n))
    return PauliSum(n, terms)


class TestDenseEquivalence:
    @settings(max_examples=60, deadline=None)
    @given(a=random_pauli_sum(), b=random_pauli_sum())
    def test_commutator_matches_dense(self, a, b):
        lhs = pauli_sum_dense_oracle(commutator(a, b))
        da, db = pauli_sum_dense_oracle(a), pauli_sum_dense_oracle(b)
        assert np.allclose(lhs, da @ db - db @ da, atol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(a=random_pauli_sum(), b=random_pauli_sum())
    def test_product_matches_dense(self, a, b):
        lhs = pauli_sum_dense_oracle(a @ b)
        assert np.allclose(lhs, pauli_sum_dense_oracle(a) @ pauli_sum_dense_oracle(b), atol=1e-10)

    @settings(max_examples=40, deadline=None)
    @given(s=random_pauli_sum())
    def test_frobenius_matches_dense(self, s):
        m = pauli_sum_dense_oracle(s)
        d = m.shape[0]
        expect = math.sqrt(abs(np.trace(m.conj().T @ m)) / d)
        assert s.frobenius_norm() == pytest.approx(expect, rel=1e-12, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(s=random_pauli_sum())
    def test_internal_dense_matches_kron_oracle(self, s):
        assert np.allclose(s.dense(), pauli_sum_dense_oracle(s), atol=1e-12)

    @settings(max_examples=30, deadline=None)
    @given(s=random_pauli_sum())
    def test_spectral_at_most_one_norm(self, s):
        assert s.spectral_norm_dense() <= s.one_norm() + 1e-10


class TestNorms:
    def test_trivial_diagonal_case(self):
        s = PauliSum(2, [PauliTerm(1.0, ((0, "Z"),), 2), PauliTerm(1.0, ((1, "Z"),), 2)])
        assert s.spectral_norm_dense() == pytest.approx(2.0)
        assert s.one_norm() == pytest.approx(2.0)
        assert s.frobenius_norm() == pytest.approx(math.sqrt(2))

    def test_frobenius_of_2iz_pair(self):
        s = PauliSum(2, [PauliTerm(2j, ((0, "Z"),), 2), PauliTerm(2j, ((1, "Z"),), 2)])
        assert s.frobenius_norm() == pytest.approx(math.sqrt(8))

    def test_qimf_commutator_one_norm_counting(self):
        # counting value 2*hx*hy*N + 4*hy*J*(N-1) at N=12 typical parameters
        split = build_qimf(12, **TYPICAL)
        e = commutator(split.parts[0], split.parts[1])
        expect = 2 * 0.8090 * 0.9045 * 12 + 4 * 0.9045 * 1.0 * 11
        assert e.one_norm() == pytest.approx(expect, rel=1e-12)
        assert expect == pytest.approx(57.36, abs=0.005)

    def test_spectral_dense_cap(self):
        s = PauliSum(14, [PauliTerm(1.0, tuple((q, "Z") for q in range(14)), 14)])
        with pytest.raises(ResourceLimitError):
            s.spectral_norm_dense(cap=12)


class TestQimfBuilder:
    def test_counts_typical(self):
        split = build_qimf(12, **TYPICAL)
        assert len(split.parts[0]) == 23
        assert len(split.parts[1]) == 12
        assert all(split.within_part_commuting)

    def test_zero_coefficients_dropped(self):
        split = build_qimf(2, hx=0.0, hy=1.0, j=0.0)
        assert len(split.parts[0]) == 0
        assert len(split.parts[1]) == 2

    def test_explicit_terms_n4(self):
        split = build_qimf(4, hx=1.0, hy=1.0, j=1.0)
        a = split.parts[0]
        for q in range(4):
            assert a.coefficient_of({q: "X"}) == pytest.approx(1.0)
        for q in range(3):
            assert a.coefficient_of({q: "X", q + 1: "X"}) == pytest.approx(1.0)
        assert len(a) == 7

    def test_rejects_tiny_chain(self):
        with pytest.raises(ModelError):
            build_qimf(1, 1, 1, 1)

    def test_commutator_matches_published_form(self):
        # [A,B] = 2i hx hy sum Z_q + 2i J hy sum (Z_q X_{q+1} + X_q Z_{q+1})
        n, hx, hy, j = 6, 0.8090, 0.9045, 1.0
        split = build_qimf(n, hx, hy, j)
        e = commutator(split.parts[0], split.parts[1])
        for q in range(n):
            assert e.coefficient_of({q: "Z"}) == pytest.approx(2j * hx * hy)
        for q in range(n - 1):
            assert e.coefficient_of({q: "Z", q + 1: "X"}) == pytest.approx(2j * j * hy)
            assert e.coefficient_of({q: "X", q + 1: "Z"}) == pytest.approx(2j * j * hy)
        assert len(e) == n + 2 * (n - 1)


class TestQimfNestedCommutators:
    """The published second-order commutators, coefficient for coefficient."""

    def test_a_a_b(self):
        n, hx, hy, j = 7, 0.8090, 0.9045, 1.0
        split = build_qimf(n, hx, hy, j)
        a, b = split.parts
        aab = commutator(a, commutator(a, b))
        for q in range(n):
            expect = 4 * hx**2 * hy
            if q <= n - 2:
                expect += 4 * j**2 * hy
            if q >= 1:
                expect += 4 * j**2 * hy
            assert aab.coefficient_of({q: "Y"}) == pytest.approx(expect)
        for q in range(n - 1):
            assert aab.coefficient_of({q: "Y", q + 1: "X"}) == pytest.approx(8 * j * hx * hy)
            assert aab.coefficient_of({q: "X", q + 1: "Y"}) == pytest.approx(8 * j * hx * hy)
        for q in range(n - 2):
            assert aab.coefficient_of({q: "X", q + 1: "Y", q + 2: "X"}) == pytest.approx(8 * j**2 * hy)

    def test_b_a_b(self):
        n, hx, hy, j = 7, 0.8090, 0.9045, 1.0
        split = build_qimf(n, hx, hy, j)
        a, b = split.parts
        bab = commutator(b, commutator(a, b))
        for q in range(n):
            assert bab.coefficient_of({q: "X"}) == pytest.approx(-4 * hx * hy**2)
        for q in range(n - 1):
            assert bab.coefficient_of({q: "Z", q + 1: "Z"}) == pytest.approx(8 * j * hy**2)
            assert bab.coefficient_of({q: "X", q + 1: "X"}) == pytest.approx(-8 * j * hy**2)


class TestHeisenbergBuilder:
    def test_zero_field_counts(self):
        split = build_heisenberg(4, [0, 0, 0, 0])
        assert len(split.parts[0]) == 6  # bonds (0,1) and (2,3), three letters each
        assert len(split.parts[1]) == 3  # bond (1,2)
        assert all(split.within_part_commuting)

    def test_field_site_assignment(self):
        split = build_heisenberg(4, [1, 1, 1, 1])
        a, b = split.parts
        assert a.coefficient_of({0: "Z"}) == 1.0
        assert a.coefficient_of({2: "Z"}) == 1.0
        assert b.coefficient_of({1: "Z"}) == 1.0
        assert b.coefficient_of({3: "Z"}) == 1.0
        # a field anticommutes with its bond's XX term, so the flag must drop
        assert split.within_part_commuting == (False, False)

    def test_rejects_odd_chain(self):
        with pytest.raises(ModelError):
            build_heisenberg(5, [0] * 5)

    def test_total_matches_kron_oracle_n6(self):
        n, h = 6, 0.5
        split = build_heisenberg(n, [h] * n)
        total = pauli_sum_dense_oracle(split.hamiltonian())
        from conftest import kron_sum

        terms = []
        for q in range(n - 1):
            for letter in "XYZ":
                terms.append((1.0, {q: letter, q + 1: letter}))
        for q in range(n):
            terms.append((h, {q: "Z"}))
        assert np.allclose(total, kron_sum(terms, n), atol=1e-12)


class TestNestedNormSum:
    def test_single_part_vanishes(self):
        split = build_qimf(4, **TYPICAL)
        solo = type(split)((split.parts[0],))
        assert nested_commutator_norm_sum(solo, 3) == 0.0

    def test_dominates_own_summands(self):
        split = build_qimf(5, **TYPICAL)
        a, b = split.parts
        lower = commutator(a, commutator(a, b)).one_norm() + commutator(
            b, commutator(b, a)
        ).one_norm()
        assert nested_commutator_norm_sum(split, 3) >= lower - 1e-12

    def test_upper_bounds_dense_nested_norms(self):
        # brute-force oracle: spectral norms of all dense nested commutators
        split = build_qimf(4, **TYPICAL)
        mats = [pauli_sum_dense_oracle(p) for p in split.parts]

        def comm(x, y):
            return x @ y - y @ x

        total = 0.0
        for i in range(2):
            for k in range(2):
                for m in range(2):
                    nested = comm(mats[i], comm(mats[k], mats[m]))
                    total += np.linalg.svd(nested, compute_uv=False)[0]
        assert nested_commutator_norm_sum(split, 3) >= total - 1e-9

    def test_tuple_cap(self):
        split = build_qimf(4, **TYPICAL)
        with pytest.raises(ResourceLimitError):
            nested_commutator_norm_sum(split, 30)


class TestSerialization:
    def test_round_trip(self):
        split = build_qimf(5, **TYPICAL)
        e = commutator(split.parts[0], split.parts[1])
        back = PauliSum.from_text(e.to_text(), 5)
        assert back.allclose(e, tol=0)

    def test_identity_line(self):
        s = PauliSum.identity(3, 2.5 - 1.0j)
        back = PauliSum.from_text(s.to_text(), 3)
        assert back.identity_coefficient == pytest.approx(2.5 - 1.0j)


class TestCommutingCheck:
    def test_all_x_part_commutes(self):
        assert part_commutes(build_qimf(6, **TYPICAL).parts[0])

    def test_field_breaks_block(self):
        s = PauliSum(2, [PauliTerm(1.0, ((0, "X"), (1, "X")), 2), PauliTerm(0.5, ((0, "Z"),), 2)])
        assert not part_commutes(s)
