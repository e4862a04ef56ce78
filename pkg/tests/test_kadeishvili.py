"""The inductive algorithm: signs, obstructions, memo tables, reductions."""

import numpy as np
import pytest

from conftest import computed_record
from ainfinity.endo_dga import EndomorphismAlgebra
from ainfinity.errors import (CertificateMissing, CommutationFailure,
                              InvalidParameter)
from ainfinity.kadeishvili import (AInfinityRecord, CertificationFailure,
                                   HElement, PeriodicityCertificate, UNIT, X,
                                   Y, first_complete_arity, insertion_sign,
                                   monomial_degree, obstruction_terms,
                                   split_sign)
from ainfinity.resolution import build_cyclic_resolution


class TestSigns:
    def test_split_anchor_degree_one(self):
        # three degree-1 inputs at arity 3, split after the first
        assert split_sign([1, 1, 1], 3, 1) == 1

    def test_split_last_position_zero_degrees(self):
        for n in range(2, 8):
            expected = -1 if (n - 1) % 2 else 1
            assert split_sign([0] * n, n, n - 1) == expected

    def test_arity_three_coefficient_anchors(self):
        # the four exponent forms and the four evaluated signs
        for da in range(4):
            for db in range(4):
                degrees = [da, db, 2]
                assert split_sign(degrees, 3, 1) == (-1) ** (1 + da)
                assert split_sign(degrees, 3, 2) == 1
                assert insertion_sign(degrees, 3, 0, 2) == 1
                assert insertion_sign(degrees, 3, 1, 2) == -1

    def test_insertion_even_inner_at_zero_offset(self):
        # k = 0 and even j: the exponent reduces to j(n - j), always even
        for n in range(4, 9):
            for j in range(2, n, 2):
                assert insertion_sign([1] * n, n, 0, j) == 1

    def test_range_validation(self):
        with pytest.raises(InvalidParameter):
            split_sign([1, 1], 2, 2)
        with pytest.raises(InvalidParameter):
            insertion_sign([1, 1, 1], 3, 2, 2)
        with pytest.raises(InvalidParameter):
            insertion_sign([1, 1, 1], 3, 0, 3)

    def test_term_layout(self):
        base = obstruction_terms([1, 1], 2)
        assert len(base) == 1 and base[0].kind == "product" and base[0].sign == 1
        terms = obstruction_terms([1, 1, 1], 3)
        kinds = [(t.kind, t.s, t.k, t.j) for t in terms]
        assert kinds == [("product", 1, None, None), ("product", 2, None, None),
                         ("insertion", None, 0, 2), ("insertion", None, 1, 2)]


class TestObstruction:
    def test_base_case_is_composition(self, record_2_4):
        rec, _ = record_2_4
        algebra = rec.algebra
        psi = rec.obstruction((X, X))
        assert psi == algebra.compose(algebra.rep_x(), algebra.rep_x())

    def test_arity_three_shape(self, record_2_4):
        # only the two product terms survive on (x, x, x): the inner
        # m_2(x, x) class vanishes, so both insertion terms drop out
        rec, _ = record_2_4
        algebra = rec.algebra
        xi = algebra.rep_x()
        f2 = rec.f_table[(X, X)]
        expected = (algebra.compose(xi, f2).scale(split_sign([1, 1, 1], 3, 1))
                    + algebra.compose(f2, xi).scale(split_sign([1, 1, 1], 3, 2)))
        assert rec.obstruction((X, X, X)) == expected

    def test_unit_tuples_vanish_exactly(self, record_2_4, record_3_3):
        for rec, _ in (record_2_4, record_3_3):
            assert rec.obstruction((UNIT, X, X)).is_zero()
            assert rec.obstruction((X, UNIT, X)).is_zero()
            assert rec.obstruction((X, X, UNIT)).is_zero()
            assert rec.obstruction((UNIT, Y)).is_zero() is False  # id o eta
            assert rec.obstruction((UNIT, X, X, X)).is_zero()


class TestGoldenStructures:
    def test_q4_char2(self, record_2_4):
        rec, summary = record_2_4
        alg = rec.algebra.resolution.algebra
        assert summary.halted_at == 5
        assert rec.m_table[(X, X)].is_zero()
        assert rec.m_table[(X,) * 3].is_zero()
        m4 = rec.m_table[(X,) * 4]
        assert m4.degree == 2 and m4.coords == (1,)
        for k in range(5, 9):
            assert rec.m_table[(X,) * k].is_zero()
            assert rec.f_table[(X,) * k].is_zero()
        f2, f3 = rec.f_table[(X, X)], rec.f_table[(X,) * 3]
        for n in f2.position_range():
            assert f2.component(n).entry(0, 0) == (
                alg.alpha(1, coeff=-1) if n % 2 == 0 else alg.zero())
        for n in f3.position_range():
            assert f3.component(n).entry(0, 0) == (
                alg.scalar(-1) if n % 2 == 0 else alg.zero())
        assert rec.f_table[(X,) * 4].is_zero()

    def test_q3_char3(self, record_3_3):
        rec, summary = record_3_3
        assert summary.halted_at == 4
        m3 = rec.m_table[(X,) * 3]
        assert m3.degree == 2 and m3.coords == (1,)
        assert rec.m_table[(X, X)].is_zero()
        for k in (4, 5, 6):
            assert rec.m_table[(X,) * k].is_zero()
            assert rec.f_table[(X,) * k].is_zero()

    def test_m_q_minus_one_computed_not_assumed(self, record_2_4):
        # q - 1 = 3 vanishing comes out of the solve, not a shortcut:
        # the memo holds an actual entry for the tuple
        rec, _ = record_2_4
        assert (X,) * 3 in rec.m_table
        assert rec.m_table[(X,) * 3].is_zero()
        assert not rec.f_table[(X,) * 3].is_zero()

    def test_degree_bookkeeping(self, record_2_4, record_3_3):
        for rec, _ in (record_2_4, record_3_3):
            for key, value in rec.m_table.items():
                total = sum(monomial_degree(m) for m in key)
                assert value.degree == total + 2 - len(key)
            for key, value in rec.f_table.items():
                total = sum(monomial_degree(m) for m in key)
                if not value.is_zero():
                    assert value.degree == total + 1 - len(key)

    def test_defining_equation_every_entry(self, record_2_4, record_3_3):
        for rec, _ in (record_2_4, record_3_3):
            assert rec.recheck()

    def test_unitality_shortcuts(self, record_2_4):
        rec, _ = record_2_4
        before = (len(rec.m_table), len(rec.f_table))
        assert rec.high_product((X, UNIT, X)).is_zero()
        assert rec.high_map((X, UNIT, X)).is_zero()
        assert rec.high_product((UNIT, X)).coords == (1,)  # m_2(1, x) = x
        assert (len(rec.m_table), len(rec.f_table)) == before


class TestLinearExtension:
    def test_polynomial_multiple_of_product(self, record_2_4):
        rec, _ = record_2_4
        m, f = rec.extend_linear([(1, 1), X, X, X])
        assert str(m) == "y^2"
        assert f.is_zero()  # f_4(x,x,x,x) = 0, so the shift is zero too

    def test_shifted_map_equality(self, record_2_4):
        rec, _ = record_2_4
        _, f = rec.extend_linear([(1, 1), X])
        expected = rec.algebra.compose(rec.zeta_power(1), rec.f_table[(X, X)])
        assert f == expected

    def test_scalar_unit_slot(self, record_2_4):
        rec, _ = record_2_4
        m, f = rec.extend_linear([HElement.monomial(2, UNIT, 1), X, X])
        assert m.is_zero() and f.is_zero()

    def test_inhomogeneous_slot_rejected(self, record_2_4):
        rec, _ = record_2_4
        mixed = HElement(2, {X: 1, (0, 1): 1})
        with pytest.raises(InvalidParameter):
            rec.extend_linear([mixed, X])

    def test_gate_requires_certificate_or_commutation(self, record_2_4):
        rec, _ = record_2_4
        saved_cert = dict(rec.certificates)
        saved_comm = dict(rec.commutation_ok)
        try:
            rec.certificates.clear()
            rec.commutation_ok.clear()
            with pytest.raises(CertificateMissing):
                rec.resolve_map((X, (1, 1)))
        finally:
            rec.certificates.update(saved_cert)
            rec.commutation_ok.update(saved_comm)


class TestCertification:
    def test_certificates_granted(self, record_2_4):
        rec, summary = record_2_4
        assert summary.periodic_arities == sorted(summary.computed_arities)
        cert = rec.certify_periodicity(2)
        assert isinstance(cert, PeriodicityCertificate)
        assert cert.period == 2

    def test_zeta_components_are_identities(self, record_2_4):
        rec, _ = record_2_4
        zeta = rec.zeta_power(1)
        one = rec.algebra.resolution.algebra.one()
        for n in zeta.position_range():
            assert zeta.component(n).entry(0, 0) == one

    def test_perturbed_value_fails_with_tuple(self):
        rec, _ = computed_record(3, 3, max_arity=4)
        rec2 = AInfinityRecord(rec.algebra, mode="reduced")
        rec2.compute_structure(4)
        key = (X, X)
        broken = dict(rec2.f_table[key].components)
        broken[4] = broken[4].scale(2)
        rec2.f_table[key] = rec2.algebra.from_components(1, broken)
        rec2.certificates.pop(2, None)
        result = rec2.certify_periodicity(2)
        assert isinstance(result, CertificationFailure)
        assert result.key == key

    def test_commutation_abort_on_corruption(self):
        rec, _ = computed_record(2, 4, max_arity=3)
        rec2 = AInfinityRecord(rec.algebra, mode="reduced")
        rec2.compute_structure(3)
        key = (X, X)
        value = rec2.f_table[key]
        alg = rec2.algebra.resolution.algebra
        broken = dict(value.components)
        broken[4] = value.component(4).from_element(alg.alpha(3))
        rec2.f_table[key] = rec2.algebra.from_components(1, broken)
        with pytest.raises(CommutationFailure):
            rec2._check_commutation(2)


class TestHalting:
    def test_window_arithmetic_t5(self):
        flags = {k: k >= 5 for k in range(2, 9)}
        assert first_complete_arity(flags, set(range(2, 9))) == 5
        # missing part of the window keeps the run open
        assert first_complete_arity(flags, set(range(2, 8))) is None

    def test_nonzero_blocks_window(self):
        flags = {2: False, 3: False, 4: False, 5: True, 6: True}
        assert first_complete_arity(flags, {2, 3, 4, 5, 6}) is None

    def test_randomized_against_reference(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            top = int(rng.integers(2, 12))
            computed = set(range(2, top + 1))
            flags = {k: bool(rng.integers(0, 2)) for k in computed}
            got = first_complete_arity(flags, computed)
            expected = None
            for t in range(2, top + 2):
                window = list(range(t, 2 * t - 1))
                if all(k in computed and flags[k] for k in window):
                    expected = t
                    break
            assert got == expected

    def test_values_beyond_halting_are_zero_without_solving(self, record_3_3):
        rec, summary = record_3_3
        assert summary.halted_at == 4
        size = len(rec.m_table)
        value = rec.high_product((X,) * 9)
        assert value.is_zero()
        assert rec.high_map((X,) * 9).is_zero()
        assert len(rec.m_table) == size


class TestBruteOracle:
    def test_modes_agree_small(self):
        red, _ = computed_record(2, 4, max_arity=4, truncation=44)
        brute, _ = computed_record(2, 4, max_arity=4, truncation=44, mode="brute")
        keys = set(red.m_table) | set(brute.m_table)
        for key in keys:
            assert red.resolve_product(key) == brute.resolve_product(key)

    def test_direct_computation_reproduces_extended_values(self):
        # stronger than the product-level oracle: on y-heavy tuples the
        # direct recursion reproduces the shifted homotopies exactly,
        # component for component
        import itertools
        red, _ = computed_record(3, 3, max_arity=4, truncation=60)
        brute, _ = computed_record(3, 3, max_arity=4, truncation=60, mode="brute")
        monos = [(1, 0), (1, 1), (1, 2)]
        for n in (2, 3, 4):
            for key in itertools.product(monos, repeat=n):
                if sum(e + 2 * j for e, j in key) > 10:
                    continue
                assert red.resolve_product(key) == brute.resolve_product(key)
                assert red.resolve_map(key) == brute.resolve_map(key)

    def test_brute_memoizes_mixed_tuples(self):
        brute, _ = computed_record(3, 3, max_arity=5, truncation=44, mode="brute")
        mixed = [k for k in brute.m_table if any(m != X for m in k)]
        assert mixed
        assert brute.recheck()


class TestBeyondTheSweep:
    @pytest.mark.parametrize("p,q", [(2, 6), (3, 5), (7, 7)])
    def test_general_exponents(self, p, q):
        # q need not be a power of p for the truncated polynomial family
        rec, summary = computed_record(p, q)
        assert summary.halted_at == q + 1
        mq = rec.m_table[(X,) * q]
        assert mq.degree == 2 and not mq.is_zero()
        if p == 2:
            assert mq.coords == (1,)


class TestConcurrency:
    def test_concurrent_homology_readers(self):
        import threading
        from ainfinity.endo_dga import EndomorphismAlgebra
        from ainfinity.resolution import build_cyclic_resolution

        algebra = EndomorphismAlgebra(build_cyclic_resolution(3, 3, 28))
        errors = []

        def reader():
            try:
                for degree in range(0, 6):
                    basis = algebra.homology_basis(degree)
                    assert len(basis) == 1
                    cls = algebra.class_of(basis[0][1])
                    assert cls.coords == (1,)
            except Exception as exc:  # pragma: no cover
                errors.append(exc)

        threads = [threading.Thread(target=reader) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not errors
        # one shared basis object per degree
        for degree in range(0, 6):
            assert algebra.homology_basis(degree) is algebra.homology_basis(degree)


class TestAutoMode:
    def test_auto_reduced_run_has_invariant_pattern(self):
        rec, summary = computed_record(2, 4, f1_mode="auto")
        assert summary.halted_at == 5
        assert rec.m_table[(X,) * 3].is_zero()
        m4 = rec.m_table[(X,) * 4]
        assert m4.degree == 2 and not m4.is_zero()

    def test_auto_brute_matches_vanishing(self):
        rec, summary = computed_record(3, 3, max_arity=6, truncation=44,
                                       mode="brute", f1_mode="auto")
        assert summary.halted_at == 4
        m3 = rec.m_table[(X,) * 3]
        assert m3.degree == 2 and not m3.is_zero()
