"""Acceptance criteria, one test per criterion, exact tolerances throughout.

Every check here is exact finite-field arithmetic; the only numeric
tolerances are the wall-clock budgets stated with each criterion.  Each
test prints one PASS/FAIL line (run with -s or look at the -v output).
"""

import itertools
import time

import numpy as np

from conftest import computed_record
from ainfinity.cli import default_truncation
from ainfinity.endo_dga import EndomorphismAlgebra, HomologyClass
from ainfinity.kadeishvili import (AInfinityRecord, UNIT, X,
                                   first_complete_arity, insertion_sign,
                                   split_sign)
from ainfinity.resolution import build_cyclic_resolution
from ainfinity.stasheff import verify_structure

SWEEP = [(2, 4), (2, 8), (3, 3), (3, 9), (5, 5)]

# recorded sign of m_q(x, ..., x) per sweep point: +1 always in
# characteristic two; the odd-characteristic signs below are the values
# this engine produces deterministically (either sign is acceptable,
# stability is what matters)
RECORDED_MQ_SIGN = {(2, 4): 1, (2, 8): 1, (3, 3): 1, (3, 9): 2, (5, 5): 4}


def report(name, ok, detail=""):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name} failed {detail}"


def _assert_x_tuple_pattern(rec, q, max_arity):
    """The vanishing/halting pattern common to every sweep point."""
    for k in range(3, max_arity + 1):
        value = rec.m_table[(X,) * k]
        if k == q:
            assert value.degree == 2 and not value.is_zero()
        else:
            assert value.is_zero(), f"m_{k} should vanish"
    for k in range(2, q):
        # homotopies below the halting arity: a single power of the
        # variable at even positions, zero at odd ones
        f = rec.f_table[(X,) * k]
        for n in f.position_range():
            got = f.component(n).entry(0, 0)
            if n % 2 == 0:
                support = [i for i, c in enumerate(got.coeffs) if c]
                assert support == [q - 1 - k]
            else:
                assert got.is_zero()
    for k in range(q, max_arity + 1):
        assert rec.f_table[(X,) * k].is_zero(), f"f_{k} should vanish"


class TestCriterion1:
    def test_golden_q4_char2(self):
        start = time.perf_counter()
        algebra = EndomorphismAlgebra(build_cyclic_resolution(2, 4, default_truncation(8)))
        rec = AInfinityRecord(algebra)
        summary = rec.compute_structure(8)
        elapsed = time.perf_counter() - start

        alg = algebra.resolution.algebra
        assert rec.m_table[(X,) * 3].is_zero()
        for k in range(5, 9):
            assert rec.m_table[(X,) * k].is_zero()
        m4 = rec.m_table[(X,) * 4]
        assert m4 == HomologyClass(2, (1,))

        f2 = rec.f_table[(X, X)]
        f3 = rec.f_table[(X,) * 3]
        for n in f2.position_range():
            expected = alg.alpha(1, coeff=-1) if n % 2 == 0 else alg.zero()
            assert f2.component(n).entry(0, 0) == expected
        for n in f3.position_range():
            expected = alg.scalar(-1) if n % 2 == 0 else alg.zero()
            assert f3.component(n).entry(0, 0) == expected
        assert rec.f_table[(X,) * 4].is_zero()
        assert summary.halted_at == 5
        assert elapsed < 5.0
        report("criterion 1: golden (p=2, q=4) reproduction",
               True, f"{elapsed:.2f}s")


class TestCriterion2:
    def test_parameter_sweep(self):
        start = time.perf_counter()
        for p, q in SWEEP:
            rec, summary = computed_record(p, q)
            _assert_x_tuple_pattern(rec, q, 2 * q)
            assert summary.halted_at == q + 1
            mq = rec.m_table[(X,) * q]
            assert mq.degree == 2
            sign = mq.coords[0]
            if p == 2:
                assert sign == 1, "m_q must equal y exactly in characteristic 2"
            else:
                assert sign in (1, p - 1), "m_q must be y or -y"
            assert sign == RECORDED_MQ_SIGN[(p, q)], "recorded sign drifted"
        # stability across reruns: recompute one odd point from scratch
        algebra = EndomorphismAlgebra(build_cyclic_resolution(3, 3, default_truncation(6)))
        fresh = AInfinityRecord(algebra)
        fresh.compute_structure(6)
        assert fresh.m_table[(X,) * 3].coords[0] == RECORDED_MQ_SIGN[(3, 3)]
        elapsed = time.perf_counter() - start
        assert elapsed < 60.0
        report("criterion 2: parameter sweep", True, f"{elapsed:.2f}s")


class TestCriterion3:
    def test_stasheff_verification_sweep(self):
        start = time.perf_counter()
        for p, q in SWEEP:
            rec, _ = computed_record(p, q)
            rep = verify_structure(rec, 2 * q)
            assert rep.passed, f"(p={p}, q={q}): {rep}"
            # both identity families actually ran at every arity
            assert rep.checked == 2 * (2 * q) - 1
        elapsed = time.perf_counter() - start
        assert elapsed < 120.0
        report("criterion 3: Stasheff residuals zero on all sweep points",
               True, f"{elapsed:.2f}s")


class TestCriterion4:
    def test_oracle_equivalence(self):
        start = time.perf_counter()
        for p, q in [(2, 4), (3, 3)]:
            reduced, _ = computed_record(p, q, max_arity=6, truncation=44)
            brute, _ = computed_record(p, q, max_arity=6, truncation=44,
                                       mode="brute")
            keys = set(reduced.m_table) | set(brute.m_table)
            assert any(any(m != X for m in k) for k in brute.m_table), \
                "brute mode must exercise y-multiplied tuples"
            for key in sorted(keys, key=lambda k: (len(k), k)):
                assert reduced.resolve_product(key) == brute.resolve_product(key), \
                    f"m mismatch on {key} at (p={p}, q={q})"
        elapsed = time.perf_counter() - start
        report("criterion 4: brute-force oracle equivalence", True,
               f"{elapsed:.2f}s")


class TestCriterion5:
    def test_sign_anchors(self):
        # the eight arity-3 sign anchors
        for da, db, dc in itertools.product(range(3), repeat=3):
            degrees = [da, db, dc]
            assert split_sign(degrees, 3, 1) == (-1) ** (1 + 1 * da)
            assert split_sign(degrees, 3, 2) == (-1) ** (2 + 2 * (da + db))
            assert insertion_sign(degrees, 3, 0, 2) == (-1) ** 0
            assert insertion_sign(degrees, 3, 1, 2) == (-1) ** 1
        # evaluated signs on degree-(1,1,1) input: -(-1)^|a|, +, +, -
        assert [split_sign([1, 1, 1], 3, 1), split_sign([1, 1, 1], 3, 2),
                insertion_sign([1, 1, 1], 3, 0, 2),
                insertion_sign([1, 1, 1], 3, 1, 2)] == [1, 1, 1, -1]

        # strict-unitality cancellations on representative elements
        for point in [(2, 4), (3, 3)]:
            rec, _ = computed_record(*point)
            for key in [(UNIT, X, X), (X, UNIT, X), (X, X, UNIT),
                        (UNIT, X, (0, 1)), ((0, 1), UNIT, X)]:
                assert rec.obstruction(key).is_zero(), f"Psi_3{key} != 0"
        report("criterion 5: sign anchors and unitality cancellations", True)


class TestCriterion6:
    CASES = 200

    def test_dd_zero(self):
        rng = np.random.default_rng(101)
        algebras = [computed_record(*pt)[0].algebra for pt in [(2, 4), (3, 3)]]
        for i in range(self.CASES):
            algebra = algebras[i % 2]
            f = algebra.random_endomorphism(rng, int(rng.integers(0, 4)))
            assert algebra.differential(algebra.differential(f)).is_zero()
        report("criterion 6a: D(D f) = 0", True, f"{self.CASES} cases")

    def test_leibniz(self):
        rng = np.random.default_rng(103)
        algebras = [computed_record(*pt)[0].algebra for pt in [(2, 4), (3, 3)]]
        for i in range(self.CASES):
            algebra = algebras[i % 2]
            dg = int(rng.integers(0, 3))
            dh = int(rng.integers(0, 3))
            f = algebra.random_endomorphism(rng, dg)
            g = algebra.random_endomorphism(rng, dh)
            sign = -1 if dg % 2 else 1
            lhs = algebra.differential(algebra.compose(f, g))
            rhs = (algebra.compose(algebra.differential(f), g)
                   + algebra.compose(f, algebra.differential(g)).scale(sign))
            assert lhs == rhs
        report("criterion 6b: Leibniz rule", True, f"{self.CASES} cases")

    def test_section_property(self):
        rng = np.random.default_rng(107)
        records = [computed_record(*pt)[0] for pt in [(2, 4), (3, 3)]]
        for i in range(self.CASES):
            rec = records[i % 2]
            p = rec.algebra.p
            degree = int(rng.integers(0, 7))
            coeff = int(rng.integers(1, p))
            cls = HomologyClass(degree, (coeff,))
            rep = rec.f1_of_class(cls)
            assert rec.algebra.class_of(rep) == cls
        report("criterion 6c: section property", True, f"{self.CASES} cases")

    def test_defining_equation_every_memo_entry(self):
        entries = 0
        for pt in SWEEP:
            rec, _ = computed_record(*pt)
            assert rec.recheck()
            entries += len(rec.f_table)
        brute, _ = computed_record(3, 3, max_arity=6, truncation=44, mode="brute")
        assert brute.recheck()
        entries += len(brute.f_table)
        report("criterion 6d: defining equation on every memo entry", True,
               f"{entries} entries")

    def test_halting_window_arithmetic(self):
        rng = np.random.default_rng(109)
        for _ in range(self.CASES):
            top = int(rng.integers(2, 14))
            computed = set(range(2, top + 1))
            flags = {k: bool(rng.integers(0, 2)) for k in computed}
            got = first_complete_arity(flags, computed)
            expected = None
            for t in range(2, top + 2):
                if all(k in computed and flags[k] for k in range(t, 2 * t - 1)):
                    expected = t
                    break
            assert got == expected
            if got is not None:
                assert all(flags[k] for k in range(got, 2 * got - 1))
        report("criterion 6e: halting-window arithmetic", True,
               f"{self.CASES} cases")


class TestCriterion7:
    def test_periodicity_certification(self):
        start = time.perf_counter()
        for p, q in SWEEP:
            rec, summary = computed_record(p, q)
            arities = sorted(summary.computed_arities)
            assert summary.periodic_arities == arities
            for arity in arities:
                cert = rec.certify_periodicity(arity)
                assert cert.period == 2, f"period at arity {arity} not 2"
                for key, compact in cert.compacts.items():
                    assert compact.expand(rec.algebra) == rec.f_table[key]
        elapsed = time.perf_counter() - start
        report("criterion 7: periodicity certificates with exact expansion",
               True, f"{elapsed:.2f}s")
