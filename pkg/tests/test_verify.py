import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fcgate import linalg, verify
from fcgate.errors import CapacityError, ShapeError
from fcgate.gates import CX, X, FcgSpec, fcg_matrix
from fcgate.predicate import TruthTable


def test_unitary_pass_on_cnot():
    r = verify.check_unitary(CX, 1e-12)
    assert r.passed and r.max_deviation == 0 and r.witness is None


def test_unitary_fail_on_shear():
    r = verify.check_unitary(np.array([[1, 1], [0, 1]]), 1e-12)
    assert not r.passed
    assert r.witness in [(0, 1), (1, 0), (1, 1)]
    assert r.max_deviation == 1.0


def test_unitary_requires_square():
    with pytest.raises(ShapeError):
        verify.check_unitary(np.ones((2, 4)))


@given(st.integers(0, 2**32 - 1))
def test_unitary_on_random_fcg(seed):
    spec = verify.random_fcg_spec(np.random.default_rng(seed))
    assert verify.check_unitary(fcg_matrix(spec).to_dense(), 1e-9).passed


class TestBcgProduct:
    def test_or(self):
        spec = FcgSpec(2, 1, TruthTable(2, [0, 1, 1, 1]), X)
        for order in ("ascending", "descending", [2, 3, 1]):
            assert verify.check_fcg_equals_bcg_product(spec, 1e-12, order).passed

    def test_empty(self):
        assert verify.check_fcg_equals_bcg_product(FcgSpec(2, 1, TruthTable.constant(2, 0), X)).passed

    def test_random_suite(self):
        for spec in verify.random_fcg_specs(200, seed=3):
            assert verify.check_fcg_equals_bcg_product(spec, 1e-9).passed

    def test_bad_order(self):
        with pytest.raises(ValueError):
            verify.check_fcg_equals_bcg_product(FcgSpec(2, 1, TruthTable(2, [0, 1, 1, 1]), X), order=[1, 2])

    def test_cap(self):
        with pytest.raises(CapacityError):
            verify.check_fcg_equals_bcg_product(FcgSpec(12, 1, TruthTable.from_marked(12, [0]), X))


class TestEquivalence:
    def test_identical(self, rng):
        g = linalg.random_unitary(8, rng)
        assert verify.check_equivalence(g, g, 1e-12).passed

    def test_global_phase(self, rng):
        g = linalg.random_unitary(8, rng)
        rotated = np.exp(1j * np.pi / 3) * g
        assert not verify.check_equivalence(g, rotated, 1e-12).passed
        assert verify.check_equivalence(g, rotated, 1e-12, up_to_global_phase=True).passed

    def test_phase_does_not_hide_real_differences(self):
        assert not verify.check_equivalence(np.diag([1, 1]), np.diag([1, -1]), 1e-12, True).passed

    def test_or_circuit_against_fcg(self):
        # CX from qubit 0 to qubit 2, written as a permutation
        cx02 = np.zeros((8, 8))
        for i in range(8):
            a, b, c = (i >> 2) & 1, (i >> 1) & 1, i & 1
            cx02[(a << 2) | (b << 1) | (c ^ a), i] = 1
        ccx = np.eye(8)[[0, 1, 2, 3, 4, 5, 7, 6]]
        circuit = ccx @ np.kron(np.eye(2), CX) @ cx02
        fcg = fcg_matrix(FcgSpec(2, 1, TruthTable(2, [0, 1, 1, 1]), X)).to_dense()
        assert verify.check_equivalence(circuit, fcg, 1e-10).passed

    @given(st.integers(0, 2**32 - 1), st.floats(1e-6, 1.0))
    def test_witness_is_honest(self, seed, eps):
        rng = np.random.default_rng(seed)
        a = linalg.random_unitary(4, rng)
        b = a.copy()
        i, j = rng.integers(0, 4, 2)
        b[i, j] += eps
        r = verify.check_equivalence(a, b, eps / 2)
        assert not r.passed
        assert abs(a[r.witness] - b[r.witness]) > eps / 2

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            verify.check_equivalence(np.eye(2), np.eye(4))


class TestEntryFormula:
    def test_toffoli(self):
        r = verify.check_entry_formula(FcgSpec(2, 1, TruthTable(2, [0, 0, 0, 1]), X))
        assert r.passed and r.max_deviation == 0

    def test_constant_zero(self, rng):
        spec = FcgSpec(3, 2, TruthTable.constant(3, 0), linalg.random_unitary(4, rng))
        assert np.array_equal(verify.entry_formula_matrix(spec), np.eye(32))

    def test_random(self):
        for spec in verify.random_fcg_specs(50, seed=9):
            assert verify.check_entry_formula(spec).passed

    def test_detects_a_wrong_builder(self):
        spec = FcgSpec(2, 1, TruthTable(2, [0, 1, 0, 0]), X)
        wrong = fcg_matrix(FcgSpec(2, 1, TruthTable(2, [0, 0, 1, 0]), X)).to_dense()
        r = verify.compare_matrices("entry-formula", wrong, verify.entry_formula_matrix(spec), 1e-15)
        assert not r.passed and r.witness is not None


class TestOtherRoutes:
    def test_qit_and_ancilla(self):
        for spec in verify.random_fcg_specs(30, seed=5):
            assert verify.check_qit(spec).passed
            assert verify.check_ancilla_route(spec).passed

    def test_ancilla_route_is_unitary_and_leaves_ancilla_sector_closed(self, rng):
        spec = verify.random_fcg_spec(rng)
        big = verify.ancilla_route_matrix(spec)
        assert linalg.is_unitary(big, 1e-9)
        N, M = spec.table.size, spec.u.shape[0]
        zero_cols = [2 * x * M + s for x in range(N) for s in range(M)]
        one_rows = [(2 * x + 1) * M + s for x in range(N) for s in range(M)]
        assert not big[np.ix_(one_rows, zero_cols)].any()

    def test_phase_kickback(self):
        for seed in range(10):
            t = verify.random_table(3, np.random.default_rng(seed))
            assert verify.check_phase_kickback(t).passed


def test_reports_are_deterministic_and_serialisable():
    specs_a = verify.random_fcg_specs(5, seed=1)
    specs_b = verify.random_fcg_specs(5, seed=1)
    ra = [verify.check_qit(s) for s in specs_a]
    rb = [verify.check_qit(s) for s in specs_b]
    assert ra == rb
    doc = json.loads(verify.reports_to_json(ra))
    assert set(doc[0]) == {"check", "pass", "max_deviation", "witness"}


def test_failing_report_needs_witness():
    with pytest.raises(ValueError):
        verify.VerificationReport("x", False, 1.0)
