import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fcgate import linalg
from fcgate.errors import CircuitError, DomainError, ShapeError, ValidationError
from fcgate.gates import CX, H, X, ConditionalSpec, FcgSpec, conditional_matrix, fcg_matrix
from fcgate.predicate import TruthTable
from fcgate.simulator import (
    Circuit,
    GateStep,
    OpCounter,
    PhaseOracleStep,
    SimState,
    apply_conditional_blockwise,
    apply_fcg_blockwise,
    apply_full,
    apply_gate,
    grover_run,
    optimal_iterations,
    oracle_ancilla_sequence,
    run_circuit,
    simulate_oracle_ancilla,
)


def random_state(n, m, rng):
    v = rng.standard_normal(2 ** (n + m)) + 1j * rng.standard_normal(2 ** (n + m))
    return SimState(n, m, v / np.linalg.norm(v))


def random_instance(seed, max_n=4, max_m=3):
    rng = np.random.default_rng(seed)
    n, m = int(rng.integers(1, max_n + 1)), int(rng.integers(1, max_m + 1))
    spec = FcgSpec(n, m, TruthTable(n, rng.integers(0, 2, 2**n)), linalg.random_unitary(2**m, rng))
    return spec, random_state(n, m, rng)


def dense_gate_on_qubits(g, qubits, total):
    """Full 2**total matrix of g on the listed qubits, built column by column."""
    dim = 2**total
    k = len(qubits)
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (total - 1 - q)) & 1 for q in range(total)]
        sub = 0
        for q in qubits:
            sub = 2 * sub + bits[q]
        for row_sub in range(2**k):
            amp = g[row_sub, sub]
            if amp == 0:
                continue
            new = list(bits)
            for pos, q in enumerate(qubits):
                new[q] = (row_sub >> (k - 1 - pos)) & 1
            row = int("".join(map(str, new)), 2)
            out[row, col] += amp
    return out


def dense_grover_probs(marked, n, iterations):
    N = 2**n
    s = np.full((N, 1), 1 / math.sqrt(N))
    oracle = np.eye(N)
    for y in marked:
        oracle[y, y] = -1
    diffusion = 2 * (s @ s.T) - np.eye(N)
    step = diffusion @ oracle
    psi = s.copy()
    for _ in range(iterations):
        psi = step @ psi
    return (np.abs(psi) ** 2).ravel()


class TestSimState:
    def test_rejects_unnormalised(self):
        with pytest.raises(ValidationError):
            SimState(1, 1, [1, 1, 0, 0])

    def test_rejects_wrong_length(self):
        with pytest.raises(ShapeError):
            SimState(1, 1, [1, 0])

    def test_basis_out_of_range(self):
        with pytest.raises(ValidationError):
            SimState.basis(1, 1, 2)
        with pytest.raises(ValidationError):
            SimState.basis(2, 1, 0, 2)

    def test_export(self):
        s = SimState(1, 1, np.array([1, 0, 0, 1]) / math.sqrt(2))
        d = s.to_dict(cutoff=1e-15)
        assert set(d["probabilities"]) == {"0", "3"}
        assert set(d["probabilities_bits"]) == {"00", "11"}
        back = SimState.from_dict(d)
        assert np.array_equal(back.vector, s.vector)


class TestApplyFull:
    def test_identity(self, rng):
        s = random_state(1, 1, rng)
        assert np.array_equal(apply_full(np.eye(4), s).vector, s.vector)

    def test_cnot_entangles(self):
        a, b = 0.6, 0.8j
        out = apply_full(CX, SimState(1, 1, [a, 0, b, 0]))
        assert np.allclose(out.vector, [a, 0, 0, b], atol=1e-15)

    def test_x_on_first_qubit(self):
        out = apply_full(np.kron(X, np.eye(2)), SimState.basis(1, 1, 0))
        assert np.array_equal(out.vector, [0, 0, 1, 0])

    def test_errors(self, rng):
        s = random_state(1, 1, rng)
        with pytest.raises(ShapeError):
            apply_full(np.eye(8), s)
        with pytest.raises(ValidationError):
            apply_full(np.diag([1, 1, 1, 2]), s)


class TestFcgBlockwise:
    def test_constant_zero(self, rng):
        s = random_state(3, 2, rng)
        spec = FcgSpec(3, 2, TruthTable.constant(3, 0), linalg.random_unitary(4, rng))
        assert np.array_equal(apply_fcg_blockwise(spec, s).vector, s.vector)

    def test_cnot_case(self):
        a, b = 0.6, -0.8
        out = apply_fcg_blockwise(FcgSpec(1, 1, TruthTable(1, [0, 1]), X), SimState(1, 1, [a, 0, b, 0]))
        assert np.array_equal(out.vector, [a, 0, 0, b])

    @given(st.integers(0, 2**32 - 1))
    def test_matches_dense(self, seed):
        spec, s = random_instance(seed)
        fast = apply_fcg_blockwise(spec, s)
        slow = apply_full(fcg_matrix(spec).to_dense(), s)
        assert np.max(np.abs(fast.vector - slow.vector)) <= 1e-12
        assert abs(np.linalg.norm(fast.vector) - 1) <= 1e-9

    def test_dim_mismatch(self, rng):
        spec = FcgSpec(2, 1, TruthTable.constant(2, 1), X)
        with pytest.raises(ShapeError):
            apply_fcg_blockwise(spec, random_state(1, 2, rng))

    @pytest.mark.parametrize("n,m,k", [(3, 1, 0), (3, 2, 3), (4, 3, 16), (10, 1, 1)])
    def test_operation_count(self, n, m, k):
        rng = np.random.default_rng(k)
        marked = rng.choice(2**n, size=k, replace=False)
        spec = FcgSpec(n, m, TruthTable.from_marked(n, marked), linalg.random_unitary(2**m, rng))
        counter = OpCounter()
        apply_fcg_blockwise(spec, random_state(n, m, rng), counter)
        assert counter.mul_adds == k * (2**m) ** 2

    def test_dense_count(self, rng):
        counter = OpCounter()
        apply_full(np.eye(16), random_state(2, 2, rng), counter)
        assert counter.mul_adds == 16**2


class TestConditionalBlockwise:
    def test_identity_else(self, rng):
        spec, s = random_instance(3)
        cond = ConditionalSpec(spec.n, spec.m, spec.table, spec.u, np.eye(2**spec.m))
        assert np.array_equal(apply_conditional_blockwise(cond, s).vector, apply_fcg_blockwise(spec, s).vector)

    def test_if_else_on_zero_state(self):
        spec = ConditionalSpec(3, 2, TruthTable.from_marked(3, [0]), np.kron(H, H), np.kron(X, X))
        out = apply_conditional_blockwise(spec, SimState.basis(3, 2, 0))
        expected = np.zeros(32)
        expected[:4] = 0.5
        assert np.max(np.abs(out.vector - expected)) <= 1e-15

    def test_all_ones(self, rng):
        u_then = linalg.random_unitary(2, rng)
        spec = ConditionalSpec(2, 1, TruthTable.constant(2, 1), u_then, X)
        for x in range(4):
            out = apply_conditional_blockwise(spec, SimState.basis(2, 1, x))
            expected = np.kron(np.eye(4)[x], u_then @ [1, 0])
            assert np.max(np.abs(out.vector - expected)) <= 1e-15

    @given(st.integers(0, 2**32 - 1))
    def test_matches_dense(self, seed):
        spec, s = random_instance(seed)
        rng = np.random.default_rng(seed + 1)
        cond = ConditionalSpec(spec.n, spec.m, spec.table, spec.u, linalg.random_unitary(2**spec.m, rng))
        fast = apply_conditional_blockwise(cond, s)
        slow = apply_full(conditional_matrix(cond).to_dense(), s)
        assert np.max(np.abs(fast.vector - slow.vector)) <= 1e-12


class TestOracleAncilla:
    def test_constant_zero(self, rng):
        s = random_state(2, 1, rng)
        spec = FcgSpec(2, 1, TruthTable.constant(2, 0), X)
        psi = oracle_ancilla_sequence(spec, s)
        assert not psi[:, 1, :].any()
        assert np.array_equal(simulate_oracle_ancilla(spec, s).vector, s.vector)

    def test_toffoli_instance(self):
        spec = FcgSpec(2, 1, TruthTable(2, [0, 0, 0, 1]), X)
        out = simulate_oracle_ancilla(spec, SimState.basis(2, 1, 3, 0))
        assert np.array_equal(out.vector, SimState.basis(2, 1, 3, 1).vector)

    def test_layout_is_control_ancilla_target(self):
        # after the first oracle only, a marked x sits at ancilla 1
        spec = FcgSpec(1, 1, TruthTable(1, [0, 1]), np.eye(2))
        psi = oracle_ancilla_sequence(spec, SimState.basis(1, 1, 1, 1))
        assert psi.shape == (2, 2, 2)
        assert psi[1, 0, 1] == 1

    @given(st.integers(0, 2**32 - 1))
    def test_matches_blockwise(self, seed):
        spec, s = random_instance(seed)
        psi = oracle_ancilla_sequence(spec, s)
        assert np.sum(np.abs(psi[:, 0, :]) ** 2) >= 1 - 1e-12
        out = simulate_oracle_ancilla(spec, s)
        assert np.max(np.abs(out.vector - apply_fcg_blockwise(spec, s).vector)) <= 1e-12


class TestApplyGate:
    @pytest.mark.parametrize("qubits", [(0,), (2,), (0, 1), (1, 0), (0, 2), (2, 0), (0, 1, 2), (2, 0, 1)])
    def test_against_explicit_embedding(self, qubits, rng):
        k = len(qubits)
        g = linalg.random_unitary(2**k, rng)
        s = random_state(2, 1, rng)
        expected = dense_gate_on_qubits(g, qubits, 3) @ s.vector
        assert np.max(np.abs(apply_gate(g, qubits, s).vector - expected)) <= 1e-12

    def test_bad_qubits(self, rng):
        with pytest.raises(ShapeError):
            apply_gate(CX, (0, 0), random_state(1, 1, rng))
        with pytest.raises(ShapeError):
            apply_gate(X, (2,), random_state(1, 1, rng))


class TestGrover:
    def test_n2_one_iteration(self):
        probs = grover_run(TruthTable.from_marked(2, [3]), 1)
        assert probs[3] == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(probs, dense_grover_probs([3], 2, 1), atol=1e-12)

    def test_n3_two_iterations(self):
        probs = grover_run(TruthTable.from_marked(3, [5]), 2)
        oracle = dense_grover_probs([5], 3, 2)
        assert np.allclose(probs, oracle, atol=1e-12)
        # sin^2(5 asin(1/sqrt 8)) = 121/128
        assert probs[5] == pytest.approx(121 / 128, abs=1e-12)

    def test_zero_iterations_uniform(self):
        probs = grover_run(TruthTable.from_marked(3, [1, 2]), 0)
        assert np.allclose(probs, 1 / 8, atol=1e-15)

    def test_empty_marked_set(self):
        with pytest.raises(DomainError):
            grover_run(TruthTable.constant(3, 0), 1)

    def test_optimal_iterations(self):
        assert optimal_iterations(2, 1) == 1
        assert optimal_iterations(3, 1) == 2
        assert optimal_iterations(3, 2) == 1
        assert optimal_iterations(10, 1) == 25

    @given(st.integers(1, 8), st.data())
    def test_probabilities_sum_to_one(self, n, data):
        marked = data.draw(st.sets(st.integers(0, 2**n - 1), min_size=1))
        iters = data.draw(st.integers(0, 30))
        probs = grover_run(TruthTable.from_marked(n, marked), iters)
        assert abs(probs.sum() - 1) <= 1e-9


class TestRunCircuit:
    def test_empty(self, rng):
        s = random_state(2, 1, rng)
        assert np.array_equal(run_circuit(Circuit(2, 1), s).vector, s.vector)

    def test_bell_cnot(self):
        a = b = 1 / math.sqrt(2)
        out = run_circuit(Circuit(1, 1, (GateStep("CX", (0, 1)),)), SimState(1, 1, [a, 0, b, 0]))
        assert np.allclose(out.vector, [a, 0, 0, b], atol=1e-15)

    @pytest.mark.parametrize("x,y", [(0, 0), (0, 1), (1, 0), (1, 1)])
    def test_or_gate(self, x, y):
        c = Circuit(2, 1, (GateStep("CX", (0, 2)), GateStep("CX", (1, 2)), GateStep("CCX", (0, 1, 2))))
        out = run_circuit(c, SimState.basis(2, 1, 2 * x + y, 0))
        assert np.flatnonzero(out.vector).tolist() == [4 * x + 2 * y + (x | y)]

    def test_mixed_steps_with_counter(self):
        t = TruthTable.from_marked(2, [1])
        c = Circuit(2, 1, (
            GateStep("H", (0,)), GateStep("H", (1,)),
            FcgSpec(2, 1, t, X),
            PhaseOracleStep(t),
            ConditionalSpec(2, 1, t, H, X),
        ))
        counter = OpCounter()
        out = run_circuit(c, SimState.basis(2, 1, 0), counter)
        assert abs(np.linalg.norm(out.vector) - 1) <= 1e-12
        assert counter.mul_adds == 4 + 2 + (4 + 3 * 4)

    def test_reports_failing_step(self, rng):
        c = Circuit(1, 1, (GateStep("X", (0,)), GateStep("X", (5,))))
        with pytest.raises(CircuitError) as info:
            run_circuit(c, random_state(1, 1, rng))
        assert info.value.step == 1
