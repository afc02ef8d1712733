"""Statevector simulation with a block-wise fast path for function-controlled gates.

A state on ``n`` control and ``m`` target qubits is a length ``N*M`` vector;
viewed as an ``(N, M)`` array, row ``x`` holds the target amplitudes for
control value ``x``. An FCG only touches the rows whose control value is
marked, so applying it costs ``k * M**2`` multiply-adds for ``k`` marked
values instead of ``(N*M)**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

import numpy as np

from . import linalg
from .errors import CapacityError, CircuitError, DomainError, FcgError, ShapeError, ValidationError
from .gates import ConditionalSpec, FcgSpec, phase_factor, standard_gate
from .linalg import ComplexMatrix
from .predicate import TruthTable, marked_set

NORM_TOL = 1e-9
MAX_QUBITS = 24
MAX_DENSE_DIM = 2**10
MAX_GROVER_WIDTH = 12


@dataclass
class OpCounter:
    """Tally of complex multiply-adds performed on state amplitudes."""

    mul_adds: int = 0

    def add(self, k: int):
        self.mul_adds += int(k)


@dataclass(frozen=True, eq=False)
class SimState:
    n: int
    m: int
    vector: np.ndarray

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValidationError("register widths must be non-negative")
        if self.n + self.m > MAX_QUBITS:
            raise CapacityError(f"{self.n + self.m} qubits exceeds simulation cap {MAX_QUBITS}")
        v = np.asarray(self.vector, dtype=np.complex128).reshape(-1)
        if v.size != 2 ** (self.n + self.m):
            raise ShapeError(f"state for n={self.n}, m={self.m} needs {2 ** (self.n + self.m)} amplitudes, got {v.size}")
        if not np.all(np.isfinite(v)):
            raise ValidationError("state has non-finite amplitudes")
        norm = float(np.vdot(v, v).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalised (|psi|^2 = {norm})")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)

    @classmethod
    def basis(cls, n: int, m: int, x: int, s: int = 0) -> "SimState":
        if not (0 <= x < 2**n and 0 <= s < 2**m):
            raise ValidationError(f"basis |{x}>|{s}> out of range for n={n}, m={m}")
        v = np.zeros(2 ** (n + m), dtype=np.complex128)
        v[x * 2**m + s] = 1.0
        return cls(n, m, v)

    @classmethod
    def product(cls, control: Sequence[complex], target: Sequence[complex]) -> "SimState":
        c = np.asarray(control, dtype=np.complex128)
        t = np.asarray(target, dtype=np.complex128)
        return cls(linalg.num_qubits(c.size), linalg.num_qubits(t.size), np.kron(c, t))

    @property
    def dim(self) -> int:
        return self.vector.size

    def as_blocks(self) -> np.ndarray:
        """The amplitudes as an ``(N, M)`` array (a copy)."""
        return self.vector.reshape(2**self.n, 2**self.m).copy()

    def probabilities(self) -> np.ndarray:
        return np.abs(self.vector) ** 2

    def control_probabilities(self) -> np.ndarray:
        return self.probabilities().reshape(2**self.n, 2**self.m).sum(axis=1)

    def bitstring(self, index: int) -> str:
        return format(index, f"0{self.n + self.m}b") if self.n + self.m else ""

    def to_dict(self, cutoff: float = 0.0) -> dict:
        probs = self.probabilities()
        keep = [i for i in range(self.dim) if probs[i] > cutoff]
        return {
            "n": self.n,
            "m": self.m,
            "amplitudes": [[float(z.real), float(z.imag)] for z in self.vector],
            "probabilities": {str(i): float(probs[i]) for i in keep},
            "probabilities_bits": {self.bitstring(i): float(probs[i]) for i in keep},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SimState":
        try:
            amps = [complex(re, im) for re, im in d["amplitudes"]]
            return cls(int(d["n"]), int(d["m"]), np.array(amps, dtype=np.complex128))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, FcgError):
                raise
            raise ValidationError(f"malformed state object: {exc}") from exc


def _check_norm(v: np.ndarray):
    norm = float(np.vdot(v, v).real)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValidationError(f"norm drifted to {norm}")


# --- dense reference path ----------------------------------------------------

def apply_full(g: ComplexMatrix, s: SimState, counter: OpCounter | None = None,
               check_unitary: bool = True) -> SimState:
    """``g @ vector`` with a dense matrix; the reference path."""
    g = linalg.as_matrix(g)
    if g.shape != (s.dim, s.dim):
        raise ShapeError(f"gate is {g.shape[0]}x{g.shape[1]}, state has dim {s.dim}")
    if check_unitary and not linalg.is_unitary(g, linalg.GOLDEN_TOL):
        raise ValidationError("gate is not unitary")
    if counter is not None:
        counter.add(s.dim * s.dim)
    return SimState(s.n, s.m, g @ s.vector)


# --- block-wise fast path ----------------------------------------------------

def _check_dims(n: int, m: int, s: SimState, what: str):
    if (n, m) != (s.n, s.m):
        raise ShapeError(f"{what} is for n={n}, m={m}; state has n={s.n}, m={s.m}")


def _apply_rows(rows: np.ndarray, idx: np.ndarray, u: ComplexMatrix, counter: OpCounter | None):
    # each selected row r becomes U @ r; rows are disjoint so this is one batched matvec
    if idx.size:
        rows[idx] = rows[idx] @ u.T
    if counter is not None:
        counter.add(idx.size * u.shape[0] * u.shape[1])


def apply_fcg_blockwise(spec: FcgSpec, s: SimState, counter: OpCounter | None = None) -> SimState:
    """Apply U to the target slice of every marked control value; leave the rest alone."""
    _check_dims(spec.n, spec.m, s, "FCG")
    rows = s.as_blocks()
    _apply_rows(rows, np.flatnonzero(spec.table.bits), spec.u, counter)
    out = rows.reshape(-1)
    _check_norm(out)
    return SimState(s.n, s.m, out)


def apply_conditional_blockwise(spec: ConditionalSpec, s: SimState,
                                counter: OpCounter | None = None) -> SimState:
    _check_dims(spec.n, spec.m, s, "conditional gate")
    rows = s.as_blocks()
    _apply_rows(rows, np.flatnonzero(spec.table.bits), spec.u_then, counter)
    _apply_rows(rows, np.flatnonzero(spec.table.bits == 0), spec.u_else, counter)
    out = rows.reshape(-1)
    _check_norm(out)
    return SimState(s.n, s.m, out)


def apply_phase_oracle(table: TruthTable, phase: float, s: SimState,
                       counter: OpCounter | None = None) -> SimState:
    """Multiply every amplitude with a marked control value by ``e^{i phase}``."""
    if table.n != s.n:
        raise ShapeError(f"oracle table has width {table.n}, control register has {s.n}")
    rows = s.as_blocks()
    idx = np.flatnonzero(table.bits)
    rows[idx] *= phase_factor(phase)
    if counter is not None:
        counter.add(idx.size * 2**s.m)
    return SimState(s.n, s.m, rows.reshape(-1))


def apply_gate(g: ComplexMatrix, qubits: Sequence[int], s: SimState) -> SimState:
    """Apply a ``k``-qubit gate to the listed qubits (qubit 0 = most significant).

    The first listed qubit is the most significant index of ``g``.
    """
    g = linalg.as_matrix(g)
    total = s.n + s.m
    k = len(qubits)
    if g.shape != (2**k, 2**k):
        raise ShapeError(f"{g.shape[0]}x{g.shape[1]} gate cannot act on {k} qubit(s)")
    if len(set(qubits)) != k or any(not 0 <= q < total for q in qubits):
        raise ShapeError(f"qubit indices {list(qubits)} invalid for a {total}-qubit register")
    psi = s.vector.reshape([2] * total)
    psi = np.moveaxis(psi, list(qubits), list(range(k)))
    front = psi.shape
    psi = (g @ psi.reshape(2**k, -1)).reshape(front)
    psi = np.moveaxis(psi, list(range(k)), list(qubits))
    return SimState(s.n, s.m, psi.reshape(-1))


# --- ancilla oracle route ----------------------------------------------------

def oracle_ancilla_sequence(spec: FcgSpec, s: SimState) -> np.ndarray:
    """Run the oracle / controlled-U / oracle sequence on ``|x>|0>|phi>``.

    Returns the extended amplitudes as an ``(N, 2, M)`` array indexed by
    (control value, ancilla bit, target value).
    """
    _check_dims(spec.n, spec.m, s, "FCG")
    N, M = 2**s.n, 2**s.m
    psi = np.zeros((N, 2, M), dtype=np.complex128)
    psi[:, 0, :] = s.vector.reshape(N, M)
    marked = np.flatnonzero(spec.table.bits)

    def oracle(p):
        # O_f (x) I_M : |x>|a>|phi> -> |x>|a xor f(x)>|phi>
        p = p.copy()
        p[marked] = p[marked][:, ::-1, :]
        return p

    psi = oracle(psi)
    # I_N (x) CU : U on the target when the ancilla is 1
    psi[:, 1, :] = psi[:, 1, :] @ spec.u.T
    psi = oracle(psi)
    return psi


def simulate_oracle_ancilla(spec: FcgSpec, s: SimState) -> SimState:
    """FCG realised with one ancilla; returns the (control, target) state.

    Raises if the ancilla does not come back to ``|0>``.
    """
    psi = oracle_ancilla_sequence(spec, s)
    stray = float(np.sum(np.abs(psi[:, 1, :]) ** 2))
    if stray > 1e-12:
        raise ValidationError(f"ancilla left with |1> mass {stray}")
    return SimState(s.n, s.m, psi[:, 0, :].reshape(-1))


# --- Grover ------------------------------------------------------------------

def optimal_iterations(n: int, marked: int) -> int:
    """floor(pi/4 * sqrt(N / |M_f|))."""
    if marked < 1:
        raise DomainError("Grover search needs at least one marked value")
    return math.floor(math.pi / 4 * math.sqrt(2**n / marked))


def grover_states(table: TruthTable, iterations: int) -> Iterator[np.ndarray]:
    """Yield the amplitude vector before the first and after every iteration."""
    if not marked_set(table):
        raise DomainError("Grover search needs at least one marked value")
    if table.n > MAX_GROVER_WIDTH:
        raise CapacityError(f"Grover width n={table.n} exceeds cap {MAX_GROVER_WIDTH}")
    if iterations < 0:
        raise DomainError("iteration count must be non-negative")
    N = table.size
    psi = np.full(N, 1 / math.sqrt(N), dtype=np.complex128)
    flip = np.where(table.bits == 1, -1.0, 1.0)
    yield psi.copy()
    for _ in range(iterations):
        psi = psi * flip
        # 2|s><s| - I
        psi = 2 * psi.mean() - psi
        yield psi.copy()


def grover_run(table: TruthTable, iterations: int) -> np.ndarray:
    """Probability of each basis value after ``iterations`` Grover rounds."""
    *_, psi = grover_states(table, iterations)
    probs = np.abs(psi) ** 2
    if abs(probs.sum() - 1.0) > NORM_TOL:
        raise ValidationError("Grover probabilities do not sum to 1")
    return probs


# --- circuits ----------------------------------------------------------------

@dataclass(frozen=True)
class GateStep:
    name: str
    qubits: tuple[int, ...]
    matrix: ComplexMatrix | None = field(default=None, compare=False)

    def resolve(self) -> ComplexMatrix:
        return self.matrix if self.matrix is not None else standard_gate(self.name)


@dataclass(frozen=True)
class PhaseOracleStep:
    table: TruthTable
    phase: float = math.pi


Step = Union[GateStep, FcgSpec, ConditionalSpec, PhaseOracleStep]


@dataclass(frozen=True)
class Circuit:
    n: int
    m: int
    steps: tuple[Step, ...] = ()


def run_circuit(c: Circuit, initial: SimState, counter: OpCounter | None = None) -> SimState:
    """Apply the steps left to right, using block-wise paths where possible."""
    if (c.n, c.m) != (initial.n, initial.m):
        raise ShapeError(f"circuit is for n={c.n}, m={c.m}; state has n={initial.n}, m={initial.m}")
    s = initial
    for i, step in enumerate(c.steps):
        try:
            if isinstance(step, GateStep):
                s = apply_gate(step.resolve(), step.qubits, s)
            elif isinstance(step, FcgSpec):
                s = apply_fcg_blockwise(step, s, counter)
            elif isinstance(step, ConditionalSpec):
                s = apply_conditional_blockwise(step, s, counter)
            elif isinstance(step, PhaseOracleStep):
                s = apply_phase_oracle(step.table, step.phase, s, counter)
            else:
                raise ValidationError(f"unsupported step type {type(step).__name__}")
        except FcgError as exc:
            raise CircuitError(i, str(exc)) from exc
    return s
