"""Cross-checks between independent formulations of the same gate.

The index arithmetic here is written out again on purpose rather than
borrowed from :mod:`fcgate.gates`, so a mistake in one place cannot hide a
mistake in the other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import CapacityError, ShapeError
from .gates import FcgSpec, bcg_product, bcgs_for, fcg_matrix, qit_matrix, phase_oracle_matrix
from .linalg import ComplexMatrix
from .predicate import TruthTable, marked_set

MAX_CHECK_DIM = 2**12


@dataclass(frozen=True)
class VerificationReport:
    check: str
    passed: bool
    max_deviation: float
    witness: tuple[int, ...] | None = None

    def __post_init__(self):
        if not self.passed and self.witness is None:
            raise ValueError("a failing report needs a witness")

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {
            "check": self.check,
            "pass": self.passed,
            "max_deviation": self.max_deviation,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def reports_to_json(reports: Sequence[VerificationReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2)


def compare_matrices(check: str, a: np.ndarray, b: np.ndarray, tol: float) -> VerificationReport:
    if a.shape != b.shape:
        raise ShapeError(f"{check}: cannot compare shapes {a.shape} and {b.shape}")
    dev = np.abs(a - b)
    flat = int(np.argmax(dev))
    worst = float(dev.reshape(-1)[flat])
    where = tuple(int(k) for k in np.unravel_index(flat, dev.shape))
    passed = worst <= tol
    return VerificationReport(check, passed, worst, None if passed else where)


def _size_guard(dim: int, check: str):
    if dim > MAX_CHECK_DIM:
        raise CapacityError(f"{check}: dim {dim} exceeds verification cap {MAX_CHECK_DIM}")


def check_unitary(g: ComplexMatrix, tol: float = 1e-9) -> VerificationReport:
    """Pass iff every entry of ``G^dagger G - I`` is at most ``tol`` in magnitude."""
    g = linalg.as_matrix(g)
    if g.shape[0] != g.shape[1]:
        raise ShapeError(f"unitarity check needs a square matrix, got {g.shape[0]}x{g.shape[1]}")
    return compare_matrices("unitary", g.conj().T @ g, np.eye(g.shape[0]), tol)


def check_equivalence(a: ComplexMatrix, b: ComplexMatrix, tol: float = 1e-10,
                      up_to_global_phase: bool = False) -> VerificationReport:
    """Entrywise comparison, optionally after removing a global phase from ``b``.

    The phase is pinned at the largest-magnitude entry of ``a``.
    """
    a, b = linalg.as_matrix(a), linalg.as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"cannot compare {a.shape[0]}x{a.shape[1]} with {b.shape[0]}x{b.shape[1]}")
    name = "equivalence-up-to-phase" if up_to_global_phase else "equivalence"
    if up_to_global_phase:
        pivot = np.unravel_index(int(np.argmax(np.abs(a))), a.shape)
        ref, other = a[pivot], b[pivot]
        if abs(ref) > 0.0 and abs(other) > 0.0:
            b = b * ((ref / abs(ref)) / (other / abs(other)))
    return compare_matrices(name, a, b, tol)


def entry_formula_matrix(spec: FcgSpec) -> ComplexMatrix:
    """Dense FCG evaluated entry by entry from its closed form.

    For ``i, j`` both in ``[yM, (y+1)M)``:
    ``delta_ij + f(y) * (U[i - yM, j - yM] - delta_ij)``; zero elsewhere.
    """
    M = spec.u.shape[0]
    dim = spec.table.size * M
    ii, jj = np.indices((dim, dim))
    yi, yj = ii // M, jj // M
    same_block = yi == yj
    delta = (ii == jj).astype(np.complex128)
    f = spec.table.bits.astype(np.float64)[yi]
    u_entry = spec.u[ii - yi * M, np.where(same_block, jj - yi * M, 0)]
    return np.where(same_block, delta + f * (u_entry - delta), 0.0)


def check_entry_formula(spec: FcgSpec, tol: float = 1e-15) -> VerificationReport:
    dim = spec.table.size * spec.u.shape[0]
    _size_guard(dim, "entry-formula")
    return compare_matrices("entry-formula", fcg_matrix(spec).to_dense(), entry_formula_matrix(spec), tol)


def check_fcg_equals_bcg_product(spec: FcgSpec, tol: float = 1e-9,
                                 order: Iterable[int] | str | None = None) -> VerificationReport:
    """Compare the FCG with the product of one BCG per marked value.

    ``order`` may be ``None``/``"ascending"``, ``"descending"``, or an explicit
    permutation of the marked values.
    """
    dim = spec.table.size * spec.u.shape[0]
    _size_guard(dim, "lemma3")
    ys = marked_set(spec.table)
    if order is None or order == "ascending":
        seq = ys
    elif order == "descending":
        seq = ys[::-1]
    else:
        seq = list(order)
        if sorted(seq) != ys:
            raise ValueError("order must be a permutation of the marked set")
    product = bcg_product(bcgs_for(spec, seq), n=spec.n, m=spec.m)
    return compare_matrices("lemma3", fcg_matrix(spec).to_dense(), product, tol)


def check_qit(spec: FcgSpec, tol: float = 1e-12) -> VerificationReport:
    _size_guard(spec.table.size * spec.u.shape[0], "qit")
    return compare_matrices("qit", fcg_matrix(spec).to_dense(), qit_matrix(spec.table, spec.u), tol)


def ancilla_route_matrix(spec: FcgSpec) -> ComplexMatrix:
    """``(O_f (x) I_M)(I_N (x) CU)(O_f (x) I_M)`` on ``|x>|a>|phi>``, dense, dim ``2NM``."""
    N, M = spec.table.size, spec.u.shape[0]
    oracle = np.zeros((2 * N, 2 * N), dtype=np.complex128)
    for x in range(N):
        fx = int(spec.table.bits[x])
        for a in (0, 1):
            oracle[2 * x + (a ^ fx), 2 * x + a] = 1.0
    p0 = np.diag([1.0, 0.0]).astype(np.complex128)
    p1 = np.diag([0.0, 1.0]).astype(np.complex128)
    cu = np.kron(p0, np.eye(M)) + np.kron(p1, spec.u)
    o_full = np.kron(oracle, np.eye(M))
    cu_full = np.kron(np.eye(N), cu)
    return o_full @ cu_full @ o_full


def ancilla_sector(big: ComplexMatrix, N: int, M: int) -> ComplexMatrix:
    """Rows and columns of ``big`` whose ancilla bit is 0."""
    idx = np.array([(2 * x) * M + s for x in range(N) for s in range(M)])
    return big[np.ix_(idx, idx)]


def check_ancilla_route(spec: FcgSpec, tol: float = 1e-9) -> VerificationReport:
    """The ancilla-oracle construction, restricted to ancilla ``|0>``, equals the FCG."""
    N, M = spec.table.size, spec.u.shape[0]
    _size_guard(2 * N * M, "ancilla")
    big = ancilla_route_matrix(spec)
    sector = ancilla_sector(big, N, M)
    return compare_matrices("ancilla", fcg_matrix(spec).to_dense(), sector, tol)


def check_phase_kickback(table: TruthTable, tol: float = 1e-12) -> VerificationReport:
    """FCG with U = X on ``|x>|->`` must equal ``G_f|x> (x) |->`` for every basis x."""
    N = table.size
    _size_guard(2 * N, "phase-kickback")
    minus = np.array([1.0, -1.0], dtype=np.complex128) / np.sqrt(2)
    fcg = fcg_matrix(FcgSpec(table.n, 1, table, np.array([[0, 1], [1, 0]]))).to_dense()
    g = phase_oracle_matrix(table, np.pi)
    worst, witness = 0.0, (0,)
    for x in range(N):
        ket = np.zeros(N, dtype=np.complex128)
        ket[x] = 1.0
        lhs = fcg @ np.kron(ket, minus)
        rhs = np.kron(g @ ket, minus)
        dev = float(np.max(np.abs(lhs - rhs)))
        if dev > worst:
            worst, witness = dev, (x,)
    passed = worst <= tol
    return VerificationReport("phase-kickback", passed, worst, None if passed else witness)


# --- random instances ----------------------------------------------------------

def random_table(n: int, rng: np.random.Generator) -> TruthTable:
    return TruthTable(n, rng.integers(0, 2, size=2**n))


def random_fcg_spec(rng: np.random.Generator, n_range=(1, 4), m_range=(1, 3)) -> FcgSpec:
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    return FcgSpec(n, m, random_table(n, rng), linalg.random_unitary(2**m, rng))


def random_fcg_specs(count: int, seed: int = 0, n_range=(1, 4), m_range=(1, 3)) -> list[FcgSpec]:
    rng = np.random.default_rng(seed)
    return [random_fcg_spec(rng, n_range, m_range) for _ in range(count)]
