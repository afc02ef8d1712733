"""Gate constructions: BCGs, FCGs, the QIT form, phase oracles and if-then-else gates.

Index convention used everywhere in this package: the control register is the
high-order part of a basis index and the target register the low-order part,
so control value ``x`` and target value ``s`` sit at flat index ``x * M + s``
with ``M = 2**m``. Within a register, qubit 0 is the most significant bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import CapacityError, DomainError, ShapeError, ValidationError
from .linalg import ComplexMatrix
from .predicate import TruthTable, marked_set

UNITARY_TOL = 1e-10
# bcg_product is a verification oracle; keep its dense products small
MAX_PRODUCT_DIM = 2**12

_S2 = 1 / np.sqrt(2)

STANDARD_GATES: dict[str, ComplexMatrix] = {
    "I": np.array([[1, 0], [0, 1]], dtype=np.complex128),
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.array([[1, 0], [0, -1]], dtype=np.complex128),
    "H": np.array([[_S2, _S2], [_S2, -_S2]], dtype=np.complex128),
    "CX": np.array(
        [[1, 0, 0, 0],
         [0, 1, 0, 0],
         [0, 0, 0, 1],
         [0, 0, 1, 0]], dtype=np.complex128),
    "CCX": np.eye(8, dtype=np.complex128)[[0, 1, 2, 3, 4, 5, 7, 6]],
}
STANDARD_GATES["CNOT"] = STANDARD_GATES["CX"]
STANDARD_GATES["TOFFOLI"] = STANDARD_GATES["CCX"]
for _g in STANDARD_GATES.values():
    _g.flags.writeable = False

I = STANDARD_GATES["I"]
X = STANDARD_GATES["X"]
H = STANDARD_GATES["H"]
CX = STANDARD_GATES["CX"]
CCX = STANDARD_GATES["CCX"]


def standard_gate(name: str) -> ComplexMatrix:
    try:
        return STANDARD_GATES[name.upper()]
    except KeyError:
        raise ValidationError(
            f"unknown gate {name!r}; known: {', '.join(sorted(STANDARD_GATES))}"
        ) from None


def parse_gate_expr(text: str) -> ComplexMatrix:
    """Build a matrix from a tensor expression such as ``"X"``, ``"H,H"`` or ``"H^2,X"``.

    Comma-separated factors are tensored left to right; ``G^k`` repeats ``G``
    ``k`` times.
    """
    factors = []
    for part in text.replace("⊗", ",").split(","):
        part = part.strip()
        if not part:
            raise ValidationError(f"empty factor in gate expression {text!r}")
        name, _, power = part.partition("^")
        reps = 1
        if power:
            try:
                reps = int(power)
            except ValueError:
                raise ValidationError(f"bad tensor power in {part!r}") from None
            if reps < 1:
                raise ValidationError(f"tensor power must be positive in {part!r}")
        factors.extend([standard_gate(name.strip())] * reps)
    return linalg.kron_all(*factors)


def _check_unitary(u: ComplexMatrix, what: str) -> ComplexMatrix:
    u = linalg.as_matrix(u)
    if u.shape[0] != u.shape[1]:
        raise ShapeError(f"{what} must be square, got {u.shape[0]}x{u.shape[1]}")
    linalg.num_qubits(u.shape[0])
    if not linalg.is_unitary(u, UNITARY_TOL):
        raise ValidationError(f"{what} is not unitary within {UNITARY_TOL}")
    u = u.copy()
    u.flags.writeable = False
    return u


def _check_target(u: ComplexMatrix, m: int, what: str):
    if u.shape[0] != 2**m:
        raise ShapeError(f"{what} has dim {u.shape[0]}, target register needs {2**m}")


# --- specs -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class BcgSpec:
    n: int
    m: int
    y: int
    u: ComplexMatrix

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError(f"register widths must be positive, got n={self.n}, m={self.m}")
        if not 0 <= self.y < 2**self.n:
            raise DomainError(f"control value y={self.y} outside [0, {2**self.n})")
        object.__setattr__(self, "u", _check_unitary(self.u, "U"))
        _check_target(self.u, self.m, "U")


@dataclass(frozen=True, eq=False)
class FcgSpec:
    n: int
    m: int
    table: TruthTable
    u: ComplexMatrix

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError(f"register widths must be positive, got n={self.n}, m={self.m}")
        if self.table.n != self.n:
            raise ShapeError(f"truth table has width {self.table.n}, control register has {self.n}")
        object.__setattr__(self, "u", _check_unitary(self.u, "U"))
        _check_target(self.u, self.m, "U")

    @classmethod
    def of(cls, table: TruthTable, u: ComplexMatrix) -> "FcgSpec":
        u = linalg.as_matrix(u)
        return cls(table.n, linalg.num_qubits(u.shape[0]), table, u)


@dataclass(frozen=True, eq=False)
class ConditionalSpec:
    n: int
    m: int
    table: TruthTable
    u_then: ComplexMatrix
    u_else: ComplexMatrix

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValidationError(f"register widths must be positive, got n={self.n}, m={self.m}")
        if self.table.n != self.n:
            raise ShapeError(f"truth table has width {self.table.n}, control register has {self.n}")
        object.__setattr__(self, "u_then", _check_unitary(self.u_then, "then-branch"))
        object.__setattr__(self, "u_else", _check_unitary(self.u_else, "else-branch"))
        _check_target(self.u_then, self.m, "then-branch")
        _check_target(self.u_else, self.m, "else-branch")


@dataclass(frozen=True, eq=False)
class BlockDiagonalGate:
    """Block-diagonal gate on ``n`` control and ``m`` target qubits.

    Only blocks that differ from ``default`` (identity unless stated) are
    stored; block ``y`` occupies flat indices ``[y*M, (y+1)*M)``.
    """

    n: int
    m: int
    blocks: Mapping[int, ComplexMatrix]
    default: ComplexMatrix | None = field(default=None)

    @property
    def N(self) -> int:
        return 2**self.n

    @property
    def M(self) -> int:
        return 2**self.m

    @property
    def dim(self) -> int:
        return self.N * self.M

    def block(self, y: int) -> ComplexMatrix:
        if not 0 <= y < self.N:
            raise DomainError(f"block index {y} outside [0, {self.N})")
        if y in self.blocks:
            return self.blocks[y]
        return linalg.identity(self.M) if self.default is None else self.default

    def to_dense(self) -> ComplexMatrix:
        dim = self.dim
        if dim * dim > linalg.MAX_DENSE_ENTRIES:
            raise CapacityError(f"dense form would hold {dim * dim} entries (cap {linalg.MAX_DENSE_ENTRIES})")
        M = self.M
        out = np.zeros((dim, dim), dtype=np.complex128)
        if self.default is None:
            out[np.diag_indices(dim)] = 1.0
        else:
            for y in range(self.N):
                out[y * M:(y + 1) * M, y * M:(y + 1) * M] = self.default
        for y, b in self.blocks.items():
            out[y * M:(y + 1) * M, y * M:(y + 1) * M] = b
        return out

    def to_dict(self) -> dict:
        d = {
            "n": self.n,
            "m": self.m,
            "blocks": {str(y): linalg.matrix_to_dict(b) for y, b in sorted(self.blocks.items())},
        }
        if self.default is not None:
            d["default"] = linalg.matrix_to_dict(self.default)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "BlockDiagonalGate":
        try:
            n, m = int(d["n"]), int(d["m"])
            blocks = {int(y): linalg.matrix_from_dict(b) for y, b in d["blocks"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ValidationError(f"malformed block-diagonal object: {exc}") from exc
        default = linalg.matrix_from_dict(d["default"]) if d.get("default") is not None else None
        for y, b in blocks.items():
            if not 0 <= y < 2**n:
                raise DomainError(f"block index {y} outside [0, {2**n})")
            if b.shape != (2**m, 2**m):
                raise ShapeError(f"block {y} has shape {b.shape}, expected {(2**m, 2**m)}")
        return cls(n, m, blocks, default)


# --- constructions -----------------------------------------------------------

def bcg_matrix(spec: BcgSpec) -> BlockDiagonalGate:
    """Binary controlled gate: U on the target iff the control value equals y."""
    return BlockDiagonalGate(spec.n, spec.m, {spec.y: spec.u})


def fcg_matrix(spec: FcgSpec) -> BlockDiagonalGate:
    """Function controlled gate: block y is U where f(y) = 1 and I_M elsewhere."""
    return BlockDiagonalGate(spec.n, spec.m, {y: spec.u for y in marked_set(spec.table)})


def conditional_matrix(spec: ConditionalSpec) -> BlockDiagonalGate:
    """If-then-else gate: block y is ``u_then`` where f(y) = 1, ``u_else`` otherwise."""
    if linalg.approx_equal(spec.u_else, linalg.identity(2**spec.m), 0.0):
        return BlockDiagonalGate(spec.n, spec.m, {y: spec.u_then for y in marked_set(spec.table)})
    unmarked = np.flatnonzero(spec.table.bits == 0).tolist()
    marked = marked_set(spec.table)
    # store whichever branch is the minority explicitly
    if len(marked) <= len(unmarked):
        return BlockDiagonalGate(spec.n, spec.m, {y: spec.u_then for y in marked}, default=spec.u_else)
    return BlockDiagonalGate(spec.n, spec.m, {y: spec.u_else for y in unmarked}, default=spec.u_then)


def qit_matrix(table: TruthTable, u: ComplexMatrix) -> ComplexMatrix:
    """Dense ``F (x) U + (I_N - F) (x) I_M`` with ``F = diag(f)``."""
    u = _check_unitary(u, "U")
    F = np.diag(table.bits.astype(np.complex128))
    eye_n = linalg.identity(table.size)
    eye_m = linalg.identity(u.shape[0])
    return linalg.kron(F, u) + linalg.kron(eye_n - F, eye_m)


def phase_oracle_matrix(table: TruthTable, phase: float = np.pi) -> ComplexMatrix:
    """Diagonal N x N oracle: ``e^{i phase}`` on marked values, 1 elsewhere.

    ``phase = pi`` gives exactly ``(-1)**f(y)`` on the diagonal.
    """
    diag = np.ones(table.size, dtype=np.complex128)
    diag[table.bits == 1] = phase_factor(phase)
    return np.diag(diag)


def phase_factor(phase: float) -> complex:
    # exact values at multiples of pi/2 so that G_f is exactly (-1)^f
    quarter = phase / (np.pi / 2)
    k = round(quarter)
    if abs(quarter - k) < 1e-15:
        return (1, 1j, -1, -1j)[k % 4]
    return complex(np.exp(1j * phase))


def bcg_dense(spec: BcgSpec) -> ComplexMatrix:
    """Dense CU_y: identity except the y-th diagonal M x M block."""
    M = 2**spec.m
    dim = 2**spec.n * M
    out = linalg.identity(dim)
    out[spec.y * M:(spec.y + 1) * M, spec.y * M:(spec.y + 1) * M] = spec.u
    return out


def bcg_product(specs: Sequence[BcgSpec], n: int | None = None, m: int | None = None) -> ComplexMatrix:
    """Dense product ``CU_{y1} . CU_{y2} ...`` in the given order.

    With an empty sequence pass ``n`` and ``m`` to size the identity.
    """
    specs = list(specs)
    if not specs:
        if n is None or m is None:
            raise ValidationError("empty BCG product needs explicit n and m")
        return linalg.identity(2**n * 2**m)
    n0, m0, u0 = specs[0].n, specs[0].m, specs[0].u
    seen: set[int] = set()
    for s in specs:
        if (s.n, s.m) != (n0, m0) or not np.array_equal(s.u, u0):
            raise ValidationError("all BCGs in a product must share n, m and U")
        if s.y in seen:
            raise DomainError(f"duplicate control value y={s.y} in BCG product")
        seen.add(s.y)
    dim = 2**n0 * 2**m0
    if dim > MAX_PRODUCT_DIM:
        raise CapacityError(f"BCG product dim {dim} exceeds cap {MAX_PRODUCT_DIM}")
    out = bcg_dense(specs[0])
    for s in specs[1:]:
        out = linalg.matmul(out, bcg_dense(s))
    return out


def bcgs_for(spec: FcgSpec, order: Iterable[int] | None = None) -> list[BcgSpec]:
    """One BCG per marked value, in ascending order unless ``order`` is given."""
    ys = marked_set(spec.table) if order is None else list(order)
    return [BcgSpec(spec.n, spec.m, y, spec.u) for y in ys]
