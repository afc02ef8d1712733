"""Dense complex matrix helpers.

Matrices and state vectors are plain ``numpy`` arrays of dtype ``complex128``.
Kronecker products put the left operand on the high-order index, so
``kron(|x>, |y>) == |xy>``.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np
import numpy.typing as npt

from .errors import CapacityError, ShapeError, ValidationError

ComplexMatrix = npt.NDArray[np.complex128]

# total entries allowed in any dense matrix we build
MAX_DENSE_ENTRIES = 2**24

GOLDEN_TOL = 1e-10
COMPOSITION_TOL = 1e-9


def as_matrix(a: Any) -> ComplexMatrix:
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.size == 0:
        raise ShapeError(f"expected a non-empty 2-d matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValidationError("matrix contains NaN or infinite entries")
    return m


def identity(dim: int) -> ComplexMatrix:
    return np.eye(dim, dtype=np.complex128)


def is_power_of_two(k: int) -> bool:
    return k > 0 and (k & (k - 1)) == 0


def num_qubits(dim: int) -> int:
    if not is_power_of_two(dim):
        raise ShapeError(f"dimension {dim} is not a power of two")
    return dim.bit_length() - 1


def matmul(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return a @ b


def kron(a: ComplexMatrix, b: ComplexMatrix, cap: int = MAX_DENSE_ENTRIES) -> ComplexMatrix:
    a, b = as_matrix(a), as_matrix(b)
    entries = a.size * b.size
    if entries > cap:
        raise CapacityError(f"kron result would hold {entries} entries (cap {cap})")
    return np.kron(a, b)


def kron_all(*factors: ComplexMatrix) -> ComplexMatrix:
    out = as_matrix(factors[0])
    for f in factors[1:]:
        out = kron(out, f)
    return out


def adjoint(a: ComplexMatrix) -> ComplexMatrix:
    return as_matrix(a).conj().T


def max_abs_diff(a: ComplexMatrix, b: ComplexMatrix) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise ShapeError(f"cannot compare {a.shape[0]}x{a.shape[1]} with {b.shape[0]}x{b.shape[1]}")
    return float(np.max(np.abs(a - b)))


def approx_equal(a: ComplexMatrix, b: ComplexMatrix, tol: float = GOLDEN_TOL) -> bool:
    """True iff the largest entrywise absolute difference is at most ``tol``."""
    return max_abs_diff(a, b) <= tol


def is_unitary(u: ComplexMatrix, tol: float = GOLDEN_TOL) -> bool:
    u = as_matrix(u)
    if u.shape[0] != u.shape[1]:
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


def random_unitary(dim: int, rng: np.random.Generator) -> ComplexMatrix:
    """Haar-distributed unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_matrix(rows: int, cols: int, rng: np.random.Generator) -> ComplexMatrix:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


# --- serialization -----------------------------------------------------------

def matrix_to_dict(a: ComplexMatrix) -> dict:
    a = as_matrix(a)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_dict(d: dict) -> ComplexMatrix:
    try:
        rows, cols, entries = int(d["rows"]), int(d["cols"]), d["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"malformed matrix object: {exc}") from exc
    if rows <= 0 or cols <= 0:
        raise ShapeError(f"matrix dims must be positive, got {rows}x{cols}")
    if len(entries) != rows * cols:
        raise ShapeError(f"expected {rows * cols} entries for {rows}x{cols}, got {len(entries)}")
    arr = np.array([complex(re, im) for re, im in entries], dtype=np.complex128)
    return as_matrix(arr.reshape(rows, cols))


def matrix_to_json(a: ComplexMatrix) -> str:
    # json emits repr() floats, the shortest string that round-trips bit-exactly
    return json.dumps(matrix_to_dict(a))


def matrix_from_json(text: str) -> ComplexMatrix:
    return matrix_from_dict(json.loads(text))


def _fmt_complex(z: complex) -> str:
    im = repr(float(z.imag))
    if not im.startswith("-"):
        im = "+" + im
    return f"{float(z.real)!r}{im}j"


def matrix_to_csv(a: ComplexMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in as_matrix(a):
        writer.writerow(_fmt_complex(z) for z in row)
    return buf.getvalue()


def matrix_from_csv(text: str) -> ComplexMatrix:
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    try:
        data = [[complex(cell.strip()) for cell in row] for row in rows]
    except ValueError as exc:
        raise ValidationError(f"bad complex literal in CSV: {exc}") from exc
    if len({len(r) for r in data}) != 1:
        raise ShapeError("ragged CSV matrix")
    return as_matrix(data)
