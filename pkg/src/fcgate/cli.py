"""Command-line front end: ``fcgate build-matrix | simulate | verify | grover``.

Exit codes: 0 ok, 1 a check failed, 2 predicate parse error, 3 validation
error, 4 I/O error, 5 circuit schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import linalg, verify
from .errors import FcgError, PredicateSyntaxError, ValidationError
from .formats import basis_state, load_circuit, load_table_file, parse_angle
from .gates import (
    BlockDiagonalGate,
    ConditionalSpec,
    FcgSpec,
    conditional_matrix,
    fcg_matrix,
    parse_gate_expr,
    phase_oracle_matrix,
)
from .predicate import TruthTable, compile_truth_table, marked_set, parse
from .simulator import SimState, grover_states, optimal_iterations, run_circuit

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_VALIDATION, EXIT_IO, EXIT_SCHEMA = 0, 1, 2, 3, 4, 5

CHECKS = ("unitary", "lemma3", "qit", "entry-formula", "ancilla", "phase-kickback", "all")


@dataclass
class CliConfig:
    command: str
    n: int | None = None
    m: int | None = None
    pred: str | None = None
    table: str | None = None
    u: str | None = None
    u_else: str | None = None
    tol: float | None = None
    seed: int = 0
    out: str | None = None
    format: str = "json"
    phase: str = "pi"
    phase_oracle: bool = False
    block: bool = False
    iters: int | None = None
    circuit: str | None = None
    input: str | None = None
    basis: int | None = None
    check: str | None = None
    matrix: str | None = None
    random: int = 0

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "CliConfig":
        known = cls.__dataclass_fields__
        return cls(**{k: v for k, v in vars(ns).items() if k in known})


# --- helpers -------------------------------------------------------------------

def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")


def _table(cfg: CliConfig) -> TruthTable:
    if (cfg.pred is None) == (cfg.table is None):
        raise ValidationError("give exactly one of --pred or --table")
    if cfg.pred is not None:
        ast = parse(cfg.pred)
        if cfg.n is None:
            raise ValidationError("--n is required with --pred")
        return compile_truth_table(ast, cfg.n)
    return load_table_file(_read(cfg.table), cfg.n)


def _operand(text: str) -> np.ndarray:
    # a path to a matrix JSON file, or a tensor expression of standard gates
    if text.endswith(".json") or Path(text).is_file():
        return linalg.matrix_from_json(_read(text))
    return parse_gate_expr(text)


def _fcg_spec(cfg: CliConfig) -> FcgSpec:
    table = _table(cfg)
    u = _operand(cfg.u or "X")
    spec = FcgSpec.of(table, u)
    if cfg.m is not None and cfg.m != spec.m:
        raise ValidationError(f"--m {cfg.m} does not match U, which acts on {spec.m} qubit(s)")
    return spec


def _load_matrix_file(path: str) -> np.ndarray:
    d = json.loads(_read(path))
    if "blocks" in d:
        return BlockDiagonalGate.from_dict(d).to_dense()
    return linalg.matrix_from_dict(d)


# --- subcommands ---------------------------------------------------------------

def cmd_build_matrix(cfg: CliConfig) -> int:
    if cfg.phase_oracle:
        mat = phase_oracle_matrix(_table(cfg), parse_angle(cfg.phase))
        gate = None
    else:
        spec = _fcg_spec(cfg)
        if cfg.u_else is not None:
            gate = conditional_matrix(ConditionalSpec(spec.n, spec.m, spec.table, spec.u, _operand(cfg.u_else)))
        else:
            gate = fcg_matrix(spec)
        mat = None if cfg.block else gate.to_dense()
    if cfg.format == "csv":
        if mat is None:
            raise ValidationError("CSV output needs the dense form; drop --block")
        _emit(linalg.matrix_to_csv(mat), cfg.out)
    elif mat is None:
        _emit(json.dumps(gate.to_dict()), cfg.out)
    else:
        _emit(linalg.matrix_to_json(mat), cfg.out)
    return EXIT_OK


def cmd_simulate(cfg: CliConfig) -> int:
    circuit, initial = load_circuit(_read(cfg.circuit))
    if cfg.basis is not None:
        initial = basis_state(circuit.n, circuit.m, cfg.basis)
    elif cfg.input is not None:
        initial = SimState.from_dict(json.loads(_read(cfg.input)))
    if initial is None:
        initial = basis_state(circuit.n, circuit.m, 0)
    final = run_circuit(circuit, initial)
    _emit(json.dumps(final.to_dict(cutoff=1e-15), indent=2), cfg.out)
    return EXIT_OK


def _specs_for_verify(cfg: CliConfig) -> list[FcgSpec]:
    if cfg.random:
        return verify.random_fcg_specs(cfg.random, seed=cfg.seed)
    return [_fcg_spec(cfg)]


def cmd_verify(cfg: CliConfig) -> int:
    check = cfg.check
    tol = 1e-9 if cfg.tol is None else cfg.tol
    reports = []
    if check == "unitary" and cfg.matrix is not None:
        reports.append(verify.check_unitary(_load_matrix_file(cfg.matrix), tol))
    else:
        names = [c for c in CHECKS if c != "all"] if check == "all" else [check]
        for spec in _specs_for_verify(cfg):
            for name in names:
                reports.append(_run_spec_check(name, spec, cfg))
    _emit(verify.reports_to_json(reports), cfg.out)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _run_spec_check(name: str, spec: FcgSpec, cfg: CliConfig):
    tol = cfg.tol
    if name == "unitary":
        return verify.check_unitary(fcg_matrix(spec).to_dense(), 1e-9 if tol is None else tol)
    if name == "lemma3":
        return verify.check_fcg_equals_bcg_product(spec, 1e-9 if tol is None else tol)
    if name == "qit":
        return verify.check_qit(spec, 1e-12 if tol is None else tol)
    if name == "entry-formula":
        if cfg.matrix is not None:
            return verify.compare_matrices("entry-formula", _load_matrix_file(cfg.matrix),
                                           verify.entry_formula_matrix(spec), 1e-15 if tol is None else tol)
        return verify.check_entry_formula(spec, 1e-15 if tol is None else tol)
    if name == "ancilla":
        return verify.check_ancilla_route(spec, 1e-9 if tol is None else tol)
    return verify.check_phase_kickback(spec.table, 1e-12 if tol is None else tol)


def cmd_grover(cfg: CliConfig) -> int:
    table = _table(cfg)
    marked = marked_set(table)
    iters = cfg.iters if cfg.iters is not None else optimal_iterations(table.n, len(marked))
    history = []
    for k, psi in enumerate(grover_states(table, iters)):
        probs = np.abs(psi) ** 2
        p_marked = float(probs[marked].sum())
        history.append({"iteration": k, "p_marked": p_marked})
        print(f"iteration {k}: P(marked) = {p_marked:.12f}", file=sys.stderr)
    report = {
        "n": table.n,
        "marked": marked,
        "iterations": iters,
        "history": history,
        "probabilities": {str(i): float(p) for i, p in enumerate(probs)},
    }
    _emit(json.dumps(report, indent=2), cfg.out)
    return EXIT_OK


# --- argument parsing ----------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, help="control register width")
    p.add_argument("--m", type=int, help="target register width (inferred from --u)")
    p.add_argument("--pred", help="control predicate over x, e.g. 'x == 3'")
    p.add_argument("--table", help="truth-table JSON file {n, bits} or {n, hex}")
    p.add_argument("--u", help="target unitary: gate expression like 'X' or 'H,H', or a matrix JSON file")
    p.add_argument("--tol", type=float, help="tolerance override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcgate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-matrix", help="write the matrix of an FCG, if-then-else gate or phase oracle")
    _common(b)
    b.add_argument("--u-else", dest="u_else", help="else-branch unitary; makes an if-then-else gate")
    b.add_argument("--phase-oracle", dest="phase_oracle", action="store_true")
    b.add_argument("--phase", default="pi", help="oracle phase: 'pi', 'pi/2', or radians")
    b.add_argument("--block", action="store_true", help="write only the non-identity blocks")

    s = sub.add_parser("simulate", help="run a circuit file")
    s.add_argument("circuit")
    _common(s)
    s.add_argument("--input", help="initial state JSON {n, m, amplitudes}")
    s.add_argument("--basis", type=int, help="start from this basis index instead")

    v = sub.add_parser("verify", help="run cross-checks")
    v.add_argument("check", choices=CHECKS)
    _common(v)
    v.add_argument("--matrix", help="matrix JSON file to check (dense or block form)")
    v.add_argument("--random", type=int, default=0, help="check this many seeded random specs instead")

    g = sub.add_parser("grover", help="Grover search with the phase oracle of a predicate")
    _common(g)
    g.add_argument("--iters", type=int, help="iterations (default floor(pi/4 sqrt(N/|M_f|)))")
    return parser


COMMANDS = {
    "build-matrix": cmd_build_matrix,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "grover": cmd_grover,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    cfg = CliConfig.from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except PredicateSyntaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except FcgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except json.JSONDecodeError as exc:
        print(f"error: bad JSON input: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
