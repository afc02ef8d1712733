"""Function-controlled quantum gates: construction, block-wise simulation and cross-checks."""

from .gates import (
    BcgSpec,
    BlockDiagonalGate,
    ConditionalSpec,
    FcgSpec,
    bcg_matrix,
    bcg_product,
    conditional_matrix,
    fcg_matrix,
    phase_oracle_matrix,
    qit_matrix,
)
from .predicate import TruthTable, compile_truth_table, marked_set, parse
from .simulator import (
    Circuit,
    SimState,
    apply_conditional_blockwise,
    apply_fcg_blockwise,
    apply_full,
    grover_run,
    run_circuit,
    simulate_oracle_ancilla,
)

__version__ = "0.1.0"
