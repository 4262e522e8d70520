from .cnf import Cnf, parse_solver_output, read_dimacs, tseitin, to_cnf, write_dimacs
from .counter import at_most, seq_counter
from .formula import (
    FALSE,
    TRUE,
    And,
    Const,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Var,
    VarPool,
    conj,
    evaluate,
    iter_nodes,
    simplify,
    substitute,
    variables,
)

__all__ = [
    "And", "Cnf", "Const", "FALSE", "Formula", "Iff", "Implies", "Not", "Or", "TRUE",
    "Var", "VarPool", "at_most", "conj", "evaluate", "iter_nodes", "parse_solver_output",
    "read_dimacs", "seq_counter", "simplify", "substitute", "to_cnf", "tseitin",
    "variables", "write_dimacs",
]
