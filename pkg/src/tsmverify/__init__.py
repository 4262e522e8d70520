"""Train binary Tsetlin Machines and verify them with SAT.

A trained machine is encoded exactly as a propositional formula; robustness,
equivalence and similarity questions become satisfiability queries answered by
an embedded CDCL solver or an external DIMACS solver.
"""

from .encode import classify_via_sat, encode_tsm
from .errors import (
    BudgetExceeded,
    DataFormatError,
    EncodingError,
    EvaluationError,
    InputError,
    ModelFormatError,
    ProtocolError,
    SolverLaunchError,
    TsmError,
)
from .solver import get_solver, solve_embedded, solve_external
from .tm import (
    BitInput,
    Literal,
    Monomial,
    TrainConfig,
    TsmModel,
    classify,
    load_model,
    save_model,
    train,
    vote_margin,
)
from .verify import (
    Result,
    Verdict,
    check_equivalence,
    check_robust,
    check_similar,
    check_universal_robust,
    check_universal_similar,
)

__version__ = "0.1.0"
