"""Pushdown reachability over infinite structured data domains.

Data values ("atoms") come from a fixed homogeneous structure such as the
rationals with their order. Sets, automata and pushdown systems are given
by first-order formulas, kept in a canonical disjunction of complete
clauses, and Pre* is computed by symbolic saturation.
"""

__version__ = "0.1.0"

from .atoms import (  # noqa: E402
    BACKEND_NAMES,
    BETWEENNESS,
    CYCLIC,
    EQUALITY,
    EQUIVALENCE,
    GRAPH,
    PARTIAL_ORDER,
    TOTAL_ORDER,
    TOURNAMENT,
    AtomBackend,
    FiniteStructure,
    Vocabulary,
    WreathAtoms,
    get_backend,
)
from .automata import (  # noqa: E402
    Configuration,
    FoNfa,
    FoPds,
    FoSet,
    nfa_accepts,
    nfa_nonempty,
    orbit_count,
    product_nfa,
    validate,
)
from .errors import (  # noqa: E402
    AlphabetMismatch,
    AtomreachError,
    CapabilityUnsupported,
    InconsistentClause,
    MalformedClause,
    UnknownVariable,
    ValidationError,
    VariableMismatch,
    VocabularyMismatch,
    WidthExceeded,
)
from .formula import parse_formula  # noqa: E402
from .logic import Clause, Ldnf, Theory, fo_to_ldnf, qf_to_ldnf  # noqa: E402
from .reachability import decision_reachability, prestar_member, reach_decision  # noqa: E402
from .saturation import SaturationResult, forced, saturate  # noqa: E402
from .specfile import load, parse_spec  # noqa: E402
