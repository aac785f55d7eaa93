"""Exception hierarchy shared by every atomreach module."""


class AtomreachError(Exception):
    """Base class for all atomreach errors."""


class VocabularyMismatch(AtomreachError):
    """A structure, literal or formula uses a relation the backend does not know."""


class CapabilityUnsupported(AtomreachError):
    """The backend has no concrete model for the requested operation."""


class WidthExceeded(AtomreachError):
    """A normalization call needs more variables than the configured budget."""

    def __init__(self, width, budget, what="formula"):
        super().__init__(f"{what} needs {width} variables, width budget is {budget}")
        self.width = width
        self.budget = budget


class MalformedClause(AtomreachError):
    """A clause is not complete or mentions unknown variables."""


class InconsistentClause(AtomreachError):
    """A complete clause whose equality literals do not induce a congruence."""


class UnknownVariable(AtomreachError):
    """A variable is referenced that is not in scope."""


class VariableMismatch(AtomreachError):
    """Two ldnfs over different variable lists were combined."""


class AlphabetMismatch(AtomreachError):
    """Automata over different alphabets were combined."""


class ValidationError(AtomreachError):
    """A (PDS, NFA) pair violates the saturation preconditions."""

    def __init__(self, report):
        lines = "\n".join(f"  - {v}" for v in report.violations)
        super().__init__(f"validation failed:\n{lines}")
        self.report = report
