"""Exception hierarchy shared by all subsystems.

Exit-code mapping used by the CLI:
  InputError -> 2, BudgetError -> 3, SearchExhausted -> 4.
"""


class HypcertError(Exception):
    pass


class InputError(HypcertError):
    """Malformed or out-of-domain input (bad point, unreduced word, y <= 0...)."""


class PreconditionError(HypcertError):
    """A documented precondition of an operation does not hold."""


class DomainError(HypcertError):
    """Operation applied to an isometry/configuration of the wrong kind."""


class ElementaryPairError(DomainError):
    """Two isometries share boundary data; no ping-pong configuration exists."""


class AmbiguityError(HypcertError):
    """Two independent classification routes disagree; carries both diagnostics."""

    def __init__(self, message, trace_diag=None, orbit_diag=None):
        super().__init__(message)
        self.trace_diag = trace_diag
        self.orbit_diag = orbit_diag


class BudgetError(HypcertError):
    """A configured work cap was exceeded; may carry a partial/fallback result."""

    def __init__(self, message, fallback=None, reached=None):
        super().__init__(message)
        self.fallback = fallback
        self.reached = reached


class SearchExhausted(HypcertError):
    """Bounded search finished without a witness; carries the search stats."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}
