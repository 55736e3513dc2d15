"""Exception hierarchy.

Domain and precondition failures derive from ``ValueError`` so callers that
only care about "bad input" can catch that.
"""


class MagnonAddError(Exception):
    """Base class for every error raised by this package."""


class DomainError(MagnonAddError, ValueError):
    """A parameter lies outside the domain where the model is defined."""


class AdiabaticityError(DomainError):
    """A coupling/decay ratio violates the adiabatic-elimination guard."""


class ScheduleError(DomainError):
    """The pulse schedule violates its ordering constraints."""


class SingularSteadyStateError(DomainError):
    """The steady-state denominator vanishes (unphysical parameter point)."""


class TruncationError(MagnonAddError):
    """The Fock truncation is too small for the requested state or operation."""


class InvalidStateError(MagnonAddError, ValueError):
    """A density matrix fails one of its invariants (hermiticity, trace, positivity)."""


class UndefinedQError(MagnonAddError, ArithmeticError):
    """Mandel Q requested for a state whose mean occupation is (numerically) zero."""


class NormalizationError(MagnonAddError):
    """A Wigner map does not integrate to one within tolerance."""


class ScheduleWarning(UserWarning):
    """Soft pulse-schedule or adiabaticity concern; results may be less accurate."""


class AdiabaticityWarning(UserWarning):
    """Coupling/decay ratio is inside the guard but large enough to matter."""
