"""Exception hierarchy shared by every mahlerlab module.

The CLI maps :class:`DomainError` subclasses to exit code 2 and
:class:`ConvergenceError` subclasses to exit code 3.
"""


class MahlerLabError(Exception):
    """Base class for all library errors."""


class DomainError(MahlerLabError, ValueError):
    """An argument lies outside the region where a routine is valid."""


class DegenerateLeading(DomainError):
    """Polynomial leading coefficient is numerically zero."""


class BranchAmbiguous(DomainError):
    """No unique small root for an auxiliary parameterization."""


class DegenerateCurve(DomainError):
    """Weierstrass model with vanishing discriminant."""


class BadPrime(DomainError):
    """Prime of bad reduction passed where a good prime is required."""


class LeadingVanishes(DomainError):
    """Leading y-coefficient vanishes at a quadrature node."""


class SamplerExhausted(DomainError):
    """A harness sampler could not produce enough in-domain points."""


class ConvergenceError(MahlerLabError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance."""


class BudgetExceeded(ConvergenceError):
    """Series driver hit ``max_terms`` before the tail was small enough."""


class NoConvergence(ConvergenceError):
    """Quadrature, lattice or L-series evaluation did not stabilize."""


class SignMismatch(ConvergenceError):
    """Numerical functional-equation test disagrees with the assumed sign."""


class NotImplementedIdentity(MahlerLabError, NotImplementedError):
    """Identity registered for coverage but deliberately not implemented."""
