"""Exception hierarchy shared by every stage of the pipeline."""
from __future__ import annotations


class BRSTError(Exception):
    """Base class for all errors raised by brst_lab."""


class DomainError(BRSTError, ValueError):
    """An argument lies outside the domain of an operation."""


class ParityError(BRSTError):
    """An operation needed a parity-homogeneous input and got a mixed one."""


class ConfigurationError(BRSTError):
    """Invalid constraint-system data.

    ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        self.violations = list(violations or [message])
        super().__init__(message if violations is None else f"{message}: " + "; ".join(self.violations))


class NotInImageError(BRSTError):
    """The contracting homotopy was applied to a monomial with zero Koszul weight."""


class ConstructionError(BRSTError):
    """The homological perturbation loop produced an inconsistent piece."""


class RankOverflowError(ConstructionError):
    """The perturbation loop hit ``max_rank`` with a nonzero obstruction."""


class NoAdjointError(BRSTError):
    """An operator has no two-sided adjoint for the degenerate pairing."""

    def __init__(self, residual: float):
        self.residual = residual
        super().__init__(f"no two-sided adjoint (residual {residual:.3e})")


class NilpotencyError(BRSTError):
    """The quantum BRST operator does not square to zero within tolerance."""

    def __init__(self, residual: float, sector: int):
        self.residual = residual
        self.sector = sector
        super().__init__(f"||Omega^2|| = {residual:.3e}, concentrated on ghost sector {sector}")


class InvalidComplexError(BRSTError):
    """A cochain complex whose consecutive differentials do not compose to zero."""


class TheoremViolation(BRSTError):
    """A numerical finding contradicting one of the certified theorems."""
