"""
Exception hierarchy for the resistive-Hamiltonian toolkit
"""
from typing import Optional


class ResistiveHamiltonianError(Exception):
    """Base class for every error raised by the toolkit"""


class PolyError(ResistiveHamiltonianError):
    """Malformed polynomial text, unbound symbols or illegal polynomial operations"""

    def __init__(self, message: str, position: Optional[int] = None, symbol: Optional[str] = None):
        if position is not None:
            message = f"parse error at position {position}: {message}"
        super().__init__(message)
        self.position = position
        self.symbol = symbol


class StructureError(ResistiveHamiltonianError):
    """A matrix does not have the structure an operation requires"""


class NotPoissonError(ResistiveHamiltonianError):
    """A Poisson vector fails the Jacobi identity"""

    def __init__(self, message: str, residual=None):
        super().__init__(message)
        self.residual = residual


class SourceTermError(ResistiveHamiltonianError):
    """An identity that assumes no external port was applied to a system with a source"""


class UnknownSystemError(ResistiveHamiltonianError):
    """Requested system is not in the registry"""


class UnknownChannelError(ResistiveHamiltonianError):
    """Requested trajectory channel does not exist"""


class IntegrationError(ResistiveHamiltonianError):
    """Invalid integrator configuration"""
