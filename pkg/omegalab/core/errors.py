"""
Excepciones del dominio.

Cada error lleva un ``detail`` legible; la CLI lo imprime tal cual y sale
con estado 2.
"""


class OmegaLabError(Exception):
    """Base de todos los errores numéricos de omegalab."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class EigensolverError(OmegaLabError):
    pass


class GridPoleError(OmegaLabError):
    pass


class OracleScaleError(OmegaLabError):
    """Raised when a brute-force route is asked for a dimension above its cap."""


class LogBranchError(OmegaLabError):
    pass


class WeylPoleError(OmegaLabError):
    pass


class SaddleDegeneracyError(OmegaLabError):
    pass


class SpectralGapError(OmegaLabError):
    pass


class UndefinedAverageError(OmegaLabError):
    pass


class DomainError(OmegaLabError):
    pass


class RegimeError(OmegaLabError):
    pass


class NumericalDegeneracyError(OmegaLabError):
    pass


class StorageError(OmegaLabError):
    """Matrix/curve files that cannot be read or written."""
