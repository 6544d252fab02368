import numpy as np
from pydantic import BaseModel, Field, ValidationInfo, model_validator

from omegalab.core.config import settings


def unitarity_residual(entries: np.ndarray) -> float:
    n = entries.shape[0]
    return float(np.max(np.abs(entries.conj().T @ entries - np.eye(n))))


class UnitaryMatrix(BaseModel):
    """
    Matriz unitaria N×N (el mapa cuántico U) con su certificado de unitariedad.

    El residuo ‖U†U − I‖_max se calcula al construir y se guarda en ``residual``.
    La tolerancia por defecto es ``settings.UNITARY_TOL``; el lector de ficheros
    la relaja pasando ``context={"tol": ...}`` a ``model_validate``.
    """
    n: int = Field(..., ge=1, description="Dimensión N")
    entries: np.ndarray
    residual: float = Field(0.0, ge=0)

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="before")
    @classmethod
    def _certify(cls, data, info: ValidationInfo):
        if not isinstance(data, dict):
            return data
        entries = np.array(data.get("entries"), dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"matrix must be square, got shape {entries.shape}")
        n = data.get("n", entries.shape[0])
        if entries.shape[0] != n:
            raise ValueError(f"declared n={n} but matrix is {entries.shape[0]}x{entries.shape[1]}")
        tol = (info.context or {}).get("tol", settings.UNITARY_TOL)
        residual = unitarity_residual(entries)
        if residual > tol:
            raise ValueError(f"unitarity residual {residual:.3e} exceeds tolerance {tol:.1e}")
        entries.setflags(write=False)
        return {**data, "n": n, "entries": entries, "residual": residual}

    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))

    def trace(self) -> complex:
        return complex(np.trace(self.entries))


class EigenphaseSpectrum(BaseModel):
    """Ascending eigenphases in [0, 2π) plus the characteristic-polynomial residual."""
    thetas: np.ndarray
    residual: float = 0.0

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @property
    def n(self) -> int:
        return len(self.thetas)

    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.thetas)


class SecularCoefficients(BaseModel):
    """
    Coeficientes a_0..a_N de Det(1 − sU) = Σ_k s^k a_k.

    Valida a_0 = 1 y la propiedad auto-inversiva a_{N−k} = Det(−U)·conj(a_k).
    """
    a: np.ndarray
    det_u: complex

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _self_inversive(self):
        a = self.a
        if abs(a[0] - 1) > 1e-12:
            raise ValueError(f"a_0 must be 1, got {a[0]}")
        n = len(a) - 1
        det_minus_u = (-1) ** n * self.det_u
        mirror = det_minus_u * np.conj(a)[::-1]
        scale = np.maximum(1.0, np.abs(a))
        worst = float(np.max(np.abs(a - mirror) / scale))
        if worst > settings.SELF_INVERSIVE_TOL:
            raise ValueError(f"self-inversive identity violated by {worst:.3e}")
        return self

    @property
    def n(self) -> int:
        return len(self.a) - 1

    def variances(self) -> np.ndarray:
        return np.abs(self.a) ** 2


class RngStream(BaseModel):
    """Deterministic random stream: identical (seed, stream_id) reproduce identical draws."""
    seed: int = Field(..., ge=0, lt=2**64)
    stream_id: int = Field(0, ge=0, lt=2**64)

    model_config = {"frozen": True}

    def generator(self, *key: int) -> np.random.Generator:
        """Generator for this stream, or for the sub-stream ``key`` (e.g. an MC block index)."""
        seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_id, *key))
        return np.random.Generator(np.random.PCG64(seq))

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(seed=self.seed, stream_id=stream_id)
