from math import comb
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


def irrep_dimension(n: int, p: int) -> int:
    """dim ρ_p = C(N,p)² − C(N,p−1)²."""
    below = comb(n, p - 1) if p >= 1 else 0
    return comb(n, p) ** 2 - below ** 2


class GammaGrid(BaseModel):
    """
    Rejilla de evaluación de Ω: valores de γ complejos o valores x reales con γ = e^{ix/N}.
    """
    mode: Literal["gamma", "x"]
    points: np.ndarray

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="before")
    @classmethod
    def _typed_points(cls, data):
        if not isinstance(data, dict):
            return data
        arr = np.atleast_1d(np.asarray(data.get("points")))
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("grid needs a non-empty 1-d sequence of points")
        if data.get("mode") == "x":
            if np.iscomplexobj(arr) and np.any(np.imag(arr) != 0):
                raise ValueError("x-mode grid points must be real")
            arr = np.real(arr).astype(float)
        else:
            arr = arr.astype(complex)
            if np.any(arr == 0):
                raise ValueError("gamma = 0 is not on the evaluation domain")
        return {**data, "points": arr}

    @classmethod
    def from_x(cls, xs) -> "GammaGrid":
        return cls(mode="x", points=xs)

    @classmethod
    def from_gamma(cls, gammas) -> "GammaGrid":
        return cls(mode="gamma", points=gammas)

    @classmethod
    def x_range(cls, start: float, stop: float, steps: int) -> "GammaGrid":
        return cls(mode="x", points=np.linspace(start, stop, steps))

    def __len__(self) -> int:
        return len(self.points)

    def log_gammas(self, n: int) -> np.ndarray:
        """Principal log γ; exactly ix/N in x-mode."""
        if self.mode == "x":
            return 1j * self.points / n
        return np.log(self.points)

    def gammas(self, n: int) -> np.ndarray:
        if self.mode == "x":
            return np.exp(1j * self.points / n)
        return self.points

    def xs(self, n: int) -> np.ndarray:
        """x = −iN log γ (complex off the unit circle)."""
        if self.mode == "x":
            return self.points
        return -1j * n * np.log(self.points)

    def on_unit_circle(self) -> bool:
        if self.mode == "x":
            return True
        return bool(np.allclose(np.abs(self.points), 1.0, atol=1e-12))


class CharacterTraces(BaseModel):
    """Tr ρ_p(U), p = 0..⌊N/2⌋."""
    n: int = Field(..., ge=1)
    traces: np.ndarray

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _bounded(self):
        if len(self.traces) != self.n // 2 + 1:
            raise ValueError(f"expected {self.n // 2 + 1} traces, got {len(self.traces)}")
        if abs(self.traces[0] - 1) > 1e-8:
            raise ValueError(f"Tr rho_0 must be 1, got {self.traces[0]}")
        for p, value in enumerate(self.traces):
            dim = irrep_dimension(self.n, p)
            if abs(value) > dim + 1e-8 * max(1, dim):
                raise ValueError(f"|Tr rho_{p}| = {abs(value):.6g} exceeds dim rho_{p} = {dim}")
        return self

    def dimensions(self) -> list[int]:
        return [irrep_dimension(self.n, p) for p in range(self.n // 2 + 1)]


class CorrelatorCurve(BaseModel):
    """
    Curva Ω muestreada sobre una rejilla, con metadatos de ruta y esquema.

    Los valores físicos son ``values · e^{log_scale}``; ``log_scale`` evita
    desbordamientos en N grande (sumas binomiales, régimen de Poisson).
    """
    grid: GammaGrid
    n: int = Field(..., ge=1)
    values: np.ndarray
    route: str
    scheme: Optional[str] = None
    log_scale: float = 0.0
    stderr: Optional[np.ndarray] = None

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _aligned(self):
        if len(self.values) != len(self.grid):
            raise ValueError("values and grid differ in length")
        if self.stderr is not None and len(self.stderr) != len(self.grid):
            raise ValueError("stderr and grid differ in length")
        return self

    def scaled_values(self) -> np.ndarray:
        return self.values * np.exp(self.log_scale)

    def max_imag_ratio(self) -> float:
        scale = max(1.0, float(np.max(np.abs(self.values))))
        return float(np.max(np.abs(np.imag(self.values)))) / scale
