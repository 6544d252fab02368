from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class GrassmannPoint(BaseModel):
    """
    Punto de ℳ_N en coordenada estereográfica Z = g₁₂·g₂₂⁻¹, con g de Haar en U(2N).
    """
    z: np.ndarray
    source: Optional[np.ndarray] = None

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _square(self):
        if self.z.ndim != 2 or self.z.shape[0] != self.z.shape[1]:
            raise ValueError(f"Z must be square, got shape {self.z.shape}")
        if self.source is not None and self.source.shape != (2 * self.n, 2 * self.n):
            raise ValueError("source must be a 2N x 2N unitary")
        return self

    @property
    def n(self) -> int:
        return self.z.shape[0]


class McEstimate(BaseModel):
    """Estimación Monte Carlo con su error estándar."""
    estimate: complex
    stderr: float = Field(..., ge=0)
    samples: int = Field(..., ge=1)

    def z_score(self, exact: complex) -> float:
        if self.stderr == 0:
            return 0.0 if self.estimate == exact else float("inf")
        return abs(self.estimate - exact) / self.stderr


class ManifoldClass(BaseModel):
    """Subvariedad crítica ℳ_(p,r): volumen y número de puntos de silla que contiene."""
    p: int = Field(..., ge=0)
    r: int = Field(..., ge=0)
    volume: float = Field(..., gt=0)
    points: int = Field(..., ge=1)


class ManifoldCensus(BaseModel):
    n: int = Field(..., ge=1)
    classes: list[ManifoldClass]

    @property
    def count(self) -> int:
        return len(self.classes)

    @property
    def total_points(self) -> int:
        return sum(c.points for c in self.classes)
