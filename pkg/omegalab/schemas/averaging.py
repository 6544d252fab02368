from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator


class AveragingScheme(BaseModel):
    """
    Esquema de promedio aplicado a U.

    - none: sin promedio
    - basis: promedio sobre la base propia (U → VUV⁻¹, V de Haar)
    - isotropic: núcleo de calor con tiempo ϵ (``epsilon``)
    - semiclassical: e^{−iΣ t_j H_j}U con t_j gaussianos de anchura ``width``
    - ensemble: poisson o cue, ``samples`` matrices
    """
    kind: Literal["none", "basis", "isotropic", "semiclassical", "ensemble"]
    epsilon: Optional[float] = Field(None, ge=0, description="Tiempo del núcleo de calor ϵ")
    width: Optional[float] = Field(None, gt=0)
    samples: Optional[int] = Field(None, ge=1)
    generators: Optional[list[np.ndarray]] = None
    ensemble: Optional[Literal["poisson", "cue"]] = None

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _parameters_for_kind(self):
        if self.kind == "isotropic" and self.epsilon is None:
            raise ValueError("isotropic scheme needs epsilon >= 0")
        if self.kind == "semiclassical":
            if self.width is None or self.samples is None or not self.generators:
                raise ValueError("semiclassical scheme needs generators, width > 0 and samples >= 1")
            for k, h in enumerate(self.generators):
                h = np.asarray(h)
                if h.ndim != 2 or h.shape[0] != h.shape[1]:
                    raise ValueError(f"generator {k} is not square")
                if np.max(np.abs(h - h.conj().T)) > 1e-10:
                    raise ValueError(f"generator {k} is not Hermitian")
        if self.kind == "ensemble" and self.ensemble is None:
            raise ValueError("ensemble scheme needs ensemble = poisson or cue")
        return self

    def label(self) -> str:
        if self.kind == "isotropic":
            return f"isotropic(eps={self.epsilon:g})"
        if self.kind == "semiclassical":
            return f"semiclassical(width={self.width:g},samples={self.samples})"
        if self.kind == "ensemble":
            return f"ensemble({self.ensemble})"
        return self.kind


class AveragedAdjoint(BaseModel):
    """
    ⟨Ad U⟩ como matriz N²×N² sobre vec(Z) en orden por filas.

    Todo promedio de operadores Ad fija el modo uniforme vec(I) con valor propio 1
    y tiene radio espectral ≤ 1; ambas cosas se validan al construir.
    ``stderr`` es el error estándar por entrada cuando el promedio es Monte Carlo.
    """
    matrix: np.ndarray
    scheme: AveragingScheme
    stderr: Optional[np.ndarray] = None

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _uniform_mode(self):
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("averaged adjoint must be square")
        n = int(round(np.sqrt(m.shape[0])))
        if n * n != m.shape[0]:
            raise ValueError(f"dimension {m.shape[0]} is not a perfect square")
        identity = np.eye(n).reshape(-1)
        if np.max(np.abs(m @ identity - identity)) > 1e-10:
            raise ValueError("the identity matrix is not fixed by the averaged adjoint")
        radius = float(np.max(np.abs(np.linalg.eigvals(m))))
        if radius > 1 + 1e-8:
            raise ValueError(f"spectral radius {radius:.6g} exceeds 1")
        return self

    @property
    def n(self) -> int:
        return int(round(np.sqrt(self.matrix.shape[0])))

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvals(self.matrix)

    def max_stderr(self) -> Optional[float]:
        return None if self.stderr is None else float(np.max(self.stderr))
