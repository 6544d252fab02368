import numpy as np
from pydantic import BaseModel, Field, model_validator


class SubsetConfig(BaseModel):
    """
    Etiqueta de un punto de silla: S ⊂ {1..2N}, |S| = N.

    S1 = S ∩ {1..N}, S2 = {j − N : j ∈ S ∩ {N+1..2N}}, p = |S2|, r = |S1 ∩ S2|.
    """
    n: int = Field(..., ge=1)
    subset: tuple[int, ...]

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _valid_subset(self):
        if len(self.subset) != self.n or len(set(self.subset)) != self.n:
            raise ValueError(f"S must hold {self.n} distinct labels, got {self.subset}")
        if any(not 1 <= s <= 2 * self.n for s in self.subset):
            raise ValueError(f"labels must lie in 1..{2 * self.n}")
        if tuple(sorted(self.subset)) != self.subset:
            raise ValueError("labels must be sorted")
        return self

    @property
    def s1(self) -> frozenset[int]:
        return frozenset(s for s in self.subset if s <= self.n)

    @property
    def s2(self) -> frozenset[int]:
        return frozenset(s - self.n for s in self.subset if s > self.n)

    @property
    def p(self) -> int:
        return len(self.s2)

    @property
    def r(self) -> int:
        return len(self.s1 & self.s2)

    def complement(self) -> tuple[int, ...]:
        chosen = set(self.subset)
        return tuple(s for s in range(1, 2 * self.n + 1) if s not in chosen)


class PhiSpectrum(BaseModel):
    """
    Fases de diag(γD, D): φ_ν = θ_ν + x/N para ν ≤ N y φ_{ν+N} = θ_ν.

    Fuera del círculo unidad x es complejo y también lo son las fases.
    """
    phis: np.ndarray

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _even_length(self):
        if self.phis.ndim != 1 or len(self.phis) % 2:
            raise ValueError("phase spectrum needs 2N entries")
        return self

    @property
    def n(self) -> int:
        return len(self.phis) // 2

    def z(self) -> np.ndarray:
        return np.exp(1j * self.phis)
