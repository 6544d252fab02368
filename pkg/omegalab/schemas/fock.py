from math import comb

import numpy as np
from pydantic import BaseModel, Field, model_validator


class FockBasis(BaseModel):
    """
    Base del subespacio balanceado F = Ker(F₊ − F₋) de 2N modos fermiónicos.

    Cada estado es una máscara de bits: el bit m está ocupado si el modo m lo
    está, con los modos +1..+N en las posiciones 0..N−1 y −1..−N en N..2N−1.
    """
    n: int = Field(..., ge=1)
    states: tuple[int, ...]

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _balanced(self):
        if len(self.states) != comb(2 * self.n, self.n):
            raise ValueError(f"balanced space of N={self.n} has C(2N,N) states, got {len(self.states)}")
        plus_mask = (1 << self.n) - 1
        for state in self.states:
            plus = (state & plus_mask).bit_count()
            minus = (state >> self.n).bit_count()
            if plus != minus:
                raise ValueError(f"state {state:b} is not balanced")
        return self

    @property
    def dim(self) -> int:
        return len(self.states)

    def index(self) -> dict[int, int]:
        return {state: i for i, state in enumerate(self.states)}

    def bitstring(self, state: int) -> str:
        return "".join(str((state >> m) & 1) for m in range(2 * self.n))

    def plus_numbers(self) -> np.ndarray:
        mask = (1 << self.n) - 1
        return np.array([(s & mask).bit_count() for s in self.states])

    def minus_numbers(self) -> np.ndarray:
        return np.array([(s >> self.n).bit_count() for s in self.states])


class FockOperator(BaseModel):
    """Operador sobre F, representado por su matriz en la base ``basis``."""
    basis: FockBasis
    matrix: np.ndarray

    model_config = {"arbitrary_types_allowed": True, "frozen": True}

    @model_validator(mode="after")
    def _square(self):
        if self.matrix.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"operator shape {self.matrix.shape} does not match dim F = {self.basis.dim}")
        return self
