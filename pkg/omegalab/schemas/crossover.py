from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator

CRITICAL_TOL = 1e-12


class CrossoverPoint(BaseModel):
    """
    Punto (N, ε) del cruce Poisson → CUE con su régimen.

    subcrítico si ε < 1, crítico si |ε − 1| ≤ 1e−12, supercrítico si ε > 1;
    en el régimen supercrítico ``y_eps`` es el máximo interior de f_ε.
    """
    n: int = Field(..., ge=1)
    eps: float = Field(..., ge=0, description="ε = Nϵ")
    regime: Literal["subcritical", "critical", "supercritical"]
    y_eps: Optional[float] = Field(None, gt=0, lt=0.5)

    @model_validator(mode="after")
    def _consistent_regime(self):
        if abs(self.eps - 1) <= CRITICAL_TOL:
            expected = "critical"
        elif self.eps < 1:
            expected = "subcritical"
        else:
            expected = "supercritical"
        if self.regime != expected:
            raise ValueError(f"eps={self.eps} belongs to the {expected} regime, not {self.regime}")
        if (self.regime == "supercritical") != (self.y_eps is not None):
            raise ValueError("y_eps is present exactly in the supercritical regime")
        return self
