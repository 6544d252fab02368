from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from omegalab.schemas.averaging import AveragingScheme
from omegalab.schemas.curve import GammaGrid

Command = Literal[
    "omega", "weyl", "saddle", "average", "crossover", "mc-integral",
    "census", "fock-check", "loops", "verify", "plot",
]

# comandos que trabajan sobre una matriz (o un ensemble) concreta
SOURCE_COMMANDS = {"omega", "weyl", "saddle", "average", "mc-integral", "loops"}
GRID_COMMANDS = {"omega", "weyl", "saddle", "average", "crossover", "mc-integral", "loops"}
SIZE_COMMANDS = {"crossover", "census", "fock-check"}


class MapSpec(BaseModel):
    """
    Mapa cuántico predefinido: ``fourier`` o ``kicked:k1,k2,...``.
    """
    kind: Literal["fourier", "kicked"]
    kicks: list[float] = Field(default_factory=list)

    @model_validator(mode="after")
    def _kicks_for_kind(self):
        if self.kind == "kicked" and not self.kicks:
            raise ValueError("kicked map needs at least one kick strength, e.g. kicked:0.3,0.1")
        if self.kind == "fourier" and self.kicks:
            raise ValueError("fourier map takes no kick strengths")
        return self

    @classmethod
    def parse(cls, text: str) -> "MapSpec":
        kind, _, rest = text.partition(":")
        kicks = [float(k) for k in rest.split(",") if k.strip()] if rest else []
        return cls(kind=kind.strip(), kicks=kicks)


class RunConfig(BaseModel):
    """
    Configuración validada de una ejecución de la CLI.

    Exactamente una fuente de matriz (fichero, ensemble o mapa predefinido)
    para los comandos que la usan; la semilla es obligatoria en cuanto
    interviene el azar (Monte Carlo o una matriz sorteada de un ensemble).
    """
    command: Command
    matrix_file: Optional[Path] = None
    ensemble: Optional[Literal["cue", "poisson"]] = None
    builtin_map: Optional[MapSpec] = None
    n: Optional[int] = Field(None, ge=1)
    unitary_tol: Optional[float] = Field(None, gt=0)
    grid: Optional[GammaGrid] = None
    scheme: Optional[AveragingScheme] = None
    samples: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = Field(None, ge=0, lt=2**64)
    output: Optional[Path] = None
    format: Literal["csv", "json"] = "csv"
    threads: Optional[int] = Field(None, ge=1)
    options: dict[str, Any] = Field(default_factory=dict)

    model_config = {"arbitrary_types_allowed": True}

    def sources(self) -> list[str]:
        named = {
            "--input": self.matrix_file,
            "--ensemble": self.ensemble,
            "--map": self.builtin_map,
        }
        return [flag for flag, value in named.items() if value is not None]

    def ensemble_average(self) -> bool:
        """True when ``--ensemble`` means averaging over the ensemble, not one draw from it."""
        if self.ensemble is None:
            return False
        if self.command == "omega":
            return True
        return self.command == "average" and self.scheme is not None and self.scheme.kind == "ensemble"

    def uses_randomness(self) -> bool:
        if self.command in {"mc-integral", "verify"}:
            return True
        if self.samples is not None:
            return True
        if self.scheme is not None and (self.scheme.kind == "semiclassical" or self.scheme.samples is not None):
            return True
        return self.ensemble is not None and not self.ensemble_average()

    @model_validator(mode="after")
    def _consistent(self):
        sources = self.sources()
        if len(sources) > 1:
            raise ValueError(f"exactly one matrix source is allowed, got {' and '.join(sources)}")
        if self.command in SOURCE_COMMANDS and not sources:
            raise ValueError(f"'{self.command}' needs a matrix source: --input FILE, --ensemble KIND or --map SPEC")
        if self.command not in SOURCE_COMMANDS and sources:
            raise ValueError(f"'{self.command}' takes no matrix source")
        if (self.ensemble or self.builtin_map) and self.n is None:
            raise ValueError("--n is required with --ensemble and --map")
        if self.command in SIZE_COMMANDS and self.n is None:
            raise ValueError(f"'{self.command}' needs --n")
        if self.command in GRID_COMMANDS and self.grid is None:
            raise ValueError(f"'{self.command}' needs a grid: --x a:b:steps or --gamma values")
        if self.uses_randomness() and self.seed is None:
            raise ValueError("this run draws random samples; pass --seed for reproducibility")
        return self


class CurveRecord(BaseModel):
    """Salida JSON de una curva: valores, rejilla y metadatos completos."""
    command: str
    n: int
    route: str
    scheme: Optional[str] = None
    grid_mode: Literal["gamma", "x"]
    points_re: list[float]
    points_im: list[float]
    omega_re: list[float]
    omega_im: list[float]
    log_scale: float = 0.0
    stderr: Optional[list[float]] = None
    metadata: dict[str, Any] = Field(default_factory=dict)


class TableRecord(BaseModel):
    """Salida JSON de una tabla (censo, términos de Weyl, sillas, Monte Carlo...)."""
    command: str
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict[str, Any] = Field(default_factory=dict)
