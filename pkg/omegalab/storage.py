"""
Persistencia de omegalab: matrices en JSON y curvas/tablas en CSV o JSON.

Formato de matriz: {"n": int, "re": [[...]], "im": [[...]]} por filas. Los
flotantes se escriben con su representación más corta exacta, de modo que
escribir y volver a leer reproduce las entradas bit a bit.
"""
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ValidationError, model_validator

from omegalab.core.config import settings
from omegalab.core.errors import StorageError
from omegalab.engine.unitary import make_unitary
from omegalab.schemas.curve import CorrelatorCurve
from omegalab.schemas.matrix import UnitaryMatrix
from omegalab.schemas.run import CurveRecord, TableRecord

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ["x_or_gamma_re", "gamma_im", "omega_re", "omega_im", "route", "scheme"]


class MatrixFile(BaseModel):
    """Contenido de un fichero de matriz: partes real e imaginaria por filas."""
    n: int
    re: list[list[float]]
    im: list[list[float]]

    @model_validator(mode="after")
    def _square(self):
        for name, rows in (("re", self.re), ("im", self.im)):
            if len(rows) != self.n or any(len(row) != self.n for row in rows):
                raise ValueError(f"'{name}' must be an {self.n}x{self.n} array of rows")
        return self

    def entries(self) -> np.ndarray:
        entries = np.empty((self.n, self.n), dtype=complex)
        entries.real = self.re
        entries.imag = self.im
        return entries

    @classmethod
    def from_entries(cls, entries: np.ndarray) -> "MatrixFile":
        entries = np.asarray(entries, dtype=complex)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise StorageError(f"only square matrices can be stored, got shape {entries.shape}")
        return cls(n=entries.shape[0], re=entries.real.tolist(), im=entries.imag.tolist())


def _load_json(path: Path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise StorageError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise StorageError(f"{path} is not valid JSON: {exc}") from exc


def _matrix_file(payload: Any, path: Path) -> MatrixFile:
    try:
        return MatrixFile.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise StorageError(f"{path}: {first['msg']}") from exc


def read_matrix(path: Path, tol: Optional[float] = None) -> UnitaryMatrix:
    """
    Lee una matriz unitaria del formato JSON.

    Args:
        path: fichero {"n", "re", "im"}.
        tol: tolerancia del residuo de unitariedad; por defecto ``settings.READ_UNITARY_TOL``.

    Raises:
        StorageError: si el fichero no existe, no es JSON, no es cuadrado o no es unitario.
    """
    record = _matrix_file(_load_json(path), path)
    tol = settings.READ_UNITARY_TOL if tol is None else tol
    try:
        matrix = make_unitary(record.entries(), tol=tol)
    except ValidationError as exc:
        raise StorageError(f"{path}: {exc.errors()[0]['msg']} (use --unitary-tol to relax)") from exc
    logger.debug("read %dx%d matrix from %s (residual %.2e)", matrix.n, matrix.n, path, matrix.residual)
    return matrix


def write_matrix(matrix: UnitaryMatrix | np.ndarray, path: Path) -> None:
    entries = matrix.entries if isinstance(matrix, UnitaryMatrix) else matrix
    record = MatrixFile.from_entries(entries)
    # json escribe los flotantes con repr, que es exacto al releer
    Path(path).write_text(json.dumps(record.model_dump()))


def read_generators(path: Path) -> list[np.ndarray]:
    """Lista de matrices hermíticas en el formato de matriz (sin exigir unitariedad)."""
    payload = _load_json(path)
    if not isinstance(payload, list) or not payload:
        raise StorageError(f"{path}: expected a non-empty JSON list of matrices")
    return [_matrix_file(item, path).entries() for item in payload]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _plain(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise StorageError(f"cannot write {path}: {exc}") from exc
    logger.info("wrote %s", path)


def table_csv(columns: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def curve_rows(curve: CorrelatorCurve) -> list[list[Any]]:
    """
    Filas del CSV de curva con valores físicos (``values · e^{log_scale}``).

    En modo x la primera columna es x y ``gamma_im`` queda vacía.
    """
    values = curve.scaled_values()
    rows = []
    for point, value in zip(curve.grid.points, values):
        if curve.grid.mode == "x":
            first, second = float(point), None
        else:
            first, second = float(point.real), float(point.imag)
        rows.append([first, second, float(value.real), float(value.imag), curve.route, curve.scheme])
    return rows


def curve_record(curve: CorrelatorCurve, command: str, metadata: Optional[dict] = None) -> CurveRecord:
    points = np.asarray(curve.grid.points)
    return CurveRecord(
        command=command,
        n=curve.n,
        route=curve.route,
        scheme=curve.scheme,
        grid_mode=curve.grid.mode,
        points_re=np.real(points).tolist(),
        points_im=np.imag(points).tolist() if curve.grid.mode == "gamma" else [0.0] * len(points),
        omega_re=np.real(curve.values).tolist(),
        omega_im=np.imag(curve.values).tolist(),
        log_scale=curve.log_scale,
        stderr=None if curve.stderr is None else np.asarray(curve.stderr, dtype=float).tolist(),
        metadata={k: _plain(v) for k, v in (metadata or {}).items()},
    )


def write_curve(curve: CorrelatorCurve, path: Optional[Path], fmt: str = "csv", command: str = "omega",
                metadata: Optional[dict] = None) -> None:
    """CSV con cabecera fija o JSON con metadatos; sin ``path`` se escribe en stdout."""
    if fmt == "json":
        _emit(curve_record(curve, command, metadata).model_dump_json(indent=2) + "\n", path)
    else:
        with np.errstate(over="ignore"):
            overflow = not np.all(np.isfinite(curve.scaled_values())) and np.all(np.isfinite(curve.values))
        if overflow:
            raise StorageError(f"Omega exceeds double precision at N={curve.n} (log scale {curve.log_scale:.1f}); "
                               "use --format json, which keeps values and log_scale apart")
        _emit(table_csv(CURVE_COLUMNS, curve_rows(curve)), path)


def write_table(columns: Sequence[str], rows: Sequence[Sequence[Any]], path: Optional[Path], fmt: str = "csv",
                command: str = "", metadata: Optional[dict] = None) -> None:
    if fmt == "json":
        record = TableRecord(
            command=command,
            columns=list(columns),
            rows=[[_plain(v) for v in row] for row in rows],
            metadata={k: _plain(v) for k, v in (metadata or {}).items()},
        )
        _emit(record.model_dump_json(indent=2) + "\n", path)
    else:
        _emit(table_csv(columns, rows), path)


def read_csv_header(path: Path) -> list[str]:
    try:
        with open(path, newline="") as handle:
            return next(csv.reader(handle), [])
    except FileNotFoundError as exc:
        raise StorageError(f"file not found: {path}") from exc


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    """Cabecera y filas (como texto) de un CSV de omegalab."""
    try:
        with open(path, newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, [])
            return header, [row for row in reader]
    except FileNotFoundError as exc:
        raise StorageError(f"file not found: {path}") from exc
