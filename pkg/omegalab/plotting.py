"""
Generación de scripts de matplotlib para las curvas escritas por la CLI.

El script resultante es autónomo: lee los CSV por ruta relativa a su propia
ubicación y no importa omegalab.
"""
import logging
import os
from pathlib import Path
from typing import Sequence

from omegalab.core.errors import StorageError
from omegalab.storage import CURVE_COLUMNS, read_csv_header

logger = logging.getLogger(__name__)

CROSSOVER_HEADER = ["x", "exact", "asymptotic", "ratio", "log_scale"]

_PRELUDE = '''"""Plot of omegalab curves."""
import csv
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent
STYLE = {style!r}
FILES = {files!r}


def load(name):
    with open(HERE / name, newline="") as handle:
        return list(csv.DictReader(handle))


def column(rows, key):
    return [float(row[key]) if row[key] else float("nan") for row in rows]


def label(rows, name):
    route, scheme = rows[0].get("route", ""), rows[0].get("scheme", "")
    return f"{{route}} {{scheme}}".strip() or name


plt.style.use(STYLE)
fig, ax = plt.subplots(figsize=(7, 4.5))
'''

_CURVES = '''
curves = [load(name) for name in FILES]
for name, rows in zip(FILES, curves):
    ax.plot(column(rows, "x_or_gamma_re"), column(rows, "omega_re"), label=label(rows, name))
ax.set_xlabel("x" if not curves[0][0]["gamma_im"] else "Re gamma")
ax.set_ylabel("Omega")
'''

_CURVE_RATIO = '''
first, second = column(curves[0], "omega_re"), column(curves[1], "omega_re")
inset = ax.inset_axes([0.58, 0.58, 0.38, 0.36])
inset.plot(column(curves[0], "x_or_gamma_re"), [a / b if b else float("nan") for a, b in zip(first, second)])
inset.set_title("ratio", fontsize=8)
'''

_CROSSOVER = '''
rows = load(FILES[0])
xs = column(rows, "x")
ax.plot(xs, column(rows, "exact"), label="exact")
if rows[0]["asymptotic"]:
    ax.plot(xs, column(rows, "asymptotic"), "--", label="asymptotic")
    inset = ax.inset_axes([0.58, 0.58, 0.38, 0.36])
    inset.plot(xs, column(rows, "ratio"))
    inset.set_title("exact / asymptotic", fontsize=8)
ax.set_xlabel("x")
ax.set_ylabel("Omega / exp(log_scale)")
'''

_FINISH = '''
ax.axhline(0.0, color="0.6", linewidth=0.6)
ax.legend(fontsize=8, loc="lower left")
fig.tight_layout()
fig.savefig(HERE / {figure!r}, dpi=150)
plt.show()
'''


def _check_style(style: str) -> None:
    import matplotlib.style

    if style != "default" and style not in matplotlib.style.available:
        raise StorageError(f"unknown matplotlib style {style!r}")


def emit_plotscript(curve_files: Sequence[Path], style: str = "default", output: Path = Path("plot_omega.py")) -> Path:
    """
    Escribe un script de matplotlib para los CSV dados.

    Un CSV de curva da un panel; varios se superponen y, si son exactamente
    dos (p. ej. exacta y asintótica), se añade un recuadro con su cociente. Un
    CSV del comando crossover con la columna asintótica se dibuja igual.

    Raises:
        StorageError: lista vacía, ficheros inexistentes o cabeceras desconocidas.
    """
    if not curve_files:
        raise StorageError("no curve files given to plot")
    paths = [Path(f) for f in curve_files]
    missing = [str(p) for p in paths if not p.is_file()]
    if missing:
        raise StorageError(f"missing curve files: {', '.join(missing)}")
    _check_style(style)

    output = Path(output)
    base = output.resolve().parent
    headers = [read_csv_header(p) for p in paths]
    relative = [os.path.relpath(p.resolve(), base) for p in paths]

    if headers[0] == CROSSOVER_HEADER:
        if len(paths) != 1:
            raise StorageError("a crossover CSV is plotted on its own")
        body = _CROSSOVER
    elif all(h == CURVE_COLUMNS for h in headers):
        body = _CURVES + (_CURVE_RATIO if len(paths) == 2 else "")
    else:
        unknown = [str(p) for p, h in zip(paths, headers) if h not in (CURVE_COLUMNS, CROSSOVER_HEADER)]
        if not unknown:
            raise StorageError("a crossover CSV is plotted on its own")
        raise StorageError(f"not an omegalab curve CSV: {', '.join(unknown)}")

    script = (_PRELUDE.format(style=style, files=relative) + body
              + _FINISH.format(figure=output.with_suffix(".png").name))
    output.write_text(script)
    logger.info("plot script %s for %d file(s)", output, len(paths))
    return output
