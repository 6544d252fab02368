"""
Punto de entrada de la línea de comandos.

Los errores numéricos (OmegaLabError) y los de validación (pydantic) se
imprimen en stderr con su detalle y terminan con estado 2.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from omegalab.cli.dependencies import scheme_from_args
from omegalab.cli.router import COMMANDS
from omegalab.core.config import settings
from omegalab.core.errors import OmegaLabError
from omegalab.schemas.run import RunConfig

logger = logging.getLogger(__name__)

_SCHEME_KEYS = ("scheme", "epsilon", "width", "generators")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    common.add_argument("--threads", type=int, help=f"worker threads (default {settings.THREADS})")

    parser = argparse.ArgumentParser(prog=settings.PROJECT_NAME, description=settings.DESCRIPTION)
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in COMMANDS.values():
        module.register(subparsers, [common])
    return parser


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    Convierte los argumentos en un RunConfig validado.

    Los campos comunes van a sus atributos; el resto de opciones propias de
    cada subcomando queda en ``options``.
    """
    values = vars(args).copy()
    values.pop("verbose", None)
    scheme = scheme_from_args(args)
    for key in _SCHEME_KEYS:
        values.pop(key, None)
    common = {key: values.pop(key) for key in list(values) if key in RunConfig.model_fields}
    return RunConfig(**common, scheme=scheme, options=values)


def _validation_detail(exc: ValidationError) -> str:
    error = exc.errors()[0]
    location = ".".join(str(part) for part in error["loc"])
    message = error["msg"].removeprefix("Value error, ")
    return f"{location}: {message}" if location else message


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = build_config(args)
        if config.threads is not None:
            settings.THREADS = config.threads
        return COMMANDS[config.command].run(config)
    except ValidationError as exc:
        print(f"error: {_validation_detail(exc)}", file=sys.stderr)
    except OmegaLabError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 2
