# omegalab - Spectral determinant autocorrelation laboratory
# Uso: python main.py <comando> [opciones]; `python main.py --help` lista los comandos.

import sys

from omegalab.cli.main import main

if __name__ == "__main__":
    sys.exit(main())
