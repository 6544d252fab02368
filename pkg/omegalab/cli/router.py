from omegalab.cli.commands import (
    average, census, crossover, fock_check, loops, mc_integral, omega, plot, saddle, verify, weyl,
)

# Registro principal de subcomandos.
# Cada módulo define register(subparsers, parents) y run(config) -> estado de salida.
COMMANDS = {
    # Ω por las rutas exactas o promediado sobre un ensemble
    "omega": omega,
    # Suma de Weyl sobre las C(2N,N) sillas
    "weyl": weyl,
    "saddle": saddle,
    "average": average,
    "crossover": crossover,
    "mc-integral": mc_integral,
    "census": census,
    "fock-check": fock_check,
    "loops": loops,
    # Batería de verificación cruzada
    "verify": verify,
    "plot": plot,
}
