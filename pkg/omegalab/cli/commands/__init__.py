"""
Subcomandos. Cada módulo expone ``register(subparsers)`` y ``run(config)``.
"""
