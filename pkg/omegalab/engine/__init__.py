"""
Operaciones numéricas: rutas exactas de Ω, oráculos, sumas de Weyl, promedios y cruce.
Cada módulo trabaja sobre los esquemas de ``omegalab.schemas``.
"""
