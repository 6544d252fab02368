"""
Tipos del dominio definidos con Pydantic.
Los validadores hacen cumplir los invariantes (unitariedad, formas, rangos de índices).
"""
