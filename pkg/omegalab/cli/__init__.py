"""
Línea de comandos de omegalab: un módulo por subcomando en ``commands``.
"""
