"""
Configuración central y jerarquía de excepciones.
Las variables de entorno se leen una sola vez en ``config.settings``.
"""
