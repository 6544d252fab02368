"""
Paquete principal de omegalab.
Contiene la configuración, los esquemas, el motor numérico, la persistencia y la línea de comandos.
"""
