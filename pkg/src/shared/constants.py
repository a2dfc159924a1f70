"""
Constantes compartidas por los módulos numéricos.
"""
import math

# Tolerancia absoluta para comparar tiempos (años)
TIME_ATOL = 1e-12

# Probabilidad condicional de default en cada tiempo anunciado (λ′ = 1)
ANNOUNCED_ATOM_GAMMA = 1.0 - math.exp(-1.0)

# Umbral de tres sigmas para pruebas Monte Carlo
DEFAULT_Z_THRESHOLD = 3.0

# Semilla por defecto de los ejemplos y escenarios de muestra
DEFAULT_SEED = 20240601

# Trayectorias por flujo aleatorio derivado; los bloques de trabajo se alinean a este ancho
PATHS_PER_STREAM = 1000
