import os
from functools import lru_cache
from dotenv import load_dotenv

load_dotenv()

class Settings:
    # App config
    PROJECT_NAME: str = "omegalab"
    VERSION: str = "1.0.0"
    DESCRIPTION: str = "Spectral determinant autocorrelation laboratory"
    LOG_LEVEL: str = os.getenv("OMEGALAB_LOG_LEVEL", "INFO").upper()

    # Parallelism and reproducibility
    THREADS: int = int(os.getenv("OMEGALAB_THREADS", "1"))
    DEFAULT_SEED: int = int(os.getenv("OMEGALAB_SEED", "0"))
    MC_BLOCK_SIZE: int = int(os.getenv("MC_BLOCK_SIZE", "4096"))

    # Numerical tolerances
    UNITARY_TOL: float = float(os.getenv("UNITARY_TOL", "1e-10"))
    READ_UNITARY_TOL: float = float(os.getenv("READ_UNITARY_TOL", "1e-8"))
    DEGENERACY_TOL: float = float(os.getenv("DEGENERACY_TOL", "1e-12"))
    EIGEN_TOL: float = float(os.getenv("EIGEN_TOL", "1e-9"))
    SELF_INVERSIVE_TOL: float = 1e-8

    # Scale caps of the brute-force routes
    NEWTON_MAX_N: int = int(os.getenv("NEWTON_MAX_N", "24"))
    FOCK_MAX_N: int = int(os.getenv("FOCK_MAX_N", "4"))
    WEYL_MAX_N: int = int(os.getenv("WEYL_MAX_N", "14"))
    WEYL_CHUNK_SIZE: int = int(os.getenv("WEYL_CHUNK_SIZE", "4096"))
    WEYL_EXACT_RATIO: float = float(os.getenv("WEYL_EXACT_RATIO", "1e6"))
    WICK_MAX_N: int = int(os.getenv("WICK_MAX_N", "3"))
    MC_MAX_N: int = int(os.getenv("MC_MAX_N", "3"))

@lru_cache()
def get_settings():
    return Settings()

settings = get_settings()
