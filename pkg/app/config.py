"""
Runtime settings for the resistive-Hamiltonian toolkit
Values are read from the environment, optionally seeded from a .env file
"""
import os
from functools import lru_cache

from dotenv import load_dotenv
from pydantic import BaseModel

load_dotenv()


class Settings(BaseModel):
    """Numeric defaults and service knobs"""
    log_level: str = "INFO"
    step: float = 1e-3
    method: str = "rk4"
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    divergence_limit: float = 1e12
    sample_count: int = 100
    sample_seed: int = 7
    exactness_tol: float = 1e-9
    max_terms: int = 1_000_000
    verify_workers: int = 4


@lru_cache()
def get_settings() -> Settings:
    """Build settings once from RESHAM_* environment variables"""
    return Settings(
        log_level=os.getenv("RESHAM_LOG_LEVEL", "INFO"),
        step=float(os.getenv("RESHAM_STEP", "1e-3")),
        method=os.getenv("RESHAM_METHOD", "rk4"),
        abs_tol=float(os.getenv("RESHAM_ABS_TOL", "1e-9")),
        rel_tol=float(os.getenv("RESHAM_REL_TOL", "1e-9")),
        divergence_limit=float(os.getenv("RESHAM_DIVERGENCE_LIMIT", "1e12")),
        sample_count=int(os.getenv("RESHAM_SAMPLE_COUNT", "100")),
        sample_seed=int(os.getenv("RESHAM_SAMPLE_SEED", "7")),
        exactness_tol=float(os.getenv("RESHAM_EXACTNESS_TOL", "1e-9")),
        max_terms=int(os.getenv("RESHAM_MAX_TERMS", "1000000")),
        verify_workers=int(os.getenv("RESHAM_VERIFY_WORKERS", "4")),
    )
