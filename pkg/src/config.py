# src/config.py
from functools import lru_cache
from pydantic_settings import BaseSettings, SettingsConfigDict

class Settings(BaseSettings):
    # Simulation defaults (applied when a scenario omits them)
    DEFAULT_TOL: float = 1e-6
    DEFAULT_DT: float = 1e-3
    DEFAULT_T_MAX: float = 100.0

    # Solvability analysis settings
    DIRECTION_GRID_SIZE: int = 256
    QUADRATURE_POINTS: int = 16
    CAPTURE_TOL_T: float = 1e-3
    CAPTURE_HORIZON_FACTOR: float = 1e6 # horizon = factor * tol_T

    # Output settings
    OUTPUT_DIR: str = "out"
    CSV_FLOAT_FORMAT: str = "%.10g"

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    model_config = SettingsConfigDict(
        env_prefix="FLUIDGAME_",
        env_file=".env",
        extra="ignore"
    )

@lru_cache()
def get_settings():
    """Returns a cached instance of the Settings."""
    return Settings()
