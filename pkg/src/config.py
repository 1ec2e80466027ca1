"""Process-wide defaults for the wave inverse-source toolkit."""
import os
from dataclasses import dataclass


@dataclass
class Config:
    """Runtime configuration."""

    # Solver
    cfl_max: float = float(os.getenv("WAVE_ISP_CFL_MAX", "0.9"))
    default_nx: int = int(os.getenv("WAVE_ISP_NX", "100"))

    # Experiments
    workers: int = int(os.getenv("WAVE_ISP_WORKERS", "4"))

    # Output
    log_level: str = os.getenv("WAVE_ISP_LOG_LEVEL", "WARNING")
    svg_salt: str = os.getenv("WAVE_ISP_SVG_SALT", "wave-isp")

    @classmethod
    def from_env(cls) -> "Config":
        """Load configuration from environment variables."""
        return cls()


config = Config.from_env()
