from dotenv import load_dotenv
from pydantic import BaseModel, Field
import os

load_dotenv()

ENV_PREFIX = "CHEBSOS_"


class Settings(BaseModel):
    """Runtime defaults, overridable through ``CHEBSOS_*`` environment variables.

    A ``.env`` file in the working directory is read on import.

    Examples
    --------
    ``CHEBSOS_TIME_BUDGET=30`` lowers the per-cell budget of the Θ tables to 30 seconds.

    """

    sdp_tolerance: float = Field(1e-8, gt=0)
    """Relative primal and dual feasibility tolerance of the interior-point solver"""

    sdp_gap_tolerance: float = Field(1e-7, gt=0)
    """Relative duality gap tolerance"""

    sdp_max_iterations: int = Field(200, ge=1)

    time_budget: float = Field(120.0, gt=0)
    """Seconds allowed per Θ table cell"""

    jobs: int = Field(1, ge=1)
    """Worker processes used for table generation"""

    max_theta_nvars: int = Field(3, ge=1)
    """Largest n accepted by ``theta-table`` without ``--allow-large-n``"""

    @classmethod
    def from_env(cls) -> "Settings":
        values = {}
        for name in cls.model_fields:
            raw = os.environ.get(f"{ENV_PREFIX}{name.upper()}")
            if raw is not None:
                values[name] = raw
        return cls(**values)


def get_settings() -> Settings:
    return Settings.from_env()
