import os
import logging
from dataclasses import dataclass
from dotenv import load_dotenv

load_dotenv()

VERSION = "0.1.0"

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Tolerances:
    """Scale factors for the three kinds of inequality links."""
    scalar: float = 1e-12
    matrix: float = 1e-9
    loewner: float = 1e-9

    def __post_init__(self):
        for name in ("scalar", "matrix", "loewner"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} tolerance must be positive, got {value!r}")


@dataclass(frozen=True)
class Settings:
    seed: int
    trials: int
    workers: int
    tolerances: Tolerances
    log_level: str


def _env_number(name: str, default: str, kind: type):
    raw = os.getenv(name, default)
    try:
        return kind(raw)
    except ValueError:
        raise ValueError(f"{name} must be a valid {kind.__name__}, got {raw!r}")


def get_settings() -> Settings:
    """
    Read run settings from the environment (and .env, loaded at import).

    Raises ValueError if a variable is present but malformed or out of range.
    """
    seed = _env_number("LOGMEAN_SEED", "42", int)
    trials = _env_number("LOGMEAN_TRIALS", "100", int)
    workers = _env_number("LOGMEAN_WORKERS", "1", int)
    if trials < 1:
        raise ValueError(f"LOGMEAN_TRIALS must be >= 1, got {trials}")
    if workers < 1:
        raise ValueError(f"LOGMEAN_WORKERS must be >= 1, got {workers}")

    try:
        tolerances = Tolerances(
            scalar=_env_number("LOGMEAN_TOL_SCALAR", "1e-12", float),
            matrix=_env_number("LOGMEAN_TOL_MATRIX", "1e-9", float),
            loewner=_env_number("LOGMEAN_TOL_LOEWNER", "1e-9", float),
        )
    except ValueError as e:
        raise ValueError(f"LOGMEAN_TOL_*: {e}")

    log_level = os.getenv("LOGMEAN_LOG_LEVEL", "WARNING").upper()
    if log_level not in LOG_LEVELS:
        raise ValueError(f"LOGMEAN_LOG_LEVEL must be one of {', '.join(LOG_LEVELS)}, got {log_level!r}")

    return Settings(seed=seed, trials=trials, workers=workers, tolerances=tolerances, log_level=log_level)


def configure_logging(level: str | None = None) -> None:
    """Set up root logging once; later calls only adjust the level."""
    level = (level or os.getenv("LOGMEAN_LOG_LEVEL", "WARNING")).upper()
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger().setLevel(level)
    logger.debug("Logging configured at %s", level)
