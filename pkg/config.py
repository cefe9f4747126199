import logging
import os
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from errors import ConfigError

# Load environment variables
load_dotenv()

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


@dataclass(frozen=True)
class Settings:
    log_level: str
    seed: Optional[int]
    automorphism_limit: int
    default_radius: int
    default_length_bound: int
    fiber_bound: int
    sample_limit: int


def _int_setting(name: str, default: int) -> int:
    """Read a non-negative integer setting from the environment"""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigError(f"{name} must be non-negative, got {value}")
    return value


def get_settings() -> Settings:
    """Collect settings from the environment (after .env has been loaded)"""
    seed_raw = os.getenv('RAAG_SEED')
    seed = None
    if seed_raw:
        # reserved; nothing deterministic reads it
        try:
            seed = int(seed_raw)
        except ValueError:
            raise ConfigError(f"RAAG_SEED must be an integer, got {seed_raw!r}")

    level = os.getenv('RAAG_LOG_LEVEL', 'WARNING').upper()
    if level not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
        raise ConfigError(f"RAAG_LOG_LEVEL not understood: {level}")

    return Settings(
        log_level=level,
        seed=seed,
        automorphism_limit=_int_setting('RAAG_AUTOMORPHISM_LIMIT', 12),
        default_radius=_int_setting('RAAG_DEFAULT_RADIUS', 2),
        default_length_bound=_int_setting('RAAG_DEFAULT_LENGTH_BOUND', 2),
        fiber_bound=_int_setting('RAAG_FIBER_BOUND', 4),
        sample_limit=_int_setting('RAAG_SAMPLE_LIMIT', 400),
    )


def setup_logging(level: Optional[str] = None) -> None:
    """Set up logging for command-line use; stdout stays reserved for reports"""
    logging.basicConfig(
        level=getattr(logging, level or get_settings().log_level),
        format=LOG_FORMAT
    )
