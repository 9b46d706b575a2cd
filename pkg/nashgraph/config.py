"""
Configuration management for nashgraph.

Reads environment variables with conservative defaults; a YAML settings
file may be layered on top. All settings are immutable after construction.

Note: Using Pydantic v2 with v1 compatibility mode (@validator, Config class).
"""
import logging
import os
from pathlib import Path
from typing import Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, validator

from nashgraph.errors import ConfigError

logger = logging.getLogger(__name__)

LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')


class Settings(BaseModel):
    """Budgets and runtime knobs."""

    # Exhaustive D-set enumeration refuses graphs larger than this
    enumerate_vertex_cap: int = Field(default=24, env='NASHGRAPH_ENUMERATE_VERTEX_CAP')

    # O*/M* sweep refuses |Y^{k>0}| larger than this
    ostar_cap: int = Field(default=22, env='NASHGRAPH_OSTAR_CAP')

    # Brute-force SAT oracle variable cap
    sat_variable_cap: int = Field(default=24, env='NASHGRAPH_SAT_VARIABLE_CAP')

    # Wall-clock budget for pruned enumeration
    timeout_seconds: float = Field(default=60.0, env='NASHGRAPH_TIMEOUT_SECONDS')

    # Worker processes for embarrassingly parallel layers
    jobs: int = Field(default=1, env='NASHGRAPH_JOBS')

    # Logging
    log_level: str = Field(default='WARNING', env='NASHGRAPH_LOG_LEVEL')

    class Config:
        frozen = True
        extra = 'forbid'

    @validator('enumerate_vertex_cap', 'ostar_cap', 'sat_variable_cap')
    def validate_caps(cls, v):
        if v < 0 or v > 62:
            raise ValueError('caps must be between 0 and 62')
        return v

    @validator('timeout_seconds')
    def validate_timeout(cls, v):
        if v <= 0:
            raise ValueError('timeout must be positive')
        return v

    @validator('jobs')
    def validate_jobs(cls, v):
        if v < 1:
            raise ValueError('jobs must be at least 1')
        return v

    @validator('log_level')
    def validate_log_level(cls, v):
        v = v.strip().upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"log level must be one of {', '.join(LOG_LEVELS)}")
        return v

    def budgets(self) -> dict:
        """Budget fields as a plain dict, for reports."""
        return {
            'enumerate_vertex_cap': self.enumerate_vertex_cap,
            'ostar_cap': self.ostar_cap,
            'sat_variable_cap': self.sat_variable_cap,
            'timeout_seconds': self.timeout_seconds,
            'jobs': self.jobs,
        }


def get_settings() -> Settings:
    """
    Get settings from environment.

    Returns:
        Settings object with configuration

    Raises:
        ConfigError: If an environment value is malformed
    """
    try:
        return Settings(
            enumerate_vertex_cap=int(os.getenv('NASHGRAPH_ENUMERATE_VERTEX_CAP', '24')),
            ostar_cap=int(os.getenv('NASHGRAPH_OSTAR_CAP', '22')),
            sat_variable_cap=int(os.getenv('NASHGRAPH_SAT_VARIABLE_CAP', '24')),
            timeout_seconds=float(os.getenv('NASHGRAPH_TIMEOUT_SECONDS', '60')),
            jobs=int(os.getenv('NASHGRAPH_JOBS', '1')),
            log_level=os.getenv('NASHGRAPH_LOG_LEVEL', 'WARNING'),
        )
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"Invalid environment settings: {e}")


def load_settings_file(path: str, base: Optional[Settings] = None) -> Settings:
    """
    Overlay a YAML settings file on top of existing settings.

    Args:
        path: Path to a YAML mapping whose keys are Settings field names
        base: Settings to start from (default: environment)

    Returns:
        Merged Settings

    Raises:
        ConfigError: If the file is missing, not a mapping, or invalid
    """
    base = base or get_settings()
    config_path = Path(path)

    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except FileNotFoundError:
        raise ConfigError(f"Settings file not found: {config_path}")
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {config_path}: {e}")

    if data is None:
        return base
    if not isinstance(data, dict):
        raise ConfigError(f"Settings file {config_path} must contain a mapping")

    merged = base.model_dump()
    merged.update(data)

    try:
        settings = Settings(**merged)
    except ValidationError as e:
        raise ConfigError(f"Invalid settings in {config_path}: {e}")

    logger.debug(f"Loaded settings overrides from {config_path}: {sorted(data)}")
    return settings
