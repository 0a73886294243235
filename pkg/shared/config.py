"""Configuration loading and management using pydantic-settings."""

import os
from enum import Enum
from pathlib import Path
from typing import Optional, List

import yaml
from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from shared.exceptions import ConfigurationError


class BoxOffset(str, Enum):
    """Exponent range of the Følner box of side N."""

    TRANSLATED = "translated"  # {N+1..2N}^k
    PLAIN = "plain"  # {1..N}^k
    UNITAL = "unital"  # {0..N-1}^k


class ScheduleKind(str, Enum):
    """Named families of box sides."""

    COMPOSITE = "composite"
    DYADIC = "dyadic"


BOX_OFFSETS = tuple(offset.value for offset in BoxOffset)

SCHEDULE_SIDES = {
    # Highly composite sides so that periodic orbits average exactly.
    ScheduleKind.COMPOSITE: [2, 6, 12, 60, 120, 360, 720, 2520, 5040, 55440],
    ScheduleKind.DYADIC: [2**j for j in range(1, 17)],
}


class LinalgConfig(BaseSettings):
    """Dense kernel tolerances."""

    rank_rtol: float = 1e-9
    hermitian_tol: float = 1e-10
    sqrt_tol: float = 1e-9
    consistency_tol: float = 1e-9
    max_condition: float = 1e12

    model_config = SettingsConfigDict(extra="allow")

    @field_validator("rank_rtol")
    @classmethod
    def validate_rank_rtol(cls, v: float) -> float:
        """Rank tolerance must be strictly positive."""
        if v <= 0:
            raise ValueError("rank_rtol must be > 0")
        return v


class LPConfig(BaseSettings):
    """Phase-1 simplex configuration."""

    pivot_tol: float = 1e-11
    feasibility_tol: float = 1e-9
    certificate_margin: float = 1e-9
    max_pivot_factor: int = 50

    model_config = SettingsConfigDict(extra="allow")


class AveragingConfig(BaseSettings):
    """Folner box averaging configuration."""

    sides: List[int] = Field(default_factory=lambda: list(SCHEDULE_SIDES[ScheduleKind.COMPOSITE]))
    max_side_one_generator: int = 65536
    max_side_two_generators: int = 1024
    max_side_many_generators: int = 64
    rel_tol: float = 1e-10
    divergence_limit: float = 1e12
    growth_factor: float = 1e6
    offset: str = "translated"

    model_config = SettingsConfigDict(extra="allow")

    @field_validator("offset")
    @classmethod
    def validate_offset(cls, v: str) -> str:
        """Box offset must be one of the supported modes."""
        if v not in BOX_OFFSETS:
            raise ValueError(f"offset must be one of {BOX_OFFSETS}, got {v!r}")
        return v

    def max_side_for(self, generators: int) -> int:
        """
        Cap on the box side for a given number of generators.

        Args:
            generators: Number of commuting generators k

        Returns:
            Largest admissible box side
        """
        if generators <= 1:
            return self.max_side_one_generator
        if generators == 2:
            return self.max_side_two_generators
        return self.max_side_many_generators


class BoundsConfig(BaseSettings):
    """Word-enumeration bound estimation."""

    depth: int = 20
    stabilization_tol: float = 1e-6
    singular_condition: float = 1e12

    model_config = SettingsConfigDict(extra="allow")


class ProjectionConfig(BaseSettings):
    """Commuting projection and descent configuration."""

    restarts: int = 20
    restart_seed: int = 20240601
    max_sweeps: int = 200
    route_tol: float = 1e-7
    residual_tol: float = 1e-8
    invariance_tol: float = 1e-9

    model_config = SettingsConfigDict(extra="allow")


class RenormConfig(BaseSettings):
    """Invariant norm configuration."""

    mesh_size: int = 64
    mesh_seed: int = 64
    scalar_max_side: int = 360

    model_config = SettingsConfigDict(extra="allow")


class EnlargeConfig(BaseSettings):
    """Signed-word bound propagation configuration."""

    max_words: int = 100_000
    mesh_size: int = 32
    mesh_seed: int = 32

    model_config = SettingsConfigDict(extra="allow")


class LoggingConfig(BaseSettings):
    """Logging configuration."""

    level: str = "INFO"
    format: str = "json"  # "json" or "text"
    service_name: str = "amenable-fixpoints"

    model_config = SettingsConfigDict(extra="allow")


class PerformanceConfig(BaseSettings):
    """Performance configuration."""

    max_workers: int = 4

    model_config = SettingsConfigDict(extra="allow")


class AppConfig(BaseSettings):
    """Main application configuration."""

    environment: str = Field(default="dev", alias="ENVIRONMENT")
    linalg: LinalgConfig = Field(default_factory=LinalgConfig)
    lp: LPConfig = Field(default_factory=LPConfig)
    averaging: AveragingConfig = Field(default_factory=AveragingConfig)
    bounds: BoundsConfig = Field(default_factory=BoundsConfig)
    projection: ProjectionConfig = Field(default_factory=ProjectionConfig)
    renorm: RenormConfig = Field(default_factory=RenormConfig)
    enlarge: EnlargeConfig = Field(default_factory=EnlargeConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    performance: PerformanceConfig = Field(default_factory=PerformanceConfig)

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_nested_delimiter="__",
        extra="allow",
    )

    @classmethod
    def load(cls, env: Optional[str] = None) -> "AppConfig":
        """
        Load configuration from YAML files and environment variables.

        Configuration hierarchy (highest priority first):
        1. Environment variables
        2. {env}.yaml (e.g., dev.yaml, prod.yaml)
        3. config.yaml (base config)

        Args:
            env: Environment name (dev, prod). If None, uses ENVIRONMENT env var.

        Returns:
            AppConfig instance with loaded configuration.
        """
        if env is None:
            env = os.getenv("ENVIRONMENT", "dev")

        config_dir = Path(__file__).parent.parent / "config"

        base_config_path = config_dir / "config.yaml"
        base_config = {}
        if base_config_path.exists():
            with open(base_config_path, "r", encoding="utf-8") as f:
                base_config = yaml.safe_load(f) or {}

        env_config_path = config_dir / f"{env}.yaml"
        env_config = {}
        if env_config_path.exists():
            with open(env_config_path, "r", encoding="utf-8") as f:
                env_config = yaml.safe_load(f) or {}

        merged_config = _deep_merge(base_config, env_config)

        try:
            return cls(**merged_config, environment=env)
        except ValidationError as e:
            messages = [f"{'.'.join(map(str, err['loc']))}: {err['msg']}" for err in e.errors()]
            raise ConfigurationError(f"invalid configuration for {env!r}", {"errors": messages}) from e


def _deep_merge(base: dict, override: dict) -> dict:
    """Deep merge two dictionaries, with override taking precedence."""
    result = base.copy()
    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _deep_merge(result[key], value)
        else:
            result[key] = value
    return result


# Global config instance (lazy loaded)
_config: Optional[AppConfig] = None


def get_config(env: Optional[str] = None) -> AppConfig:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = AppConfig.load(env)
    return _config


def reload_config(env: Optional[str] = None) -> AppConfig:
    """Reload the global configuration."""
    global _config
    _config = AppConfig.load(env)
    return _config


def apply_overrides(
    rank_rtol: Optional[float] = None,
    max_box: Optional[int] = None,
    box_offset: Optional[str] = None,
    schedule: Optional[str] = None,
) -> AppConfig:
    """
    Apply per-invocation overrides coming from the command line.

    Args:
        rank_rtol: Replacement rank tolerance for the dense kernel
        max_box: Upper cap on every Folner box side
        box_offset: Box exponent range (translated, plain or unital)
        schedule: Named family of box sides (composite or dyadic)

    Returns:
        The updated global configuration.
    """
    config = get_config()
    if rank_rtol is not None:
        if rank_rtol <= 0:
            raise ValueError("rank tolerance must be > 0")
        config.linalg.rank_rtol = rank_rtol
    if box_offset is not None:
        config.averaging.offset = BoxOffset(box_offset).value
    if schedule is not None:
        config.averaging.sides = list(SCHEDULE_SIDES[ScheduleKind(schedule)])
    if max_box is not None:
        if max_box < 1:
            raise ValueError("max box side must be >= 1")
        averaging = config.averaging
        averaging.max_side_one_generator = min(averaging.max_side_one_generator, max_box)
        averaging.max_side_two_generators = min(averaging.max_side_two_generators, max_box)
        averaging.max_side_many_generators = min(averaging.max_side_many_generators, max_box)
        config.renorm.scalar_max_side = min(config.renorm.scalar_max_side, max_box)
    return config
