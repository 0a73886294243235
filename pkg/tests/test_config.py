"""Tests for configuration loading."""

import pytest

from shared.config import AppConfig, apply_overrides, get_config, reload_config


def test_config_loads_base_config():
    """Test that base configuration loads correctly."""
    config = AppConfig.load(env="dev")
    assert config.environment == "dev"
    assert config.linalg.rank_rtol == pytest.approx(1e-9)
    assert config.lp.pivot_tol == pytest.approx(1e-11)
    assert config.bounds.depth == 20


def test_config_environment_override():
    """Test that environment-specific config overrides base config."""
    config = AppConfig.load(env="dev")
    # dev.yaml should override logging format to "text"
    assert config.logging.format == "text"
    assert AppConfig.load(env="prod").logging.format == "json"


def test_get_config_singleton():
    """Test that get_config returns a singleton."""
    config1 = get_config()
    config2 = get_config()
    assert config1 is config2


def test_reload_config():
    """Test that reload_config creates a new instance."""
    config1 = get_config()
    config2 = reload_config()
    assert isinstance(config2, AppConfig)
    assert config2 is not config1


def test_schedule_sides_strictly_increasing():
    """Test that the default box sides increase strictly."""
    sides = AppConfig.load().averaging.sides
    assert all(a < b for a, b in zip(sides, sides[1:]))


def test_max_side_per_generator_count():
    """Test the box caps for one, two and many generators."""
    averaging = AppConfig.load().averaging
    assert averaging.max_side_for(1) == 65536
    assert averaging.max_side_for(2) == 1024
    assert averaging.max_side_for(5) == 64


def test_invalid_offset_rejected():
    """Test that an unknown box offset is rejected."""
    from shared.config import AveragingConfig

    with pytest.raises(ValueError):
        AveragingConfig(offset="diagonal")


def test_apply_overrides():
    """Test per-invocation overrides of tolerance and box cap."""
    reload_config()
    config = apply_overrides(rank_rtol=1e-6, max_box=12)
    assert config.linalg.rank_rtol == pytest.approx(1e-6)
    assert config.averaging.max_side_for(1) == 12
    assert config.averaging.max_side_for(3) == 12


def test_apply_overrides_rejects_nonpositive_tolerance():
    """Test that a nonpositive tolerance override is refused."""
    with pytest.raises(ValueError):
        apply_overrides(rank_rtol=0.0)


def test_invalid_yaml_value_raises_configuration_error(monkeypatch):
    """Test a bad value in the layered YAML surfaces as a ConfigurationError."""
    from shared.exceptions import ConfigurationError

    monkeypatch.setattr("shared.config._deep_merge", lambda base, override: {"averaging": {"offset": "diagonal"}})
    with pytest.raises(ConfigurationError) as excinfo:
        AppConfig.load(env="dev")
    assert excinfo.value.exit_code == 1
    assert any("offset" in message for message in excinfo.value.details["errors"])
