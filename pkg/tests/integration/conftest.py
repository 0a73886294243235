"""Pytest fixtures for integration tests."""

import importlib
import json
import pytest
from pathlib import Path
import sys

from typer.testing import CliRunner

# Add project root to path
project_root = Path(__file__).parent.parent.parent
sys.path.insert(0, str(project_root))

from shared.logging_setup import setup_logging


@pytest.fixture(autouse=True)
def quiet_logging(monkeypatch):
    """Keep log lines out of the captured command output."""
    monkeypatch.setattr(
        importlib.import_module("services.cli_io.app"),
        "setup_logging",
        lambda: setup_logging(log_level="CRITICAL"),
    )


@pytest.fixture
def runner():
    """CLI runner for the typer app."""
    return CliRunner()


@pytest.fixture
def problem_file(tmp_path):
    """Write a problem dictionary to a JSON file and return its path."""

    def _write(problem, name="problem.json"):
        path = tmp_path / name
        path.write_text(json.dumps(problem), encoding="utf-8")
        return path

    return _write
