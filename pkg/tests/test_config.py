from chebsos.config import Settings, get_settings
from chebsos.solvers import SolverOptions
import pytest


def test_defaults(monkeypatch):
    for name in Settings.model_fields:
        monkeypatch.delenv(f"CHEBSOS_{name.upper()}", raising=False)
    settings = get_settings()
    assert settings.sdp_tolerance == 1e-8
    assert settings.time_budget == 120.0
    assert settings.max_theta_nvars == 3


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv("CHEBSOS_TIME_BUDGET", "30")
    monkeypatch.setenv("CHEBSOS_SDP_TOLERANCE", "1e-6")
    settings = get_settings()
    assert settings.time_budget == 30.0
    assert SolverOptions.from_settings(settings).tolerance == 1e-6


def test_invalid_environment_value(monkeypatch):
    monkeypatch.setenv("CHEBSOS_JOBS", "0")
    with pytest.raises(ValueError):
        get_settings()
