import pytest

from config import JobConfig, validate_job_config
from core.decomp import DEFAULT_MAX_TOTAL_DIM
from core.errors import ContractViolationError, FieldError
from core.gridmod import Bigrade, Window


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv("GRIDMOD_CAP", raising=False)
    monkeypatch.delenv("GRIDMOD_LOG_LEVEL", raising=False)


def test_defaults():
    cfg = JobConfig.from_env()
    assert cfg.field == 2 and cfg.cap == DEFAULT_MAX_TOTAL_DIM
    assert cfg.log_level == "WARNING"
    assert cfg.grid_window() is None


def test_environment_and_overrides(monkeypatch):
    monkeypatch.setenv("GRIDMOD_CAP", "12")
    monkeypatch.setenv("GRIDMOD_LOG_LEVEL", "debug")
    cfg = JobConfig.from_env(field=101, window=(0, 0, 2, 3), seed=None)
    assert cfg.cap == 12 and cfg.log_level == "DEBUG"
    assert cfg.field == 101 and cfg.seed == 0
    assert cfg.grid_window() == Window(Bigrade(0, 0), Bigrade(2, 3))
    assert JobConfig.from_env(cap=40).cap == 40


def test_invalid_environment(monkeypatch):
    monkeypatch.setenv("GRIDMOD_CAP", "lots")
    with pytest.raises(ContractViolationError):
        JobConfig.from_env()
    monkeypatch.setenv("GRIDMOD_CAP", "")
    assert JobConfig.from_env().cap == DEFAULT_MAX_TOTAL_DIM
    monkeypatch.setenv("GRIDMOD_LOG_LEVEL", "LOUD")
    with pytest.raises(ContractViolationError):
        JobConfig.from_env()


@pytest.mark.parametrize(
    "overrides, error",
    [
        ({"field": 1}, FieldError),
        ({"field": 91}, FieldError),
        ({"window": (3, 0, 1, 1)}, ContractViolationError),
        ({"cap": 0}, ContractViolationError),
        ({"budget": -1}, ContractViolationError),
        ({"workers": 0}, ContractViolationError),
    ],
)
def test_invalid_overrides(overrides, error):
    with pytest.raises(error):
        validate_job_config(JobConfig(**overrides))
