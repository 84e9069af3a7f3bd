import pytest
from pydantic import ValidationError

from slowfast.config import Settings, get_settings
from slowfast.core.errors import ConfigError
from slowfast.models.settings import IntegratorConfig, RunConfig, Tolerances


def test_settings_defaults(monkeypatch):
    monkeypatch.delenv("SLOWFAST_SEED", raising=False)
    settings = Settings(_env_file=None)
    assert settings.log_level == "INFO"
    assert settings.max_workers == 4
    assert settings.seed == 0


def test_settings_read_prefixed_environment(monkeypatch):
    monkeypatch.setenv("SLOWFAST_SEED", "42")
    monkeypatch.setenv("slowfast_log_level", "DEBUG")
    get_settings.cache_clear()
    try:
        settings = get_settings()
        assert settings.seed == 42
        assert settings.log_level == "DEBUG"
        assert get_settings() is settings
    finally:
        get_settings.cache_clear()


def test_settings_reject_zero_workers():
    with pytest.raises(ValidationError):
        Settings(_env_file=None, max_workers=0)


def test_tolerance_defaults():
    tol = Tolerances()
    assert tol.tol_y == 1e-10
    assert tol.rank_tol == 1e-8
    assert tol.flux_tol == 1e-10
    assert tol.root_tol == 1e-10


def test_integrator_rtol_bounds():
    with pytest.raises(ValidationError):
        IntegratorConfig(rtol=0.1)
    with pytest.raises(ValidationError):
        IntegratorConfig(atol=0.0)


def test_run_config_round_trip(tmp_path):
    config = RunConfig(
        system="maltose_transport",
        overrides={"z0": 2.0},
        eps_list=[0.1, 0.01],
        tau0=0.5,
        T=20.0,
        seed=9,
        integrator=IntegratorConfig(method="explicit", h_init=1e-3),
    )
    path = config.write(tmp_path / "run.ini")
    assert RunConfig.read(path) == config
    assert "[parameters]" in path.read_text(encoding="utf-8")


def test_run_config_defaults_round_trip():
    config = RunConfig(system="linear_toy")
    assert RunConfig.from_ini(config.to_ini()) == config


@pytest.mark.parametrize(
    "eps_list",
    [[], [0.1, 0.1], [0.01, 0.1], [0.1, -0.01]],
)
def test_run_config_rejects_bad_eps(eps_list):
    with pytest.raises(ValidationError):
        RunConfig(system="linear_toy", eps_list=eps_list)


def test_run_config_needs_room_for_a_tail():
    with pytest.raises(ValidationError, match="T/2"):
        RunConfig(system="linear_toy", tau0=5.0, T=10.0)


def test_bad_config_files():
    with pytest.raises(ConfigError):
        RunConfig.from_ini("[tolerances]\ntol_y = 1e-9\n")
    with pytest.raises(ConfigError):
        RunConfig.from_ini("[run]\nsystem = x\neps_list = 0.1, fast\n")
    with pytest.raises(ConfigError):
        RunConfig.from_ini("[run]\nsystem = x\ntau0 = -1\n")
    with pytest.raises(ConfigError):
        RunConfig.from_ini("not an ini file")
