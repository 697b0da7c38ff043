import json
import logging

import pytest

from spectral_boltzmann.config import RunConfig, config_from_dict, parse_config
from spectral_boltzmann.errors import ConfigError


def test_defaults():
    config = RunConfig()
    assert config.grid.N == 48
    assert config.collision.g_tr == 8.0
    assert config.collision.project is True
    assert config.integrator.kind == "ab4"
    grid = config.build_grid()
    assert (grid.L, grid.N) == (10.0, 48)
    derived = config.derived()
    assert derived["nyquist_ok"] is True
    assert derived["nyquist_ratio"] == pytest.approx(1.25)


def test_aliases_and_collision_params():
    config = config_from_dict({"collision": {"lambda": 1.0, "Btilde": 0.5, "g_tr": 4.0}})
    params = config.collision_params()
    assert (params.lam, params.btilde, params.g_tr) == (1.0, 0.5, 4.0)
    dumped = config.model_dump(by_alias=True)
    assert dumped["collision"]["lambda"] == 1.0
    assert config_from_dict(dumped) == config


@pytest.mark.parametrize(
    "data",
    [
        {"grid": {"N": 47}},
        {"grid": {"N": 4}},
        {"grid": {"L": -1.0}},
        {"grid": {"spacing": 0.1}},
        {"collision": {"lambda": 2.0}},
        {"scenario": {"name": "vortex"}},
        {"integrator": {"kind": "leapfrog"}},
        {"integrator": {"t0": 2.0, "t_final": 1.0}},
        {"integrator": {"dt": 2.0, "t0": 0.0, "t_final": 1.0}},
        {"outputs": {"slices": ["w"]}},
        {"advisor": {"method": "III"}},
        {"extra": {}},
    ],
)
def test_invalid_configurations(data):
    with pytest.raises(ConfigError):
        config_from_dict(data)


def test_nyquist_warning(caplog):
    with caplog.at_level(logging.WARNING, logger="spectral_boltzmann.config"):
        config = config_from_dict({"collision": {"g_tr": 12.0}})
    assert config.derived()["nyquist_ok"] is False
    assert any("cannot resolve" in record.getMessage() for record in caplog.records)


def test_output_times():
    config = config_from_dict({"outputs": {"cadence": 0.5}})
    assert config.output_times(5.5, 7.0) == pytest.approx([5.5, 6.0, 6.5, 7.0])
    assert config.output_times(0.0, 1.2) == pytest.approx([0.0, 0.5, 1.0, 1.2])
    assert RunConfig().output_times(0.0, 3.0) == [3.0]


def test_scenario_is_built_from_config():
    config = config_from_dict({"scenario": {"name": "bkw", "params": {"t": 6.0}}})
    assert config.build_scenario().t0 == 6.0


def test_parse_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"grid": {"L": 8.0, "N": 32}, "scenario": {"name": "mixture1"}}))
    config = parse_config(path)
    assert config.grid.N == 32
    assert config.scenario.name == "mixture1"


def test_parse_toml(tmp_path):
    pytest.importorskip("tomllib")
    path = tmp_path / "run.toml"
    path.write_text('[grid]\nL = 8.0\nN = 16\n\n[scenario]\nname = "plasma"\n\n[scenario.params]\nc_S = 0.2\n')
    config = parse_config(path)
    assert config.grid.N == 16
    assert config.build_scenario().plasma.c_S == 0.2


def test_parse_errors(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        parse_config(broken)
    listing = tmp_path / "list.json"
    listing.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        parse_config(listing)


def test_sample_configs_are_valid():
    from pathlib import Path

    configs = Path(__file__).resolve().parent.parent / "configs"
    for path in sorted(configs.glob("*.json")):
        parse_config(path)


def test_validation_does_not_build_the_grid(monkeypatch, caplog):
    def no_grid(self):
        raise AssertionError("validation built a velocity grid")

    monkeypatch.setattr(RunConfig, "build_grid", no_grid)
    with caplog.at_level(logging.WARNING, logger="spectral_boltzmann.config"):
        config = config_from_dict({"grid": {"L": 6.0, "N": 64}, "collision": {"g_tr": 8.0}})
    assert any("cannot resolve" in record.getMessage() for record in caplog.records)
    assert config.grid.N == 64
