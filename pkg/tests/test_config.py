import json

import pytest
from pydantic import ValidationError

from triangular_lsd.config import DEFAULT_SEED, RunConfig, default_seed, default_workers, load_config_file


def test_run_config_defaults():
    config = RunConfig(subcommand="moments")
    assert config.seed == DEFAULT_SEED
    assert config.workers == 1
    assert config.out is None


def test_run_config_rejects_bad_values():
    with pytest.raises(ValidationError):
        RunConfig(subcommand="esd", seed=-1)
    with pytest.raises(ValidationError):
        RunConfig(subcommand="esd", seed=2**64)
    with pytest.raises(ValidationError):
        RunConfig(subcommand="esd", workers=0)
    with pytest.raises(ValidationError):
        RunConfig(subcommand="esd", params={"n": 0})
    with pytest.raises(ValidationError):
        RunConfig(subcommand="pu", params={"n_list": [10, -20]})


def test_run_config_allows_flags_and_text():
    config = RunConfig(subcommand="pu", params={"full": False, "word": "abba", "range": "-3,3", "m": 80})
    assert config.params["full"] is False


def test_header_is_sorted_json():
    header = RunConfig(subcommand="words", seed=5, params={"k": 2}).header()
    data = json.loads(header)
    assert data["seed"] == 5
    assert list(data) == sorted(data)


def test_env_defaults(monkeypatch):
    monkeypatch.delenv("TRILSD_SEED", raising=False)
    assert default_seed() == DEFAULT_SEED
    monkeypatch.setenv("TRILSD_SEED", "17")
    monkeypatch.setenv("TRILSD_WORKERS", "3")
    assert default_seed() == 17
    assert default_workers() == 3


def test_load_config_file(tmp_path):
    path = tmp_path / "run.env"
    path.write_text("SEED=9\nN-LIST=10,20,40\n# comment\nkmax=3\n")
    assert load_config_file(str(path)) == {"seed": "9", "n_list": "10,20,40", "kmax": "3"}


def test_missing_config_file(tmp_path):
    with pytest.raises(ValueError):
        load_config_file(str(tmp_path / "absent.env"))
