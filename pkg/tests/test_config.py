"""
Tests for experiment configuration files and overrides.
"""
from fractions import Fraction
from pathlib import Path

import pytest

from newton_maximal.config import SUITES, ExperimentConfig, load_experiment_config
from newton_maximal.errors import ConfigError

CONFIG_DIR = Path(__file__).parent.parent / "configs"


def _write(tmp_path, text):
    path = tmp_path / "experiment.ini"
    path.write_text(text, encoding="utf-8")
    return path


class TestLoad:
    def test_default_file_matches_defaults(self):
        assert load_experiment_config(CONFIG_DIR / "default.ini") == ExperimentConfig()

    def test_smoke_file(self):
        config = load_experiment_config(CONFIG_DIR / "smoke.ini")
        assert config.dx_log2 == 7
        assert config.h_grid_size == 4
        assert config.out == Path("results/smoke")

    def test_partial_file_keeps_defaults(self, tmp_path):
        config = load_experiment_config(_write(tmp_path, "[oscillatory]\ntheta = 1/3\n\n[cz]\ncases = 5\n"))
        assert config.theta == Fraction(1, 3)
        assert config.cases == 5
        assert config.qmax == ExperimentConfig().qmax

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_experiment_config(tmp_path / "absent.ini")

    def test_unknown_section(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown section"):
            load_experiment_config(_write(tmp_path, "[plots]\ndpi = 300\n"))

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError, match="unknown key"):
            load_experiment_config(_write(tmp_path, "[maximal]\nresolution = 3\n"))

    def test_key_in_wrong_section(self, tmp_path):
        with pytest.raises(ConfigError, match="belongs in"):
            load_experiment_config(_write(tmp_path, "[maximal]\nqmax = 3\n"))

    def test_bad_value(self, tmp_path):
        with pytest.raises(ConfigError, match="invalid value"):
            load_experiment_config(_write(tmp_path, "[diagram]\nqmax = many\n"))

    def test_malformed_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_experiment_config(_write(tmp_path, "qmax = 3\n"))


class TestOverrides:
    def test_none_is_ignored(self):
        config = ExperimentConfig().with_overrides(poly=None, n=None)
        assert config == ExperimentConfig()

    def test_values_are_coerced(self):
        config = ExperimentConfig().with_overrides(n="3", poly="t1*t2*t3", out="elsewhere", theta="1/2")
        assert config.n == 3
        assert config.out == Path("elsewhere")
        assert config.theta == Fraction(1, 2)

    def test_unknown_override(self):
        with pytest.raises(ConfigError, match="unknown override"):
            ExperimentConfig().with_overrides(colour="red")

    def test_non_integral_int(self):
        with pytest.raises(ConfigError):
            ExperimentConfig().with_overrides(qmax=2.5)


class TestValidation:
    def test_suites(self):
        assert ExperimentConfig().suites == SUITES[:-1]
        assert ExperimentConfig(suite="cz").suites == ("cz",)

    @pytest.mark.parametrize("changes", [
        {"suite": "everything"},
        {"n": 5},
        {"n": 0},
        {"poly": "  "},
        {"x_min": 2.0, "x_max": 1.0},
        {"lambda_min": 5.0, "lambda_max": 1.0},
        {"n_min": 6, "n_max": 3},
        {"xi_min": 1.0, "xi_max": 1.0},
        {"seed": -1},
        {"cases": 0},
        {"theta": Fraction(0)},
    ])
    def test_rejected(self, changes):
        with pytest.raises(ConfigError):
            ExperimentConfig(**changes)

    def test_amplification_may_be_zero(self):
        assert ExperimentConfig(amplification=0.0).amplification == 0.0

    def test_to_dict(self):
        dump = ExperimentConfig().to_dict()
        assert dump["theta"] == "1/4"
        assert dump["out"] == "results"
        assert dump["n"] == 2
