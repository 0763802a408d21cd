from fractions import Fraction

import pytest

from config.settings import CONFIGS_DIR, DEFAULT_SEED
from src.exceptions import ConfigError, DSLSyntaxError
from src.middleware import EnvConfig, PluginSpec, RewardSpec, load_config, parse_config_dsl
from src.plugins import PLUGIN_ORDER


def test_empty_document_gives_defaults():
    cfg = parse_config_dsl("# nothing here\n\n")
    assert cfg == EnvConfig()
    assert cfg.seed == DEFAULT_SEED
    assert cfg.reward.dense


def test_weighted_reward_with_fractions():
    cfg = parse_config_dsl("reward weighted makespan=1 total_energy=1/2 total_weighted_tardiness=0.25 terminal\n")
    assert cfg.reward.name == "weighted"
    assert dict(cfg.reward.weights) == {
        "makespan": Fraction(1), "total_energy": Fraction(1, 2), "total_weighted_tardiness": Fraction(1, 4),
    }
    assert cfg.reward.mode == "terminal"
    assert not cfg.reward.dense


def test_plugin_parameters_are_kept_in_order():
    cfg = parse_config_dsl("plugin consumption working=2 m1.idle=1/3\nplugin breakdowns seed=4\n")
    assert cfg.plugins == (
        PluginSpec("consumption", (("working", "2"), ("m1.idle", "1/3"))),
        PluginSpec("breakdowns", (("seed", "4"),)),
    )


def test_shipped_configs_load():
    classical = load_config(CONFIGS_DIR / "classical.cfg")
    assert classical == EnvConfig(seed=0)
    extended = load_config(CONFIGS_DIR / "extended.cfg")
    assert extended.action == "multidiscrete"
    assert extended.seed == 7
    assert extended.build_plugins().kinds == PLUGIN_ORDER


@pytest.mark.parametrize("text", [
    "observation graph\n",
    "action continuous\n",
    "reward lexicographic\n",
    "reward weighted speed=1\n",
    "reward weighted makespan=0\n",
    "reward weighted makespan=1 makespan=2\n",
    "plugin teleporter\n",
    "plugin breakdowns\nplugin breakdowns\n",
    "plugin breakdowns seed=x\n",
    "plugin consumption warp=1\n",
])
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config_dsl(text)


@pytest.mark.parametrize("text, line", [
    ("seed 1\nseed 2\n", 2),
    ("seed one\n", 1),
    ("observation simple\nreward makespan sparse\n", 2),
    ("plugin consumption working\n", 1),
    ("reward weighted makespan=abc\n", 1),
    ("\n\nhorizon 100\n", 3),
])
def test_syntax_errors_carry_line(text, line):
    with pytest.raises(DSLSyntaxError) as exc:
        parse_config_dsl(text)
    assert exc.value.line == line


def test_with_plugins_validates_parameters():
    cfg = EnvConfig().with_plugins(PluginSpec("setup_times"))
    assert cfg.plugins == (PluginSpec("setup_times"),)
    with pytest.raises(ConfigError):
        cfg.with_plugins(PluginSpec("setup_times"))


def test_reward_spec_default():
    assert RewardSpec().weights == (("makespan", Fraction(1)),)
