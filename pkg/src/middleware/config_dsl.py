"""
Framework configuration DSL.

    observation simple
    action binary | multidiscrete
    reward makespan [dense|terminal]
    reward weighted <objective>=<w> [<objective>=<w> ...] [dense|terminal]
    plugin setup_times | breakdowns | stochastic | consumption [key=value ...]
    seed <int>

Omitted lines default to `observation simple`, `action binary`,
`reward makespan dense`, no plug-ins and the seed from settings.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, Tuple, Union

from config.settings import DEFAULT_SEED
from src.exceptions import ConfigError, DSLSyntaxError
from src.instance.dsl import tokenize_line
from src.middleware.objectives import OBJECTIVE_NAMES
from src.plugins import PLUGIN_FACTORIES, PluginChain, build_plugin, compose_plugins

logger = logging.getLogger(__name__)

OBSERVATIONS = ("simple",)
ACTIONS = ("binary", "multidiscrete")
DENSE = "dense"
TERMINAL_ONLY = "terminal"


@dataclass(frozen=True)
class RewardSpec:
    name: str = "makespan"
    weights: Tuple[Tuple[str, Fraction], ...] = (("makespan", Fraction(1)),)
    mode: str = DENSE

    @property
    def dense(self) -> bool:
        return self.mode == DENSE


@dataclass(frozen=True)
class PluginSpec:
    kind: str
    params: Tuple[Tuple[str, str], ...] = ()


@dataclass(frozen=True)
class EnvConfig:
    observation: str = "simple"
    action: str = "binary"
    reward: RewardSpec = field(default_factory=RewardSpec)
    plugins: Tuple[PluginSpec, ...] = ()
    seed: int = DEFAULT_SEED

    def build_plugins(self) -> PluginChain:
        return compose_plugins(build_plugin(p.kind, dict(p.params)) for p in self.plugins)

    def with_plugins(self, *specs: PluginSpec) -> "EnvConfig":
        config = EnvConfig(self.observation, self.action, self.reward, self.plugins + tuple(specs), self.seed)
        config.build_plugins()
        return config


def _mode(tok) -> str:
    if tok.text not in (DENSE, TERMINAL_ONLY):
        raise DSLSyntaxError(f"reward mode must be dense or terminal, got '{tok.text}'", tok.line, tok.column)
    return tok.text


def _reward(args) -> RewardSpec:
    if not args:
        raise ConfigError("reward needs a factory name (makespan or weighted)")
    head, rest = args[0], args[1:]
    if head.text == "makespan":
        if len(rest) > 1:
            raise DSLSyntaxError("expected 'reward makespan [dense|terminal]'", rest[1].line, rest[1].column)
        mode = _mode(rest[0]) if rest else DENSE
        return RewardSpec(mode=mode)
    if head.text != "weighted":
        raise ConfigError(f"unknown reward factory '{head.text}'")

    mode = DENSE
    if rest and "=" not in rest[-1].text:
        mode = _mode(rest[-1])
        rest = rest[:-1]
    weights: Dict[str, Fraction] = {}
    for tok in rest:
        name, sep, raw = tok.text.partition("=")
        if not sep:
            raise DSLSyntaxError(f"expected <objective>=<weight>, got '{tok.text}'", tok.line, tok.column)
        if name not in OBJECTIVE_NAMES:
            raise ConfigError(f"unknown objective '{name}' (line {tok.line})")
        if name in weights:
            raise ConfigError(f"objective '{name}' weighted twice (line {tok.line})")
        try:
            weights[name] = Fraction(raw)
        except (ValueError, ZeroDivisionError):
            raise DSLSyntaxError(f"weight '{raw}' is not a number", tok.line, tok.column)
    if not any(weights.values()):
        raise ConfigError("weighted reward needs at least one non-zero weight")
    return RewardSpec(name="weighted", weights=tuple(weights.items()), mode=mode)


def _plugin(args) -> PluginSpec:
    if not args:
        raise ConfigError("plugin needs a name")
    head = args[0]
    if head.text not in PLUGIN_FACTORIES:
        raise ConfigError(f"unknown plug-in '{head.text}' (line {head.line})")
    params = []
    for tok in args[1:]:
        key, sep, value = tok.text.partition("=")
        if not sep or not key:
            raise DSLSyntaxError(f"expected key=value, got '{tok.text}'", tok.line, tok.column)
        params.append((key, value))
    return PluginSpec(kind=head.text, params=tuple(params))


def parse_config_dsl(text: str) -> EnvConfig:
    """
    Parse a configuration document.

    Raises:
        DSLSyntaxError: malformed line
        ConfigError: unknown factory or plug-in, duplicate plug-in, bad parameter
    """
    values = {}
    plugins = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        tokens = tokenize_line(raw, line_no)
        if not tokens:
            continue
        head, args = tokens[0], tokens[1:]
        keyword = head.text
        if keyword in values and keyword != "plugin":
            raise DSLSyntaxError(f"'{keyword}' given twice", head.line, head.column)

        if keyword == "observation":
            if len(args) != 1:
                raise DSLSyntaxError("expected 'observation <name>'", head.line, head.column)
            if args[0].text not in OBSERVATIONS:
                raise ConfigError(f"unknown observation factory '{args[0].text}'")
            values[keyword] = args[0].text
        elif keyword == "action":
            if len(args) != 1:
                raise DSLSyntaxError("expected 'action <name>'", head.line, head.column)
            if args[0].text not in ACTIONS:
                raise ConfigError(f"unknown action factory '{args[0].text}'")
            values[keyword] = args[0].text
        elif keyword == "reward":
            values[keyword] = _reward(args)
        elif keyword == "plugin":
            spec = _plugin(args)
            if any(p.kind == spec.kind for p in plugins):
                raise ConfigError(f"duplicate plug-in '{spec.kind}' (line {head.line})")
            plugins.append(spec)
        elif keyword == "seed":
            if len(args) != 1:
                raise DSLSyntaxError("expected 'seed <int>'", head.line, head.column)
            try:
                values[keyword] = int(args[0].text)
            except ValueError:
                raise DSLSyntaxError(f"expected integer, got '{args[0].text}'", args[0].line, args[0].column)
        else:
            raise DSLSyntaxError(f"unknown keyword '{keyword}'", head.line, head.column)

    config = EnvConfig(
        observation=values.get("observation", "simple"),
        action=values.get("action", "binary"),
        reward=values.get("reward", RewardSpec()),
        plugins=tuple(plugins),
        seed=values.get("seed", DEFAULT_SEED),
    )
    # resolve plug-in parameters now so bad values fail at configuration time
    config.build_plugins()
    logger.debug(f"Config: {config.observation}/{config.action}/{config.reward.name}, "
                 f"plug-ins: {[p.kind for p in config.plugins]}")
    return config


def load_config(path: Union[str, Path]) -> EnvConfig:
    return parse_config_dsl(Path(path).read_text(encoding="utf-8"))
