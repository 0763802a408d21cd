"""
Plug-in chain.

A plug-in is a transformation (inst, state, event, params) -> (state, output)
run after every core transition. Outputs are per-episode accumulators stored
in SimState.aux under the plug-in kind. The chain always runs plug-ins in
PLUGIN_ORDER, regardless of the order they were configured in.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, Mapping, Optional, Tuple

from src.exceptions import ConfigError
from src.instance.model import Instance
from src.simulation.events import Event
from src.simulation.state import SimState

logger = logging.getLogger(__name__)

STOCHASTIC = "stochastic"
SETUP_TIMES = "setup_times"
BREAKDOWNS = "breakdowns"
CONSUMPTION = "consumption"
PLUGIN_ORDER = (STOCHASTIC, SETUP_TIMES, BREAKDOWNS, CONSUMPTION)

PluginOutput = Dict[str, Any]
Transform = Callable[[Instance, SimState, Event, Mapping[str, Any]], Tuple[SimState, PluginOutput]]
Hook = Callable[[Instance, SimState, Mapping[str, Any]], Tuple[SimState, PluginOutput]]


@dataclass(frozen=True)
class Plugin:
    kind: str
    transform: Transform
    params: Mapping[str, Any] = field(default_factory=dict)
    initialize: Optional[Hook] = None

    def __hash__(self) -> int:
        return hash(self.kind)


def _with_output(s: SimState, kind: str, output: PluginOutput) -> SimState:
    aux = dict(s.aux)
    aux[kind] = output
    return s.evolve(aux=aux)


@dataclass(frozen=True)
class PluginChain:
    plugins: Tuple[Plugin, ...] = ()

    @property
    def kinds(self) -> Tuple[str, ...]:
        return tuple(p.kind for p in self.plugins)

    def get(self, kind: str) -> Optional[Plugin]:
        for plugin in self.plugins:
            if plugin.kind == kind:
                return plugin
        return None

    def initialize(self, inst: Instance, s: SimState) -> SimState:
        for plugin in self.plugins:
            if plugin.initialize is not None:
                s, output = plugin.initialize(inst, s, plugin.params)
                s = _with_output(s, plugin.kind, output)
        return s

    def apply(self, inst: Instance, s: SimState, e: Event) -> SimState:
        for plugin in self.plugins:
            s, output = plugin.transform(inst, s, e, plugin.params)
            s = _with_output(s, plugin.kind, output)
        return s

    def __call__(self, inst: Instance, s: SimState, e: Event) -> SimState:
        return self.apply(inst, s, e)


def compose_plugins(plugins: Iterable[Plugin]) -> PluginChain:
    """
    Compose plug-ins into one transformation.

    Raises:
        ConfigError: a kind is registered twice or unknown
    """
    seen = {}
    for plugin in plugins:
        if plugin.kind not in PLUGIN_ORDER:
            raise ConfigError(f"unknown plug-in '{plugin.kind}'")
        if plugin.kind in seen:
            raise ConfigError(f"duplicate plug-in '{plugin.kind}'")
        seen[plugin.kind] = plugin
    ordered = tuple(seen[kind] for kind in PLUGIN_ORDER if kind in seen)
    logger.debug(f"Plug-in chain: {', '.join(p.kind for p in ordered) or '(empty)'}")
    return PluginChain(ordered)


# Factories for the configuration DSL: kind -> callable(params) -> Plugin
PLUGIN_FACTORIES: Dict[str, Callable[[Mapping[str, str]], Plugin]] = {}


def register(kind: str):
    def decorator(factory):
        PLUGIN_FACTORIES[kind] = factory
        return factory
    return decorator


def build_plugin(kind: str, params: Optional[Mapping[str, str]] = None) -> Plugin:
    factory = PLUGIN_FACTORIES.get(kind)
    if factory is None:
        known = ", ".join(PLUGIN_ORDER)
        raise ConfigError(f"unknown plug-in '{kind}' (known: {known})")
    return factory(dict(params or {}))


def seed_param(params: Mapping[str, Any], kind: str) -> Optional[int]:
    """Optional `seed=` override shared by the random plug-ins."""
    if "seed" not in params or params["seed"] is None:
        return None
    try:
        return int(params["seed"])
    except (TypeError, ValueError):
        raise ConfigError(f"plug-in '{kind}': seed must be an integer, got {params['seed']!r}")


def reject_unknown(params: Mapping[str, Any], kind: str, allowed: Iterable[str]):
    allowed = set(allowed)
    for key in params:
        if key not in allowed:
            raise ConfigError(f"plug-in '{kind}': unknown parameter '{key}'")
