"""
Episodic reset/step contract.

The environment is a pair of pure functions over EnvState values: env_step
never mutates its input, and an invalid action returns the input unchanged.
"""
import logging
from dataclasses import dataclass, replace
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.exceptions import ConfigError, EpisodeFinishedError
from src.instance.model import Instance
from src.middleware.actions import ACTION_FACTORIES, decode_binary, decode_multidiscrete
from src.middleware.config_dsl import EnvConfig
from src.middleware.objectives import compute_objectives
from src.middleware.observations import OBSERVATION_FACTORIES
from src.middleware.rewards import compute_reward
from src.simulation.engine import (
    advance, apply_agent_events, initial_state, is_terminal, next_event_time, settle_to_decision,
)
from src.simulation.state import SimState
from src.simulation.trace import Trace, episode_trace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnvState:
    inst: Instance
    cfg: EnvConfig
    sim: SimState
    pointer: int = 0     # binary action: index of the current candidate
    defers: int = 0      # binary action: defers since the last state change
    steps: int = 0

    @property
    def done(self) -> bool:
        return is_terminal(self.sim)

    def trace(self) -> Trace:
        return episode_trace(self.inst.name, self.sim)


def observe(es: EnvState) -> np.ndarray:
    return OBSERVATION_FACTORIES[es.cfg.observation](es.inst, es.sim, es.pointer)


def _check_factories(cfg: EnvConfig):
    if cfg.observation not in OBSERVATION_FACTORIES:
        raise ConfigError(f"unknown observation factory '{cfg.observation}'")
    if cfg.action not in ACTION_FACTORIES:
        raise ConfigError(f"unknown action factory '{cfg.action}'")
    if cfg.reward.name not in ("makespan", "weighted"):
        raise ConfigError(f"unknown reward factory '{cfg.reward.name}'")


def env_reset(inst: Instance, cfg: EnvConfig, seed: Optional[int] = None) -> Tuple[EnvState, np.ndarray]:
    """
    Start an episode.

    Args:
        inst: Validated instance
        cfg: Environment configuration
        seed: Master seed; defaults to cfg.seed

    Returns:
        (state at the first decision point, observation)
    """
    _check_factories(cfg)
    chain = cfg.build_plugins()
    sim = initial_state(inst, plugins=chain, seed=cfg.seed if seed is None else seed)
    sim = settle_to_decision(inst, sim)
    es = EnvState(inst=inst, cfg=cfg, sim=sim)
    logger.debug(f"Reset {inst.name} ({inst.classification}), horizon {sim.horizon}")
    return es, observe(es)


def _info(**values) -> Dict[str, Any]:
    info = {"invalid_action": False, "invalid": [], "rejected": [], "stalled": False, "reward_exact": 0}
    info.update(values)
    return info


def env_step(es: EnvState, action) -> Tuple[EnvState, np.ndarray, float, bool, Dict[str, Any]]:
    """
    Decode and apply one action, then run to the next decision point.

    Returns:
        (state, observation, reward, done, info). info holds `invalid_action`,
        the `invalid` and `rejected` reasons, `stalled`, the exact reward and,
        once done, the `objectives` vector.

    Raises:
        EpisodeFinishedError: the episode is already over
    """
    if es.done:
        raise EpisodeFinishedError(f"episode on {es.inst.name} already finished at t={es.sim.now}")
    inst, prev = es.inst, es.sim

    if es.cfg.action == "binary":
        decoded = decode_binary(inst, prev, bool(action), es.pointer, es.defers)
    else:
        decoded = decode_multidiscrete(inst, prev, np.atleast_1d(action).tolist())
    if decoded.rejected or (decoded.invalid and not decoded.events):
        return es, observe(es), 0.0, False, _info(invalid_action=True, invalid=list(decoded.invalid))

    info = _info(invalid_action=bool(decoded.invalid), invalid=list(decoded.invalid))
    sim = prev
    if decoded.events:
        sim, rejected = apply_agent_events(inst, sim, decoded.events)
        if rejected:
            info["invalid_action"] = True
            info["rejected"] = [f"{e}: {reason}" for e, reason in rejected]
        pointer = defers = 0
    elif decoded.advance:
        t = next_event_time(sim)
        if t is None:
            info["stalled"] = True
            return es, observe(es), 0.0, False, info
        sim = advance(inst, sim, t)
        pointer = defers = 0
    else:
        pointer, defers = decoded.pointer, decoded.defers

    if sim is not prev:
        sim = settle_to_decision(inst, sim)
    next_es = replace(es, sim=sim, pointer=pointer, defers=defers, steps=es.steps + 1)
    reward = compute_reward(inst, prev, sim, es.cfg.reward)
    done = is_terminal(sim)
    info["reward_exact"] = reward
    if done:
        info["objectives"] = compute_objectives(inst, next_es.trace())
    return next_es, observe(next_es), float(reward), done, info

