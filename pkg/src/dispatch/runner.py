"""
Episode runner: drives env_reset / env_step with a policy.
"""
import logging
from dataclasses import replace
from typing import Optional, Tuple

from config.settings import STEP_BUDGET_FACTOR
from src.exceptions import StepBudgetExceeded
from src.instance.model import Instance
from src.middleware.actions import action_slots
from src.middleware.config_dsl import EnvConfig
from src.middleware.env import env_reset, env_step
from src.middleware.objectives import ObjectiveVector, compute_objectives
from src.simulation.engine import enabled_actions
from src.simulation.trace import Trace
from src.dispatch.rules import Policy

logger = logging.getLogger(__name__)


def step_budget(inst: Instance) -> int:
    return STEP_BUDGET_FACTOR * inst.op_count * len(inst.jobs)


def run_episode(inst: Instance, cfg: EnvConfig, policy: Policy, seed: Optional[int] = None,
                budget: Optional[int] = None) -> Tuple[Trace, ObjectiveVector]:
    """
    Run one episode to termination.

    Policies act through the multidiscrete action path, one assignment per step.

    Args:
        inst: Problem instance
        cfg: Environment configuration (its action factory is overridden)
        policy: Dispatching policy
        seed: Master seed (defaults to cfg.seed)
        budget: Maximum number of steps (defaults to 10 x ops x jobs)

    Returns:
        (terminal trace, objective vector)

    Raises:
        StepBudgetExceeded: the episode did not finish within the budget
    """
    cfg = replace(cfg, action="multidiscrete")
    budget = budget if budget is not None else step_budget(inst)
    slots = {resource: index for index, resource in enumerate(action_slots(inst))}
    job_index = {job.id: index + 1 for index, job in enumerate(inst.jobs)}

    es, _ = env_reset(inst, cfg, seed=seed)
    done = es.done
    steps = 0
    info = {}
    while not done:
        if steps >= budget:
            raise StepBudgetExceeded(
                f"{policy.name} on {inst.name}: no termination after {budget} steps (t={es.sim.now})"
            )
        candidates = enabled_actions(inst, es.sim)
        choice = policy(inst, es.sim, candidates)
        action = [0] * len(slots)
        action[slots[choice.resource]] = job_index[choice.job]
        es, _, _, done, info = env_step(es, action)
        steps += 1
        if info["invalid_action"]:
            logger.warning(f"⚠ {policy.name}: {choice} rejected at t={es.sim.now}: "
                           f"{info['invalid'] + info['rejected']}")

    trace = es.trace()
    objectives = info.get("objectives")
    if objectives is None:
        objectives = compute_objectives(inst, trace)
    logger.debug(f"✓ {policy.name} on {inst.name}: makespan {objectives.makespan} in {steps} steps")
    return trace, objectives
