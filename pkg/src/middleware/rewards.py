"""
Reward factories.

Rewards are exact Fractions; the environment converts them to float.
Dense rewards are potential differences, so an episode's dense rewards sum
to -(potential at the end - potential at reset).
"""
from fractions import Fraction
from typing import Dict

from src.instance.model import Instance
from src.middleware.config_dsl import RewardSpec
from src.middleware.objectives import objective_potentials, objective_value
from src.plugins.base import CONSUMPTION
from src.plugins.consumption import max_rate
from src.simulation.engine import is_terminal, makespan
from src.simulation.state import SimState


def reward_makespan(prev: SimState, next_state: SimState, spec: RewardSpec) -> Fraction:
    """Dense: -(elapsed ticks) / H per step. Terminal: -makespan / H on the final step, else 0."""
    horizon = next_state.horizon
    if spec.dense:
        return -Fraction(next_state.now - prev.now, horizon)
    if is_terminal(next_state) and not is_terminal(prev):
        return -Fraction(makespan(next_state), horizon)
    return Fraction(0)


def normalizers(inst: Instance, s: SimState) -> Dict[str, Fraction]:
    """Scale of each objective, so weights act on values of order 1."""
    horizon = Fraction(s.horizon)
    total_weight = sum((Fraction(job.weight).limit_denominator(10 ** 9) for job in inst.jobs), Fraction(0))
    if total_weight == 0:
        total_weight = Fraction(1)
    energy_scale = Fraction(0)
    consumption = s.plugins.get(CONSUMPTION) if s.plugins is not None else None
    if consumption is not None:
        energy_scale = sum((max_rate(consumption.params, m) for m in inst.machine_ids), Fraction(0))
    return {
        "makespan": horizon,
        "max_lateness": horizon,
        "total_weighted_completion": horizon * total_weight,
        "total_weighted_tardiness": horizon * total_weight,
        "weighted_tardy_count": total_weight,
        "total_energy": horizon * (energy_scale or 1),
        "total_buffer_occupancy_time": horizon * len(inst.jobs),
        "mean_lead_time": horizon,
        "machine_utilization": Fraction(1),
    }


def potential(inst: Instance, s: SimState, spec: RewardSpec) -> Fraction:
    vector = objective_potentials(inst, s)
    scale = normalizers(inst, s)
    return sum((weight * objective_value(vector, name) / scale[name] for name, weight in spec.weights),
               Fraction(0))


def reward_weighted(inst: Instance, prev: SimState, next_state: SimState, spec: RewardSpec) -> Fraction:
    """Linear scalarization of normalized objectives (lower is better for all of them)."""
    if spec.dense:
        return -(potential(inst, next_state, spec) - potential(inst, prev, spec))
    if is_terminal(next_state) and not is_terminal(prev):
        return -potential(inst, next_state, spec)
    return Fraction(0)


def compute_reward(inst: Instance, prev: SimState, next_state: SimState, spec: RewardSpec) -> Fraction:
    if spec.name == "makespan":
        return reward_makespan(prev, next_state, spec)
    return reward_weighted(inst, prev, next_state, spec)
