from fractions import Fraction

import numpy as np
import pytest
from gymnasium import spaces

from src.exceptions import ConfigError, EpisodeFinishedError
from src.instance.generator import extend_instance, random_instance
from src.instance.model import UNIFORM
from src.middleware import EnvConfig, PluginSpec, RewardSpec, env_reset, env_step
from src.middleware.gym_env import JobShopEnv
from src.middleware.observations import OBSERVATION_SIZE
from src.middleware.rewards import potential


def play_binary_commits(d2, cfg):
    es, _ = env_reset(d2, cfg)
    rewards = []
    done = False
    while not done:
        es, _, reward, done, info = env_step(es, 1)
        rewards.append(info["reward_exact"])
        assert reward == float(info["reward_exact"])
    return es, rewards, info


def test_reset_stops_at_first_decision(d2, classical_cfg):
    es, obs = env_reset(d2, classical_cfg)
    assert es.sim.now == 0
    assert not es.done
    assert es.sim.horizon == 11
    assert obs.shape == (OBSERVATION_SIZE,)
    assert np.all((obs >= 0.0) & (obs <= 1.0))


def test_reset_rejects_unknown_factories(d2):
    with pytest.raises(ConfigError):
        env_reset(d2, EnvConfig(observation="graph"))
    with pytest.raises(ConfigError):
        env_reset(d2, EnvConfig(action="continuous"))


def test_binary_defer_rotates_then_commits(d2, classical_cfg):
    es, _ = env_reset(d2, classical_cfg)
    deferred, _, reward, done, info = env_step(es, 0)
    assert deferred.pointer == 1
    assert deferred.sim is es.sim
    assert reward == 0.0 and not done and not info["invalid_action"]
    # a full rotation with an empty event queue commits the current candidate
    committed, _, _, _, _ = env_step(deferred, 0)
    assert committed.sim.machines["m2"].current_job == "J2"
    assert committed.pointer == 0


def test_binary_commits_play_d2(d2, classical_cfg):
    es, rewards, info = play_binary_commits(d2, classical_cfg)
    assert es.done
    assert info["objectives"].makespan == 7
    assert len(es.trace().of_kind("JobFinished")) == 2


def test_dense_rewards_telescope_to_makespan(d2, classical_cfg):
    _, rewards, _ = play_binary_commits(d2, classical_cfg)
    assert sum(rewards) == -Fraction(7, 11)
    assert all(r <= 0 for r in rewards)


def test_terminal_reward_only_at_the_end(d2, terminal_cfg):
    es, _ = env_reset(d2, terminal_cfg)
    es, _, first, done, _ = env_step(es, [1, 2])
    assert first == 0.0 and not done
    assert es.sim.now == 3
    es, _, last, done, info = env_step(es, [2, 1])
    assert done
    assert info["reward_exact"] == -Fraction(7, 11)


def test_weighted_rewards_telescope(d2):
    spec = RewardSpec(name="weighted", weights=(("makespan", Fraction(1)), ("total_energy", Fraction(1, 2))))
    cfg = EnvConfig(reward=spec, plugins=(PluginSpec("consumption", (("working", "2"), ("idle", "1"))),))
    start, _ = env_reset(d2, cfg)
    es, rewards, _ = play_binary_commits(d2, cfg)
    assert sum(rewards) == -(potential(d2, es.sim, spec) - potential(d2, start.sim, spec))


@pytest.mark.parametrize("action", [[1], [1, 2, 0], [3, 0], [-1, 0], "go"])
def test_malformed_multidiscrete_action_is_rejected(d2, multidiscrete_cfg, action):
    es, obs = env_reset(d2, multidiscrete_cfg)
    again, again_obs, reward, done, info = env_step(es, action)
    assert again is es
    assert info["invalid_action"]
    assert reward == 0.0 and not done
    assert np.array_equal(obs, again_obs)


def test_pair_that_is_not_enabled_is_reported(d2, multidiscrete_cfg):
    es, _ = env_reset(d2, multidiscrete_cfg)
    same, _, _, _, info = env_step(es, [2, 0])
    assert same is es
    assert info["invalid"] == ["MachineAssign(m1, J2) not enabled"]

    # a valid pair alongside an invalid one is applied
    moved, _, _, _, info = env_step(es, [1, 1])
    assert info["invalid_action"]
    assert moved.sim.machines["m1"].current_job == "J1"


def test_step_after_done_raises(d2, multidiscrete_cfg):
    es, _ = env_reset(d2, multidiscrete_cfg)
    es, *_ = env_step(es, [1, 2])
    es, _, _, done, _ = env_step(es, [2, 1])
    assert done
    with pytest.raises(EpisodeFinishedError):
        env_step(es, [0, 0])


def test_env_step_does_not_mutate_input(d2, multidiscrete_cfg):
    es, _ = env_reset(d2, multidiscrete_cfg)
    snapshot = es.sim
    env_step(es, [1, 2])
    assert es.sim == snapshot
    assert es.sim.now == 0


def test_gym_adapter_spaces(d2, multidiscrete_cfg):
    binary = JobShopEnv(d2)
    assert binary.action_space == spaces.Discrete(2)
    obs, info = binary.reset(seed=0)
    assert binary.observation_space.contains(obs)
    assert info["now"] == 0

    multi = JobShopEnv(d2, multidiscrete_cfg)
    assert multi.action_space == spaces.MultiDiscrete([3, 3])
    multi.reset()
    obs, reward, terminated, truncated, info = multi.step(np.array([1, 2]))
    assert not terminated and not truncated
    assert info["now"] == 3
    obs, reward, terminated, truncated, info = multi.step(np.array([2, 1]))
    assert terminated
    assert reward == pytest.approx(-4 / 11)


def test_gym_step_before_reset(d2):
    with pytest.raises(RuntimeError):
        JobShopEnv(d2).step(1)


@pytest.mark.parametrize("seed", range(20))
def test_observations_stay_in_range_under_random_binary_actions(seed):
    inst = extend_instance(random_instance(4, 3, seed=seed), transports=2, travel=2, transport_capacity=2,
                           load_time=1, unload_time=1, buffer_capacity=2, setup=1, outage=(15, 3),
                           stochastic=(UNIFORM, (0.5, 1.5)))
    plugins = (PluginSpec("stochastic"), PluginSpec("setup_times"), PluginSpec("breakdowns"),
               PluginSpec("consumption", (("working", "2"), ("idle", "1/2"))))
    env = JobShopEnv(inst, EnvConfig(plugins=plugins, seed=seed))
    rng = np.random.default_rng(seed)
    obs, _ = env.reset(seed=seed)
    observations = [obs]
    terminated = False
    for _ in range(5000):
        obs, _, terminated, _, _ = env.step(int(rng.integers(2)))
        observations.append(obs)
        if terminated:
            break
    assert terminated
    for obs in observations:
        assert obs.shape == (OBSERVATION_SIZE,) == (7,)
        assert np.all(np.isfinite(obs))
        assert np.all((obs >= 0.0) & (obs <= 1.0))
        assert env.observation_space.contains(obs)
