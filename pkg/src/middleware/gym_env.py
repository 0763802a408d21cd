"""
Gymnasium adapter around env_reset / env_step.
"""
from typing import Any, Dict, Optional, Tuple

import gymnasium as gym
import numpy as np
from gymnasium import spaces

from src.instance.model import Instance
from src.middleware.actions import action_slots
from src.middleware.config_dsl import EnvConfig
from src.middleware.env import EnvState, env_reset, env_step
from src.middleware.observations import OBSERVATION_SIZE


class JobShopEnv(gym.Env):
    metadata = {"render_modes": []}

    def __init__(self, inst: Instance, cfg: Optional[EnvConfig] = None):
        super().__init__()
        self.inst = inst
        self.cfg = cfg or EnvConfig()
        self.state: Optional[EnvState] = None
        self.observation_space = spaces.Box(low=0.0, high=1.0, shape=(OBSERVATION_SIZE,), dtype=np.float64)
        if self.cfg.action == "binary":
            self.action_space = spaces.Discrete(2)
        else:
            self.action_space = spaces.MultiDiscrete([len(inst.jobs) + 1] * len(action_slots(inst)))

    def reset(self, *, seed: Optional[int] = None, options: Optional[dict] = None) -> Tuple[np.ndarray, dict]:
        super().reset(seed=seed)
        self.state, obs = env_reset(self.inst, self.cfg, seed=seed)
        return obs, {"now": self.state.sim.now}

    def step(self, action) -> Tuple[np.ndarray, float, bool, bool, Dict[str, Any]]:
        """
        Returns:
            obs, reward, terminated, truncated (always False), info
        """
        if self.state is None:
            raise RuntimeError("call reset() before step()")
        self.state, obs, reward, done, info = env_step(self.state, action)
        info["now"] = self.state.sim.now
        return obs, reward, done, False, info
