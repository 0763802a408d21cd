from src.middleware.actions import decode_binary, decode_multidiscrete
from src.middleware.config_dsl import EnvConfig, PluginSpec, RewardSpec, load_config, parse_config_dsl
from src.middleware.env import EnvState, env_reset, env_step
from src.middleware.objectives import ObjectiveVector, compute_objectives
from src.middleware.observations import observe_simple
from src.middleware.rewards import reward_makespan, reward_weighted
