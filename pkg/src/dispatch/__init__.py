from src.dispatch.rules import POLICIES, Policy, make_policy, mwkr_policy, random_policy, spt_policy
from src.dispatch.runner import run_episode
