import sys
from pathlib import Path

import pytest

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from config.settings import INSTANCES_DIR
from src.instance import parse_instance_dsl
from src.middleware.config_dsl import EnvConfig, RewardSpec

D2_TEXT = """\
instance d2
machine m1
machine m2
job J1
  op m1 3
  op m2 2
job J2
  op m2 2
  op m1 4
"""

# Two machines with unit buffers and opposite routings: deadlocks at t=1
BLOCKING_TEXT = """\
instance blocking
machine m1 pre 1 post 1
machine m2 pre 1 post 1
job A
  op m1 1
  op m2 1
job B
  op m2 1
  op m1 1
job C
  op m1 1
  op m2 1
job D
  op m2 1
  op m1 1
"""


@pytest.fixture
def d2():
    return parse_instance_dsl(D2_TEXT)


@pytest.fixture
def single_op():
    return parse_instance_dsl("instance one\nmachine m1\njob J1\n  op m1 5\n")


@pytest.fixture
def chain():
    return parse_instance_dsl("instance chain\nmachine m1\nmachine m2\njob J1\n  op m1 3\n  op m2 4\n")


@pytest.fixture
def classical_cfg():
    return EnvConfig()


@pytest.fixture
def multidiscrete_cfg():
    return EnvConfig(action="multidiscrete")


@pytest.fixture
def terminal_cfg():
    return EnvConfig(action="multidiscrete", reward=RewardSpec(mode="terminal"))


@pytest.fixture
def instances_dir():
    return INSTANCES_DIR


@pytest.fixture
def blocking():
    return parse_instance_dsl(BLOCKING_TEXT)
