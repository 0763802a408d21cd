"""
Configuration settings for JobShopLab
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Paths
BASE_DIR = Path(__file__).parent.parent
DATA_DIR = BASE_DIR / "data"
INSTANCES_DIR = DATA_DIR / "instances"
CONFIGS_DIR = DATA_DIR / "configs"
BOUNDS_FILE = INSTANCES_DIR / "bounds.txt"
RESULTS_DIR = BASE_DIR / "results"
RESULTS_DB = RESULTS_DIR / "jobshoplab.db"

# Create directories if they don't exist
DATA_DIR.mkdir(exist_ok=True)
RESULTS_DIR.mkdir(exist_ok=True)

LOG_LEVEL = os.getenv("JOBSHOPLAB_LOG_LEVEL", "INFO")

# Master seed used when neither the config DSL nor the CLI sets one
DEFAULT_SEED = int(os.getenv("JOBSHOPLAB_SEED", "0"))

# Benchmark runner
BENCH_WORKERS = int(os.getenv("JOBSHOPLAB_WORKERS", "4"))

# Exact solver refuses instances with more operations unless forced
EXACT_OP_LIMIT = int(os.getenv("JOBSHOPLAB_EXACT_OP_LIMIT", "16"))

# Episode step budget = factor x total op count x job count
STEP_BUDGET_FACTOR = 10

# Objective tag used by classify() when nothing else is configured
DEFAULT_OBJECTIVE = "Cmax"
