import os
import logging
from dotenv import load_dotenv

BASE_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_DIR = os.path.dirname(BASE_DIR)

load_dotenv()

logger = logging.getLogger(__name__)


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"{name}={raw!r} is not an integer, using {default}")
        return default


OUTPUT_DIR = os.getenv("TANGO_OUTPUT_DIR", os.path.join(PROJECT_DIR, "runs")).strip()
DATA_DIR = os.getenv("TANGO_DATA_DIR", os.path.join(PROJECT_DIR, "data")).strip()
LOG_LEVEL = os.getenv("TANGO_LOG_LEVEL", "INFO").strip().upper()

DEFAULT_SEED = _int_env("TANGO_SEED", 0)
DEFAULT_THREADS = _int_env("TANGO_THREADS", 1)

# Benchmark defaults
GPP_SPLIT_SIZES = (5120, 640, 1280)
GPP_NODE_RANGE = (25, 35)
LOG10_MSE_FLOOR = -12.0

# Gate normalisation constant for GatedGCN aggregation
GATE_EPS = 1e-6

# Barbell demo budget
BARBELL_EPOCHS = 500
BARBELL_WIDTH = 8
BARBELL_DIRICHLET_EPS = 0.01
# Bounded activations keep the untrained rollout finite; the step is 1/steps
BARBELL_ACTIVATION = "tanh"

if DEFAULT_THREADS < 1:
    logger.warning("TANGO_THREADS must be >= 1, using 1")
    DEFAULT_THREADS = 1
