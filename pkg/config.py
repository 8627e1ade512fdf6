import os
from dotenv import load_dotenv

load_dotenv()

# Cache
CACHE_DIR = os.getenv("SQUEEZE_CACHE_DIR", "")
CODE_VERSION = "squeeze-1.0"

# Randomized searches
DEFAULT_SEED = int(os.getenv("SQUEEZE_SEED", 0))
SPLIT_BUDGET = int(os.getenv("SQUEEZE_SPLIT_BUDGET", 400))
ISO_BUDGET = int(os.getenv("SQUEEZE_ISO_BUDGET", 64))

# Groups
ORDER_CAP = int(os.getenv("SQUEEZE_ORDER_CAP", 10000))

# Acceptance runner
CHECK_WORKERS = int(os.getenv("SQUEEZE_CHECK_WORKERS", 1))

# Logging
DEBUG = os.getenv("DEBUG", "False").lower() == "true"
LOG_LEVEL = "DEBUG" if DEBUG else os.getenv("LOG_LEVEL", "WARNING").upper()
