"""
vortexprox configuration
Supports reading from .env file or using default values
"""
import os
from pathlib import Path
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Base directory
BASE_DIR = Path(__file__).parent.absolute()

# Data directory - golden fixture documents
DATA_DIR_STR = os.getenv('VORTEXPROX_DATA_DIR', '').strip()
if DATA_DIR_STR:
    DATA_DIR = Path(DATA_DIR_STR).resolve()
else:
    DATA_DIR = BASE_DIR / "data"

# Allowed document extensions
ALLOWED_EXTENSIONS = {'.json'}

# Document schema
SCHEMA_VERSION = "1"

# Tolerances (input units)
EPS_GEO = float(os.getenv('VORTEXPROX_EPS_GEO', '1e-9'))
EPS_AREA = float(os.getenv('VORTEXPROX_EPS_AREA', '1e-12'))
RELATIVE_TOLERANCE = float(os.getenv('VORTEXPROX_REL_TOLERANCE', '1e-6'))

# Raster oracle
DEFAULT_RESOLUTION = int(os.getenv('VORTEXPROX_RESOLUTION', '512'))
MIN_RESOLUTION = 64
MIN_FEATURE_CELLS = 3

# Axiom fuzzing
DEFAULT_SAMPLES = int(os.getenv('VORTEXPROX_SAMPLES', '500'))
DEFAULT_SEED = int(os.getenv('VORTEXPROX_SEED', '0'))
MAX_SUBSET_SIZE = 8

# Report emission
FLOAT_DIGITS = 17

# Logging
LOG_LEVEL = os.getenv('VORTEXPROX_LOG_LEVEL', 'WARNING').upper()
