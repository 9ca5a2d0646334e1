"""
Global configuration settings for the genkahler toolkit.
"""
import os
import pathlib
from dotenv import load_dotenv

# Load environment variables from .env file if present
load_dotenv()

# Paths
APP_DIR = pathlib.Path(__file__).parent.absolute()
CORPUS_DIR = APP_DIR / "data" / "corpus"
LOG_FILE = os.environ.get("GENKAHLER_LOG_FILE")  # optional, stderr only when unset

# Reproducibility
DEFAULT_SEED = int(os.environ.get("GENKAHLER_SEED", "0"))

# Deformation series
DEFAULT_ORDER = 2            # truncation order T
MAX_ORDER = 6                # highest order the BCH tables and the solver support
DEFAULT_DEGREE_SLACK = 4     # degree bound D = deg(data) + slack
DEFAULT_T_SAMPLE = "1/2"     # rational t used for pointwise checks of series data

# Pointwise verification
DEFAULT_SAMPLES = int(os.environ.get("GENKAHLER_SAMPLES", "20"))
SAMPLE_HEIGHT = 5            # numerators drawn from [-SAMPLE_HEIGHT, SAMPLE_HEIGHT]
SAMPLE_DENOMINATOR = 3       # denominators drawn from [1, SAMPLE_DENOMINATOR]
SAMPLE_ATTEMPTS = 200        # coordinate-search attempts per requested sample

# Exact algebra guards
BUCHBERGER_CAP = int(os.environ.get("GENKAHLER_BUCHBERGER_CAP", "10000"))
MAX_TOTAL_DEGREE = 64
CLIFFORD_MAX_DEGREE = 3

# Jacobian bivectors beta_f on C^3 extend to CP^3 exactly up to this degree of f
JACOBIAN_MAX_DEGREE = 3


# Process exit codes for the command line
class ExitCode:
    PASS = 0
    FAILED = 1
    USAGE = 2
    UNDECIDED = 3


# Verdict values in reports
class Verdict:
    PASS = "pass"
    FAIL = "fail"
    UNDECIDED = "undecided"
