"""
config.py — Thinning Toolkit configuration
Every tunable lives here. Paths and run-time knobs can be overridden from
the environment or a .env file (see .env.example).
"""

import os

from dotenv import load_dotenv

load_dotenv()

# ══════════════════════════════════════════════════════
# 🔢  NUMERICS
# ══════════════════════════════════════════════════════
REL_TOL        = 1e-9        # relative tolerance for float comparisons
RHO_CLAMP      = 1e-12       # fitted rho kept inside (-1+c, 1-c)

# ══════════════════════════════════════════════════════
# 🔍  OPTIMAL-k SEARCH
# ══════════════════════════════════════════════════════
DEFAULT_ETA    = 0.05        # k_ok keeps at least 95% of the best efficiency
K_LIMIT        = int(float(os.getenv("THINNING_K_LIMIT", "1e7")))

# ══════════════════════════════════════════════════════
# 📋  TABLES (default grids)
# ══════════════════════════════════════════════════════
TABLE_THETAS   = [10.0 ** j for j in range(-3, 4)]
TABLE_RHOS     = [0.1, 0.5] + [1 - 10.0 ** -j for j in range(1, 7)]

# ══════════════════════════════════════════════════════
# 📏  AUTOCORRELATION INPUT
# ══════════════════════════════════════════════════════
DEFAULT_MAX_LAG = 1000
CHECK_KS        = (2, 5, 10)   # thinning factors checked in `analyze`

# ══════════════════════════════════════════════════════
# 🎚️  RHO BANDS
# ══════════════════════════════════════════════════════
BAND_GAINS      = (1.0, 2.0, 4.0, 10.0)
BAND_CAP_FACTOR = 4            # k_cap = 4 * getkmax(theta, rho_hi)

# ══════════════════════════════════════════════════════
# 🎲  SIMULATION ORACLE
# ══════════════════════════════════════════════════════
SIM_MIN_SAMPLES = 10           # floor(B/(k+theta)) per replicate
SIM_FLAG_SE     = 3.0          # flag |emp - pred| beyond this many SEs
SIM_WORKERS     = int(os.getenv("THINNING_WORKERS", "1"))

# ══════════════════════════════════════════════════════
# 🖨️  OUTPUT
# ══════════════════════════════════════════════════════
OUTPUT_FORMATS  = ("text", "csv", "json")
TEXT_SIG_DIGITS = 6

# ══════════════════════════════════════════════════════
# 📁  PATHS & LOGGING
# ══════════════════════════════════════════════════════
BASE_DIR   = os.path.dirname(os.path.abspath(__file__))
LOG_DIR    = os.getenv("THINNING_LOG_DIR", os.path.join(BASE_DIR, "logs"))
DB_FILE    = os.getenv("THINNING_DB_FILE",
                       os.path.join(BASE_DIR, "data", "simulations.db"))
LOG_LEVEL  = os.getenv("THINNING_LOG_LEVEL", "INFO").upper()
