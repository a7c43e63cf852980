import os
import sys
import tempfile

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

# Keep test runs out of the real log and database locations.
_SCRATCH = tempfile.mkdtemp(prefix="thinning-tests-")
os.environ.setdefault("THINNING_LOG_DIR", os.path.join(_SCRATCH, "logs"))
os.environ.setdefault("THINNING_DB_FILE", os.path.join(_SCRATCH, "simulations.db"))

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240531)


@pytest.fixture
def db_file(tmp_path):
    return str(tmp_path / "runs.db")
