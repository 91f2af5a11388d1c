import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from llmdetect.sparse import SparseMatrix


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\n[ACCEPTANCE] {name}: {outcome}", flush=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_sparse(rng, n_rows, n_cols, density=0.4, max_distinct=0):
    """Nonnegative random CSR matrix; max_distinct > 0 snaps values to a
    small grid so every column has few distinct values."""
    dense = rng.random((n_rows, n_cols))
    dense[rng.random((n_rows, n_cols)) > density] = 0.0
    if max_distinct:
        dense = np.round(dense * max_distinct) / max_distinct
    return SparseMatrix.from_dense(dense), dense
