"""Shared fixtures.

The full-length scenario runs are expensive (a few seconds each), so they are
session-scoped and reused by every test that needs a long trace.
"""

import pytest

from rlsbias.experiments import make_config, run_scenario


@pytest.fixture(scope="session")
def run_e2(tmp_path_factory):
    out = tmp_path_factory.mktemp("e2")
    return run_scenario(make_config("e2", out_dir=str(out)))


@pytest.fixture(scope="session")
def run_e3(tmp_path_factory):
    out = tmp_path_factory.mktemp("e3")
    return run_scenario(make_config("e3", out_dir=str(out)))


@pytest.fixture(scope="session")
def run_e4(tmp_path_factory):
    out = tmp_path_factory.mktemp("e4")
    return run_scenario(make_config("e4", out_dir=str(out)))


@pytest.fixture(scope="session")
def run_e1_trio(tmp_path_factory):
    """E1 at three regularization strengths, keyed by r."""
    runs = {}
    for r in (1e-1, 1e-3, 1e-5):
        out = tmp_path_factory.mktemp(f"e1_{r:.0e}")
        runs[r] = run_scenario(make_config("e1", r=r, out_dir=str(out)))
    return runs
