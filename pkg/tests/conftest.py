import time

import pytest
from hypothesis import settings

settings.register_profile("suite", max_examples=25, deadline=None)
settings.load_profile("suite")


def _timed_run(*args, **kwargs):
    from sicfid.pipeline import run_recipe

    t0 = time.time()
    run = run_recipe(*args, **kwargs)
    run.elapsed_seconds = time.time() - t0
    return run


@pytest.fixture(scope="session")
def run7():
    from sicfid.pipeline import RunConfig

    return _timed_run(7, source="zeta",
                      config=RunConfig(precision=100, verify="full", exact=True))


@pytest.fixture(scope="session")
def run19():
    from sicfid.pipeline import RunConfig

    return _timed_run(19, source="zeta",
                      config=RunConfig(precision=100, verify="full", exact=True))


@pytest.fixture(scope="session")
def fixtures199():
    from sicfid.fileio import load_fixtures

    return load_fixtures(199)


@pytest.fixture(scope="session")
def run199(fixtures199):
    from sicfid.pipeline import RunConfig

    return _timed_run(199, source="ingested",
                      config=RunConfig(precision=110, verify="spot", exact=True),
                      ingested={"p4": fixtures199["p4"], "g4": fixtures199["g4"]})


@pytest.fixture(scope="session")
def p1_199():
    """Exact Stark minimal polynomial for d = 199, computed from zeta data."""
    from sicfid.quadfield import classify_dimension
    from sicfid.zeta import minpoly_stark, stark_units

    info = classify_dimension(199)
    return minpoly_stark(stark_units(info, 50), info)
