import os

# Pin BLAS to one thread before numpy loads it: the matrices here are small
# and thread fan-out costs far more than it saves.
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import pytest

from stealthdeg import build_model, build_scenario, load_case, parse_case

RING_TEXT = """\
mpc.baseMVA = 100;
mpc.bus = [
\t1\t3\t0\t0\t0\t0\t1\t1\t0\t345\t1\t1.1\t0.9;
\t2\t1\t0\t0\t0\t0\t1\t1\t0\t345\t1\t1.1\t0.9;
\t3\t1\t0\t0\t0\t0\t1\t1\t0\t345\t1\t1.1\t0.9;
];
mpc.branch = [
\t1\t2\t0\t0.1\t0\t250\t250\t250\t0\t0\t1\t-360\t360;
\t2\t3\t0\t0.1\t0\t250\t250\t250\t0\t0\t1\t-360\t360;
\t1\t3\t0\t0.1\t0\t250\t250\t250\t0\t0\t1\t-360\t360;
];
"""


@pytest.fixture(scope="session")
def ring_case():
    return parse_case(RING_TEXT)


@pytest.fixture(scope="session")
def ring_model(ring_case):
    return build_model(ring_case)


@pytest.fixture(scope="session")
def case9_model():
    return build_model(load_case("case9"))


@pytest.fixture(scope="session")
def case14_model():
    return build_model(load_case("case14"))


@pytest.fixture(scope="session")
def case30_model():
    return build_model(load_case("case30"))


@pytest.fixture(scope="session")
def case9_stats(case9_model):
    return build_scenario(case9_model, 0.5, 30.0)


@pytest.fixture(scope="session")
def case14_stats(case14_model):
    return build_scenario(case14_model, 0.5, 30.0)


@pytest.fixture(scope="session")
def case30_stats(case30_model):
    return build_scenario(case30_model, 0.5, 30.0)
