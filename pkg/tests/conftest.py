import numpy as np
import pytest

from ergodic_dse.config import load_config
from ergodic_dse.space import ParameterSpace, ParameterSpec
from ergodic_dse.topology import build_chain, chain_param_names

CHAIN_KINDS = {"N": "throughput", "D": "delay", "C_inQ": "capacity", "C_outQ": "capacity", "L": "latency"}


def chain_fixture(k: int = 1, upper: int = 64, **values):
    """Chain topology exploring every chain parameter, and a point with the given overrides.

    Keyword names use underscores for the parameter brackets, e.g. ``D_s1=3``
    for ``D(s1)``; unspecified parameters take the chain defaults.
    """
    names = chain_param_names(k)
    space = ParameterSpace(ParameterSpec(n, CHAIN_KINDS[n.split("(")[0]], 1, upper) for n in names)
    topo = build_chain(k, space)
    y = {}
    for n in names:
        prefix = n.split("(")[0]
        y[n] = 4.0 if prefix in ("N", "C_inQ", "C_outQ") else 1.0
    for key, v in values.items():
        prefix, _, comp = key.rpartition("_")
        y[f"{prefix}({comp})"] = float(v)
    return topo, y


@pytest.fixture(scope="session")
def tiny4():
    return load_config("tiny4")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
