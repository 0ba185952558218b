"""Session-wide fixtures: the desk-scale preset runs are expensive enough
that every test wanting one shares a single cached result."""

import time
import warnings
from dataclasses import replace

import pytest

from memwave.analysis import self_convergence
from memwave.cli import preset
from memwave.stepper import HypothesisWarning, run


@pytest.fixture(scope="session")
def desk_run():
    """desk_run(name) -> (SimConfig, RunResult), cached per preset name."""
    cache = {}

    def get(name):
        if name not in cache:
            cfg = preset(name).config
            with warnings.catch_warnings():
                # cases 3 and 4 violate the decay hypotheses by design
                warnings.simplefilter("ignore", HypothesisWarning)
                cache[name] = (cfg, run(cfg))
        return cache[name]

    return get


@pytest.fixture(scope="session")
def case1_refinement_order():
    """(observed order, study seconds) for the case1 coefficient set on
    smooth data, dt/dx held at the preset ratio. Shared by the stepper
    invariant test and the acceptance gate."""
    cfg = replace(preset("case1").config, M=64, dt=2.5 / 64)
    t0 = time.perf_counter()
    order = self_convergence(cfg, (64, 128, 256))
    return order, time.perf_counter() - t0
