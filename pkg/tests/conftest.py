import time

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture(scope="session")
def oracle_runs():
    """Full-horizon lab-frame runs at g = 0.1 and g = 0.05, shared across
    the suite (each takes minutes; the g = 0.05 horizon is 4x longer)."""
    from squeezecool import oracle as oc
    from squeezecool.singlemode import SingleModeParams

    runs = {}
    for g, tol in ((0.1, 1e-9), (0.05, 1e-8)):
        base = SingleModeParams(g=g, eta2=0.12, Q=np.inf, fock_dim=15)
        p = oc.FullModelParams(base=base, tol=tol)
        t0 = time.time()
        traj = oc.simulate_full(p)
        runs[g] = (p, traj, time.time() - t0)
    return runs
