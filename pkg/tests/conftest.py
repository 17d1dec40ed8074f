import numpy as np
import pytest

from hrp.approx import pl_lift
from hrp.core import Flavor, GridRoughPath
from hrp.sampler import BridgeSubdivision, EbmConfig, RngStream, sample_ebm


def random_rough_path(rng, N, d, times=None, flavor=Flavor.SMOOTH):
    """Chen-consistent path with arbitrary (non-geometric) interval tensors."""
    values = np.cumsum(rng.standard_normal((N + 1, d)), axis=0)
    adj = rng.standard_normal((N, d, d))
    return GridRoughPath.build(values, adj, flavor, times)


def random_times(rng, N):
    t = np.sort(rng.uniform(0, 1, N - 1))
    return np.concatenate([[0.0], t, [1.0]])


def ebm(K=6, d=2, seed=0, m=2):
    return sample_ebm(EbmConfig(K, d, BridgeSubdivision(m)), RngStream(seed).generator())


def random_lift(rng, K, d):
    return pl_lift(np.cumsum(rng.standard_normal((2**K + 1, d)), axis=0))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in RESULTS:
        terminalreporter.write_line(line)
