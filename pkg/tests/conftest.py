import numpy as np
import pytest

from eigencut import build_graph


def random_directed(n, density, seed):
    """Seeded simple directed graph with the given edge density."""
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < density
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    return build_graph(np.stack([src, dst], axis=1), n)


def random_mutual(n, density, seed):
    """Seeded graph whose follow relation is symmetric (mutual follows)."""
    rng = np.random.default_rng(seed)
    upper = np.triu(rng.random((n, n)) < density, 1)
    src, dst = np.nonzero(upper | upper.T)
    return build_graph(np.stack([src, dst], axis=1), n)


def strongly_connected(n, extra_density, seed):
    """Cycle through all nodes plus random extra edges: strongly connected."""
    rng = np.random.default_rng(seed)
    pairs = [(i, (i + 1) % n) for i in range(n)]
    adj = rng.random((n, n)) < extra_density
    np.fill_diagonal(adj, False)
    src, dst = np.nonzero(adj)
    pairs.extend(zip(src.tolist(), dst.tolist()))
    return build_graph(pairs, n)


@pytest.fixture(scope="session", autouse=True)
def _warm_dense_oracle():
    # compile the numba kernels once so per-test timings stay honest
    from eigencut import dense_spectrum_oracle
    dense_spectrum_oracle(np.zeros((2, 2)))


def pytest_terminal_summary(terminalreporter):
    # surface the per-criterion verdict lines even without -s
    try:
        from test_acceptance import VERDICT_LINES
    except ImportError:
        return
    if VERDICT_LINES:
        terminalreporter.section("acceptance criteria")
        for line in VERDICT_LINES:
            terminalreporter.write_line(line)
