import numpy as np
import pytest

from tricache import EdgeList, preprocess

# Verdict lines collected by the acceptance suite; echoed after the run so
# they survive output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.line(line)


def er_edges(n: int, p_edge: float, seed: int) -> EdgeList:
    """Erdős–Rényi G(n, p) as an undirected edge list (each pair once)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    iu = np.triu_indices(n, k=1)
    mask = rng.random(len(iu[0])) < p_edge
    edges = np.column_stack([iu[0][mask], iu[1][mask]])
    return EdgeList(directed=False, n_hint=n, edges=edges)


def complete_graph(n: int) -> EdgeList:
    iu = np.triu_indices(n, k=1)
    return EdgeList(directed=False, n_hint=n, edges=np.column_stack(iu))


@pytest.fixture
def k3():
    g, _ = preprocess(complete_graph(3))
    return g


@pytest.fixture
def k4():
    g, _ = preprocess(complete_graph(4))
    return g
