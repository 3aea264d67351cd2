"""Shared instance builders for the test suite."""

import numpy as np
import pytest

from gossiplearn.signals import SignalModel, make_peaked_tables
from gossiplearn.topology import SubNetwork, SystemTopology, compute_metrics


def ring_subnetwork(agents) -> SubNetwork:
    """Bidirectional cycle over the given agents."""
    agents = tuple(agents)
    n = len(agents)
    edges = set()
    for i in range(n):
        edges.add((agents[i], agents[(i + 1) % n]))
        edges.add((agents[(i + 1) % n], agents[i]))
    return SubNetwork(agents=agents, edges=frozenset(edges))


def complete_subnetwork(agents) -> SubNetwork:
    agents = tuple(agents)
    edges = {(a, b) for a in agents for b in agents if a != b}
    return SubNetwork(agents=agents, edges=frozenset(edges))


def pair_subnetwork(a: int, b: int) -> SubNetwork:
    return SubNetwork(agents=(a, b), edges=frozenset({(a, b), (b, a)}))


def auto_gamma_topology(nets, designated, window_b) -> SystemTopology:
    probe = SystemTopology(
        sub_networks=tuple(nets),
        designated_agents=designated,
        gamma=1,
        window_b=window_b,
    )
    gamma = window_b * compute_metrics(probe).d_star
    return SystemTopology(
        sub_networks=tuple(nets),
        designated_agents=designated,
        gamma=max(gamma, 1),
        window_b=window_b,
    )


@pytest.fixture
def two_ring_topology() -> SystemTopology:
    """M=2 sub-networks of 4 agents each (bidirectional rings), B=2."""
    nets = (ring_subnetwork(range(0, 4)), ring_subnetwork(range(4, 8)))
    return auto_gamma_topology(nets, {0: 0, 1: 4}, window_b=2)


@pytest.fixture
def single_pair_topology() -> SystemTopology:
    """One sub-network of two agents joined both ways, B=1."""
    return auto_gamma_topology((pair_subnetwork(0, 1),), {0: 0}, window_b=1)


@pytest.fixture
def two_pair_topology() -> SystemTopology:
    """M=2 sub-networks of two agents each, B=2."""
    nets = (pair_subnetwork(0, 1), pair_subnetwork(2, 3))
    return auto_gamma_topology(nets, {0: 0, 1: 2}, window_b=2)


@pytest.fixture
def byzantine_topology() -> SystemTopology:
    """M=3 complete 4-agent sub-networks, fusion every 5 rounds."""
    nets = (
        complete_subnetwork(range(0, 4)),
        complete_subnetwork(range(4, 8)),
        complete_subnetwork(range(8, 12)),
    )
    return SystemTopology(
        sub_networks=nets,
        designated_agents={0: 0, 1: 4, 2: 8},
        gamma=5,
        window_b=1,
    )


def peaked_model(n_agents: int, n_hypotheses: int = 3, alphabet: int = 4,
                 peak: float = 0.4, truth: str = "h0") -> SignalModel:
    hypotheses = tuple(f"h{k}" for k in range(n_hypotheses))
    tables = make_peaked_tables(range(n_agents), n_hypotheses, alphabet, peak)
    return SignalModel.build(hypotheses, truth, tables)


def local_confusion_model() -> SignalModel:
    """Two agents, three hypotheses; neither agent separates every pair,
    but jointly they separate all of them."""
    # Agent 0 cannot tell h1 from h2; agent 1 cannot tell h0 from h1.
    t0 = np.array([[0.7, 0.3], [0.3, 0.7], [0.3, 0.7]])
    t1 = np.array([[0.6, 0.4], [0.6, 0.4], [0.2, 0.8]])
    return SignalModel.build(("h0", "h1", "h2"), "h0", {0: t0, 1: t1})
