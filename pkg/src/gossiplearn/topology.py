"""Hierarchical multi-network structure, reduced graphs, and certification.

The system is a set of M directed sub-networks plus a parameter server
that talks to one designated agent per sub-network every ``gamma`` rounds.
This module owns the static structure: connectivity metrics feeding the
convergence-rate constants, exhaustive reduced-graph enumeration, and the
resilience certification used to validate a configured set of trusted
sub-networks.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass

from .errors import ExplosionGuard, NotStronglyConnected, ToleranceViolation

Link = tuple[int, int]

#: Reduced-graph counts grow combinatorially; enumeration is meant for
#: desk-scale certification only.
DEFAULT_ENUMERATION_CAP = 10**6


@dataclass(frozen=True)
class SubNetwork:
    """One directed sub-network: an ordered agent list and its edge set."""

    agents: tuple[int, ...]
    edges: frozenset[Link]

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        members = set(self.agents)
        if len(members) != len(self.agents):
            raise ValueError("duplicate agent ids inside a sub-network")
        for sender, receiver in self.edges:
            if sender == receiver:
                # Self-contribution is the 1/(d+1) self term, never an edge.
                raise ValueError(f"self-loop ({sender},{receiver}) is not allowed")
            if sender not in members or receiver not in members:
                raise ValueError(f"edge ({sender},{receiver}) leaves the sub-network")
        ins: dict[int, list[int]] = {a: [] for a in self.agents}
        outs: dict[int, list[int]] = {a: [] for a in self.agents}
        for sender, receiver in sorted(self.edges):
            ins[receiver].append(sender)
            outs[sender].append(receiver)
        object.__setattr__(self, "_in", {a: tuple(v) for a, v in ins.items()})
        object.__setattr__(self, "_out", {a: tuple(v) for a, v in outs.items()})

    def in_neighbors(self, agent: int) -> tuple[int, ...]:
        return self._in[agent]

    def out_neighbors(self, agent: int) -> tuple[int, ...]:
        return self._out[agent]

    def out_degree(self, agent: int) -> int:
        return len(self._out[agent])

    def in_degree(self, agent: int) -> int:
        return len(self._in[agent])

    def sorted_links(self) -> tuple[Link, ...]:
        return tuple(sorted(self.edges))


@dataclass(frozen=True)
class SystemTopology:
    """M sub-networks, the designated agent of each, and the periods Γ, B."""

    sub_networks: tuple[SubNetwork, ...]
    designated_agents: dict[int, int]
    gamma: int
    window_b: int

    def __post_init__(self):
        object.__setattr__(self, "sub_networks", tuple(self.sub_networks))
        object.__setattr__(self, "designated_agents", dict(self.designated_agents))
        if not self.sub_networks:
            raise ValueError("at least one sub-network is required")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")
        if self.window_b < 1:
            raise ValueError("window_b must be >= 1")
        flat: list[int] = []
        for net in self.sub_networks:
            flat.extend(net.agents)
        if sorted(flat) != list(range(len(flat))):
            # Dense ids in sub-network order keep the oracle's matrix
            # indexing stable.
            raise ValueError("agent ids must be the dense range 0..N-1")
        if flat != sorted(flat):
            raise ValueError("agent ids must be assigned in sub-network order")
        if set(self.designated_agents) != set(range(len(self.sub_networks))):
            raise ValueError("exactly one designated agent per sub-network")
        for idx, agent in self.designated_agents.items():
            if agent not in self.sub_networks[idx].agents:
                raise ValueError(
                    f"designated agent {agent} is not in sub-network {idx}"
                )
        owner = {}
        for idx, net in enumerate(self.sub_networks):
            for a in net.agents:
                owner[a] = idx
        object.__setattr__(self, "_owner", owner)
        links = []
        for net in self.sub_networks:
            links.extend(net.sorted_links())
        object.__setattr__(self, "_links", tuple(links))

    @property
    def m_count(self) -> int:
        return len(self.sub_networks)

    @property
    def n_agents(self) -> int:
        return sum(len(net.agents) for net in self.sub_networks)

    @property
    def links(self) -> tuple[Link, ...]:
        """All directed links, grouped by sub-network, sorted inside each."""
        return self._links

    def network_of(self, agent: int) -> int:
        return self._owner[agent]

    def network(self, agent: int) -> SubNetwork:
        return self.sub_networks[self._owner[agent]]

    @property
    def designated(self) -> tuple[int, ...]:
        return tuple(self.designated_agents[i] for i in range(self.m_count))


@dataclass(frozen=True)
class GraphMetrics:
    """Connectivity constants entering the convergence-rate bounds.

    ``betas[i]`` is 1 / max_j (d_j + 1)^2 over sub-network i, with degrees
    taken from the full edge set (worst case over per-round realizations).
    ``gamma_rate`` is 1 - (1/4M^2) (min beta)^(2 D* B).
    """

    diameters: tuple[int, ...]
    d_star: int
    betas: tuple[float, ...]
    min_beta: float
    gamma_rate: float
    m_count: int
    n_agents: int
    window_b: int
    gamma: int


def _bfs_distances(net: SubNetwork, start: int) -> dict[int, int]:
    dist = {start: 0}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt in net.out_neighbors(node):
            if nxt not in dist:
                dist[nxt] = dist[node] + 1
                queue.append(nxt)
    return dist


def compute_metrics(topology: SystemTopology) -> GraphMetrics:
    """All-pairs diameters, per-network betas, and the contraction rate.

    Raises NotStronglyConnected if any sub-network has an unreachable
    ordered pair; the resilience guarantees are void in that case.
    """
    diameters = []
    betas = []
    for idx, net in enumerate(topology.sub_networks):
        worst = 0
        for start in net.agents:
            dist = _bfs_distances(net, start)
            if len(dist) != len(net.agents):
                missing = sorted(set(net.agents) - set(dist))
                raise NotStronglyConnected(idx, f"unreachable from {start}: {missing}")
            if dist:
                worst = max(worst, max(dist.values()))
        diameters.append(worst)
        max_degree = max((net.out_degree(a) for a in net.agents), default=0)
        betas.append(1.0 / (max_degree + 1) ** 2)
    d_star = max(diameters)
    min_beta = min(betas)
    m = topology.m_count
    contraction = (min_beta ** (2 * d_star * topology.window_b)) / (4.0 * m * m)
    gamma_rate = 1.0 - contraction
    return GraphMetrics(
        diameters=tuple(diameters),
        d_star=d_star,
        betas=tuple(betas),
        min_beta=min_beta,
        gamma_rate=gamma_rate,
        m_count=m,
        n_agents=topology.n_agents,
        window_b=topology.window_b,
        gamma=topology.gamma,
    )


@dataclass(frozen=True)
class ReducedGraph:
    """Survivors after deleting a faulty set and F extra in-links each."""

    kept_agents: frozenset[int]
    kept_edges: frozenset[Link]


def enumerate_reduced_graphs(
    net: SubNetwork,
    faulty: frozenset[int] | set[int],
    f_bound: int,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> list[ReducedGraph]:
    """Exhaustively enumerate reduced graphs for one faulty placement.

    Every surviving agent loses exactly min(f_bound, remaining in-degree)
    additional incoming links; all removal combinations are produced,
    each exactly once.
    """
    faulty = frozenset(faulty)
    if not faulty <= set(net.agents):
        raise ValueError("faulty set must be a subset of the sub-network agents")
    if f_bound < 0:
        raise ValueError("f_bound must be >= 0")
    kept = tuple(a for a in net.agents if a not in faulty)
    kept_set = frozenset(kept)
    surviving_edges = frozenset(
        (s, r) for (s, r) in net.edges if s in kept_set and r in kept_set
    )
    in_links: dict[int, list[Link]] = {a: [] for a in kept}
    for s, r in sorted(surviving_edges):
        in_links[r].append((s, r))

    total = 1
    for a in kept:
        k = min(f_bound, len(in_links[a]))
        total *= math.comb(len(in_links[a]), k)
        if total > cap:
            raise ExplosionGuard(
                f"{total}+ reduced graphs exceed the cap of {cap}"
            )

    per_agent_removals = [
        itertools.combinations(in_links[a], min(f_bound, len(in_links[a])))
        for a in kept
    ]
    graphs = []
    for removal_choice in itertools.product(*per_agent_removals):
        removed = frozenset(itertools.chain.from_iterable(removal_choice))
        graphs.append(
            ReducedGraph(kept_agents=kept_set, kept_edges=surviving_edges - removed)
        )
    return graphs


def strongly_connected_components(
    nodes, edges
) -> tuple[frozenset[int], ...]:
    """Tarjan's algorithm, iterative to survive deep graphs."""
    nodes = sorted(nodes)
    succ: dict[int, list[int]] = {n: [] for n in nodes}
    for s, r in sorted(edges):
        succ[s].append(r)
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack: set[int] = set()
    stack: list[int] = []
    components: list[frozenset[int]] = []
    counter = itertools.count()

    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ[root]))]
        index[root] = low[root] = next(counter)
        stack.append(root)
        on_stack.add(root)
        while work:
            node, children = work[-1]
            advanced = False
            for child in children:
                if child not in index:
                    index[child] = low[child] = next(counter)
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(succ[child])))
                    advanced = True
                    break
                if child in on_stack:
                    low[node] = min(low[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = set()
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    comp.add(member)
                    if member == node:
                        break
                components.append(frozenset(comp))
    return tuple(components)


def source_components(rg: ReducedGraph) -> tuple[frozenset[int], ...]:
    """Components of the condensation with no incoming cross-edges."""
    comps = strongly_connected_components(rg.kept_agents, rg.kept_edges)
    comp_of = {}
    for i, comp in enumerate(comps):
        for member in comp:
            comp_of[member] = i
    has_incoming = [False] * len(comps)
    for s, r in rg.kept_edges:
        if comp_of[s] != comp_of[r]:
            has_incoming[comp_of[r]] = True
    return tuple(c for c, flag in zip(comps, has_incoming) if not flag)


def has_unique_source_component(rg: ReducedGraph) -> bool:
    return len(source_components(rg)) == 1


@dataclass(frozen=True)
class CertFailure:
    faulty: frozenset[int]
    reduced: ReducedGraph
    kind: str  # "source" or "kl"
    theta: str | None = None
    value: float | None = None

    def describe(self) -> str:
        if self.kind == "source":
            return (
                f"faulty={sorted(self.faulty)}: reduced graph with edges "
                f"{sorted(self.reduced.kept_edges)} has "
                "!= 1 source component"
            )
        return (
            f"faulty={sorted(self.faulty)}, theta={self.theta}: source KL sum "
            f"{self.value:.3e} not above tolerance"
        )


@dataclass(frozen=True)
class CertReport:
    """Outcome of checking one sub-network for Byzantine-resilient learning."""

    f_bound: int
    truth: str
    tolerance: float
    total_reduced_graphs: int
    chi_no_faults: int
    failures: tuple[CertFailure, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def raise_if_failed(self) -> None:
        if self.failures:
            raise ToleranceViolation(self.failures)


def certify_byzantine_network(
    net: SubNetwork,
    f_bound: int,
    model,
    truth: str,
    tolerance: float = 1e-9,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> CertReport:
    """Check every reduced graph over every |A| <= F faulty placement.

    Each reduced graph must have exactly one source component, and every
    source component must keep a strictly positive summed KL divergence
    between the true hypothesis and each alternative.  At F = 0 this
    degenerates to strong connectivity plus global KL positivity on the
    single reduced graph (the original graph).
    """
    alternatives = [h for h in model.hypotheses if h != truth]
    # Per-agent divergences truth -> theta, reused across reduced graphs.
    per_agent = {
        a: {h: model.agent_divergence(a, truth, h) for h in alternatives}
        for a in net.agents
    }
    failures: list[CertFailure] = []
    total = 0
    chi_no_faults = 0
    for size in range(f_bound + 1):
        for faulty in itertools.combinations(net.agents, size):
            faulty_set = frozenset(faulty)
            graphs = enumerate_reduced_graphs(net, faulty_set, f_bound, cap=cap)
            total += len(graphs)
            if total > cap:
                raise ExplosionGuard(
                    f"{total}+ reduced graphs across placements exceed cap {cap}"
                )
            if not faulty_set:
                chi_no_faults = len(graphs)
            for rg in graphs:
                sources = source_components(rg)
                if len(sources) != 1:
                    failures.append(CertFailure(faulty_set, rg, "source"))
                for comp in sources:
                    for theta in alternatives:
                        drift = sum(per_agent[a][theta] for a in comp)
                        if drift <= tolerance:
                            failures.append(
                                CertFailure(faulty_set, rg, "kl", theta, drift)
                            )
    return CertReport(
        f_bound=f_bound,
        truth=truth,
        tolerance=tolerance,
        total_reduced_graphs=total,
        chi_no_faults=chi_no_faults,
        failures=tuple(failures),
    )
