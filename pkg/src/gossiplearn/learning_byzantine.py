"""Byzantine-resilient learning through scalar pairwise dynamics.

Multi-dimensional Byzantine consensus tolerates almost nothing, so the
hypothesis test is decomposed into one scalar dynamic per ordered
hypothesis pair.  Agents inside certified (trusted-structure) networks
average trimmed neighbor reports and add the log-likelihood ratio of
their whole signal history; everyone else receives information only
through the parameter server, which queries randomly sampled network
representatives, trims the extremes, and pushes the surviving mean to
representatives outside the certified set.

The true hypothesis is the unique one whose pairwise statistics against
every rival grow without bound; the decoder therefore picks the
hypothesis maximizing the smallest of its pairwise values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolation, TooFewNeighbors, TooFewValues
from .faults import ByzantinePlan, forge
from .rng import substream
from .signals import SignalModel, sample_signal
from .topology import (
    SystemTopology,
    enumerate_reduced_graphs,
    source_components,
)


def hypothesis_pairs(n_hypotheses: int) -> tuple[tuple[int, int], ...]:
    """All ordered index pairs (a, b), a != b, in lexicographic order."""
    return tuple(
        (a, b)
        for a in range(n_hypotheses)
        for b in range(n_hypotheses)
        if a != b
    )


@dataclass(frozen=True)
class PairwiseState:
    """One agent's scalar statistic for every ordered hypothesis pair."""

    agent: int
    pairs: tuple[tuple[int, int], ...]
    values: np.ndarray

    def r(self, pair: tuple[int, int]) -> float:
        return float(self.values[self.pairs.index(pair)])


def trimmed_filter(values, f_bound: int) -> list:
    """Drop the F smallest and F largest of (value, sender) entries.

    Stable sort on (value, sender) makes the surviving *senders*
    deterministic under ties; the surviving values are order-free.
    """
    entries = list(values)
    if len(entries) < 2 * f_bound + 1:
        raise TooFewValues(
            f"need at least {2 * f_bound + 1} values, got {len(entries)}"
        )
    entries.sort(key=lambda item: (item[0], item[1]))
    return entries[f_bound : len(entries) - f_bound] if f_bound else entries


def agent_pair_step(
    r_prev: float,
    incoming: dict,
    innovation: float,
    f_bound: int,
) -> float:
    """Trimmed-mean update of one pair statistic at one agent.

    ``incoming`` maps sender to the reported previous-round value;
    ``innovation`` is the agent's accumulated log-likelihood ratio for
    the pair over its whole signal history.
    """
    if len(incoming) < 2 * f_bound + 1:
        raise TooFewNeighbors(
            f"trimming needs >= {2 * f_bound + 1} reports, got {len(incoming)}"
        )
    survivors = trimmed_filter([(v, s) for s, v in incoming.items()], f_bound)
    total = sum(v for v, _ in survivors) + r_prev
    return total / (len(survivors) + 1) + innovation


def sample_representatives(
    topology: SystemTopology,
    c_set,
    f_bound: int,
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """Pick the representatives the server queries this fusion round.

    With M >= 2F+1 networks, one uniform draw per network.  Otherwise one
    per certified network plus 2F+1-|C| agents drawn without replacement
    from the uncertified networks' union.
    """
    c_set = frozenset(c_set)
    if len(c_set) < f_bound + 1:
        raise AssumptionViolation(
            f"need at least F+1={f_bound + 1} certified networks, got {len(c_set)}"
        )
    m = topology.m_count
    if m >= 2 * f_bound + 1:
        return tuple(
            int(rng.choice(net.agents)) for net in topology.sub_networks
        )
    reps = [
        int(rng.choice(topology.sub_networks[i].agents)) for i in sorted(c_set)
    ]
    pool = sorted(
        a
        for i, net in enumerate(topology.sub_networks)
        if i not in c_set
        for a in net.agents
    )
    extras = 2 * f_bound + 1 - len(c_set)
    if extras > 0:
        if extras > len(pool):
            raise AssumptionViolation(
                f"need {extras} uncertified representatives, pool has {len(pool)}"
            )
        chosen = rng.choice(pool, size=extras, replace=False)
        reps.extend(int(a) for a in chosen)
    return tuple(reps)


def ps_trim_and_mean(reported, f_bound: int) -> tuple[float, tuple[int, ...]]:
    """Server-side trim of the queried values; returns the surviving mean
    and the surviving senders."""
    survivors = trimmed_filter(reported, f_bound)
    mean = sum(v for v, _ in survivors) / len(survivors)
    return mean, tuple(s for _, s in survivors)


def ps_gossip_round(
    r_values: np.ndarray,
    queried: dict,
    representatives,
    topology: SystemTopology,
    c_set,
    f_bound: int,
) -> "PsGossipState":
    """One server exchange: trim the queried values pair by pair, average
    the survivors, and overwrite every representative that lives outside
    the certified networks.  Certified representatives only contribute;
    their own dynamics are left alone.  Mutates ``r_values`` in place and
    returns the server bookkeeping for the round.
    """
    c_set = frozenset(c_set)
    n_pairs = next(iter(queried.values())).shape[0]
    w_tilde = np.zeros(n_pairs)
    surviving = []
    for p in range(n_pairs):
        mean, senders = ps_trim_and_mean(
            [(float(queried[rep][p]), rep) for rep in representatives], f_bound
        )
        w_tilde[p] = mean
        surviving.append(senders)
    for rep in representatives:
        if topology.network_of(rep) not in c_set:
            r_values[rep] = w_tilde
    return PsGossipState(
        c_set=c_set,
        f_bound=f_bound,
        representatives=tuple(representatives),
        trimmed_mean=w_tilde,
        surviving=tuple(surviving),
    )


@dataclass(frozen=True)
class PsGossipState:
    """Server bookkeeping for one fusion round."""

    c_set: frozenset[int]
    f_bound: int
    representatives: tuple[int, ...]
    trimmed_mean: np.ndarray          # one entry per pair
    surviving: tuple[tuple[int, ...], ...]  # senders surviving, per pair


@dataclass
class ByzantineResult:
    """Trajectories of every pair statistic plus decode diagnostics."""

    topology: SystemTopology
    model: SignalModel
    plan: ByzantinePlan
    c_set: frozenset[int]
    pairs: tuple[tuple[int, int], ...]
    r_history: np.ndarray        # (rounds+1, N, P)
    decoded: np.ndarray          # (rounds+1, N) hypothesis indices
    signals: np.ndarray          # (rounds, N)
    gossip_events: list[PsGossipState]

    @property
    def rounds(self) -> int:
        return self.r_history.shape[0] - 1

    @property
    def normal_agents(self) -> tuple[int, ...]:
        return tuple(
            a for a in range(self.topology.n_agents) if a not in self.plan.faulty
        )

    def pair_index(self, pair: tuple[int, int]) -> int:
        return self.pairs.index(pair)

    def first_stable_round(self, agent: int, hypothesis: int) -> int | None:
        """First round from which the agent decodes ``hypothesis`` forever."""
        column = self.decoded[:, agent]
        mismatches = np.nonzero(column != hypothesis)[0]
        first = 0 if mismatches.size == 0 else int(mismatches[-1]) + 1
        return first if first <= self.rounds else None


def decode_hypothesis(values: np.ndarray, pairs, n_hypotheses: int) -> int:
    """Hypothesis whose weakest pairwise statistic is largest."""
    score = np.full(n_hypotheses, np.inf)
    for (a, b), v in zip(pairs, values):
        if v < score[a]:
            score[a] = v
    return int(np.argmax(score))


def _validate_structure(topology, plan, c_set):
    c_set = frozenset(c_set)
    m = topology.m_count
    if not c_set <= set(range(m)):
        raise AssumptionViolation(f"c_set {sorted(c_set)} names unknown networks")
    if len(c_set) < plan.f_bound + 1:
        raise AssumptionViolation(
            f"need at least F+1={plan.f_bound + 1} certified networks, "
            f"got {len(c_set)}"
        )
    for i in sorted(c_set):
        net = topology.sub_networks[i]
        for a in net.agents:
            if net.in_degree(a) < 2 * plan.f_bound + 1:
                raise TooFewNeighbors(
                    f"agent {a} in certified network {i} has in-degree "
                    f"{net.in_degree(a)} < {2 * plan.f_bound + 1}"
                )
    return c_set


def run_byzantine_learning(
    topology: SystemTopology,
    model: SignalModel,
    plan: ByzantinePlan,
    c_set,
    rounds: int,
    master_seed: int,
) -> ByzantineResult:
    """Run all pairwise dynamics for ``rounds`` rounds.

    One signal is drawn per (agent, round) and shared by every pair.
    Byzantine agents keep a shadow honest state as the baseline their
    forging strategies distort; they corrupt every value they emit, both
    neighbor messages (per receiver) and answers to server queries.
    Certification of the c_set networks is the caller's responsibility
    (the harness does it at config load).
    """
    c_set = _validate_structure(topology, plan, c_set)
    n = topology.n_agents
    m = model.n_hypotheses
    pairs = hypothesis_pairs(m)
    n_pairs = len(pairs)
    pair_a = np.array([p[0] for p in pairs])
    pair_b = np.array([p[1] for p in pairs])

    # Per-agent lookup: llr_table[s, p] = log l(s|theta_a) - log l(s|theta_b).
    llr_tables = {}
    for a in range(n):
        logs = model.log_table(a)
        llr_tables[a] = (logs[pair_a, :] - logs[pair_b, :]).T

    c_agents = sorted(
        a for i in sorted(c_set) for a in topology.sub_networks[i].agents
    )
    agent_net = {a: topology.network_of(a) for a in range(n)}

    signal_rngs = {a: substream(master_seed, "signals", a) for a in range(n)}
    byz_rngs = {a: substream(master_seed, "byzantine", a) for a in sorted(plan.faulty)}
    sampling_rng = substream(master_seed, "sampling")

    r = np.zeros((n, n_pairs))
    cumulative = np.zeros((n, n_pairs))
    r_history = np.zeros((rounds + 1, n, n_pairs))
    decoded = np.zeros((rounds + 1, n), dtype=int)
    signal_log = np.zeros((rounds, n), dtype=int)
    gossip_events: list[PsGossipState] = []

    def reported_vector(sender: int, receiver, round_index: int) -> np.ndarray:
        """What ``sender`` tells ``receiver`` about every pair."""
        honest = r[sender]
        if sender not in plan.faulty:
            return honest
        gen = byz_rngs[sender]
        return np.array(
            [
                forge(plan, sender, receiver, float(honest[p]), round_index, gen)
                for p in range(n_pairs)
            ]
        )

    for a in range(n):
        decoded[0, a] = decode_hypothesis(r[a], pairs, m)

    for t in range(1, rounds + 1):
        for a in range(n):
            signal = sample_signal(model, a, signal_rngs[a])
            signal_log[t - 1, a] = signal
            cumulative[a] += llr_tables[a][signal]

        new_r = r.copy()
        for j in c_agents:
            net = topology.sub_networks[agent_net[j]]
            incoming = np.stack(
                [reported_vector(s, j, t) for s in net.in_neighbors(j)]
            )
            ordered = np.sort(incoming, axis=0)
            f = plan.f_bound
            survivors = ordered[f : ordered.shape[0] - f] if f else ordered
            new_r[j] = (survivors.sum(axis=0) + r[j]) / (survivors.shape[0] + 1)
            new_r[j] += cumulative[j]
        r = new_r

        if t % topology.gamma == 0:
            reps = sample_representatives(topology, c_set, plan.f_bound, sampling_rng)
            queried = {rep: reported_vector(rep, "ps", t) for rep in reps}
            gossip_events.append(
                ps_gossip_round(r, queried, reps, topology, c_set, plan.f_bound)
            )

        r_history[t] = r
        for a in range(n):
            decoded[t, a] = decode_hypothesis(r[a], pairs, m)

    return ByzantineResult(
        topology=topology,
        model=model,
        plan=plan,
        c_set=c_set,
        pairs=pairs,
        r_history=r_history,
        decoded=decoded,
        signals=signal_log,
        gossip_events=gossip_events,
    )


@dataclass(frozen=True)
class PairwiseGrowthReference:
    """Asymptotic growth constants, reported for reference only."""

    beta: float
    per_network: dict[int, dict]

    def constant(self, network: int) -> float:
        info = self.per_network[network]
        exponent = info["chi"] * (info["n"] - info["phi"])
        return 0.5 * self.beta**exponent * info["dkl_star"]


def pairwise_growth_reference(
    topology: SystemTopology,
    model: SignalModel,
    plan: ByzantinePlan,
    c_set,
) -> PairwiseGrowthReference:
    """Compute the documented growth-rate constants for each certified net.

    beta is min over certified normal agents of 1/(2(d_in - 2F) + 1);
    chi counts the reduced graphs for the network's actual faulty subset;
    dkl_star is the smallest source-component divergence over those
    reduced graphs and all non-true hypotheses.
    """
    c_set = frozenset(c_set)
    f = plan.f_bound
    beta = min(
        1.0 / (2 * (topology.sub_networks[i].in_degree(a) - 2 * f) + 1)
        for i in sorted(c_set)
        for a in topology.sub_networks[i].agents
        if a not in plan.faulty
    )
    per_network = {}
    alternatives = [h for h in model.hypotheses if h != model.truth]
    for i in sorted(c_set):
        net = topology.sub_networks[i]
        faulty_here = frozenset(plan.faulty) & set(net.agents)
        graphs = enumerate_reduced_graphs(net, faulty_here, f)
        dkl_star = np.inf
        for rg in graphs:
            for comp in source_components(rg):
                for theta in alternatives:
                    drift = sum(
                        model.agent_divergence(a, model.truth, theta) for a in comp
                    )
                    dkl_star = min(dkl_star, drift)
        per_network[i] = {
            "chi": len(graphs),
            "n": len(net.agents),
            "phi": len(net.agents) - len(faulty_here),
            "dkl_star": float(dkl_star),
        }
    return PairwiseGrowthReference(beta=beta, per_network=per_network)
