"""Robust push-sum with recovery counters and periodic server fusion.

Each agent keeps a value vector z and a mass scalar m and estimates the
network average by the ratio z/m.  Cumulative sent counters (sigma) and
per-link received counters (rho) make the protocol immune to packet
drops: when a link finally delivers, the receiver absorbs the whole
backlog as the difference of cumulative counters, so no mass is ever
lost.  Within a round both z and m are updated twice; the second update
keeps the in-flight (virtual) quantities away from zero, which is what
makes the matrix representation of the dynamics well behaved.

Every designated agent trades half of its value and mass with the
parameter server every ``gamma`` rounds; the server returns the average
of the uploads, which realizes a doubly stochastic mixing of the
designated agents.

All round updates are synchronous: broadcasts for round t are computed
from end-of-round t-1 state before any delivery is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MissingDesignated, UnknownLink
from .faults import DropSchedule
from .topology import SystemTopology


@dataclass(frozen=True)
class AgentState:
    """Per-agent protocol state at the end of a round."""

    agent: int
    z: np.ndarray
    m: float
    sigma: np.ndarray
    sigma_tilde: float
    rho_in: dict[int, np.ndarray]
    rho_tilde_in: dict[int, float]
    in_neighbors: tuple[int, ...]
    out_neighbors: tuple[int, ...]


@dataclass(frozen=True)
class LinkMessage:
    """One broadcast payload: the sender's cumulative counters."""

    sender: int
    receiver: int
    sigma_plus: np.ndarray
    sigma_tilde_plus: float
    round_index: int


def initial_state(
    agent: int,
    value,
    in_neighbors,
    out_neighbors,
    mass: float = 1.0,
) -> AgentState:
    z = np.atleast_1d(np.asarray(value, dtype=float)).copy()
    return AgentState(
        agent=agent,
        z=z,
        m=float(mass),
        sigma=np.zeros_like(z),
        sigma_tilde=0.0,
        rho_in={j: np.zeros_like(z) for j in in_neighbors},
        rho_tilde_in={j: 0.0 for j in in_neighbors},
        in_neighbors=tuple(in_neighbors),
        out_neighbors=tuple(out_neighbors),
    )


def outgoing_payload(state: AgentState, out_degree: int) -> tuple[np.ndarray, float]:
    """First half-update preview: the counters the agent will broadcast."""
    share = out_degree + 1
    return state.sigma + state.z / share, state.sigma_tilde + state.m / share


def local_round(
    state: AgentState,
    delivered,
    round_index: int,
    out_degree: int | None = None,
) -> tuple[AgentState, list[LinkMessage]]:
    """Advance one agent by one full round (both half-updates).

    ``delivered`` holds the LinkMessages that actually arrived this round;
    senders the agent has no incoming link from raise UnknownLink.  The
    divisor uses the round's out-degree: senders never learn whether a
    packet got through.
    """
    d = len(state.out_neighbors) if out_degree is None else out_degree
    share = d + 1

    sigma_plus = state.sigma + state.z / share
    sigma_tilde_plus = state.sigma_tilde + state.m / share
    messages = [
        LinkMessage(state.agent, receiver, sigma_plus, sigma_tilde_plus, round_index)
        for receiver in state.out_neighbors
    ]

    new_rho = dict(state.rho_in)
    new_rho_tilde = dict(state.rho_tilde_in)
    z_gain = np.zeros_like(state.z)
    m_gain = 0.0
    for message in delivered:
        sender = message.sender
        if sender not in state.rho_in:
            raise UnknownLink(
                f"agent {state.agent} has no incoming link from {sender}"
            )
        z_gain = z_gain + (message.sigma_plus - new_rho[sender])
        m_gain += message.sigma_tilde_plus - new_rho_tilde[sender]
        new_rho[sender] = message.sigma_plus
        new_rho_tilde[sender] = message.sigma_tilde_plus

    z_plus = state.z / share + z_gain
    m_plus = state.m / share + m_gain

    new_state = AgentState(
        agent=state.agent,
        z=z_plus / share,
        m=m_plus / share,
        sigma=sigma_plus + z_plus / share,
        sigma_tilde=sigma_tilde_plus + m_plus / share,
        rho_in=new_rho,
        rho_tilde_in=new_rho_tilde,
        in_neighbors=state.in_neighbors,
        out_neighbors=state.out_neighbors,
    )
    return new_state, messages


def fusion_round(
    states: dict[int, AgentState], m_count: int
) -> dict[int, AgentState]:
    """Parameter-server exchange among the designated agents.

    Each uploads half of (z, m); the server returns the average of the
    uploads, so agent j0 ends at z/2 + (1/2M) * sum of all designated z.
    Totals are preserved exactly (the mixing is doubly stochastic).
    """
    if len(states) != m_count:
        raise MissingDesignated(
            f"expected {m_count} designated states, got {len(states)}"
        )
    ordered = sorted(states)
    z_sum = sum(states[a].z for a in ordered)
    m_sum = sum(states[a].m for a in ordered)
    updated = {}
    for a in ordered:
        s = states[a]
        updated[a] = AgentState(
            agent=s.agent,
            z=0.5 * s.z + z_sum / (2.0 * m_count),
            m=0.5 * s.m + m_sum / (2.0 * m_count),
            sigma=s.sigma,
            sigma_tilde=s.sigma_tilde,
            rho_in=s.rho_in,
            rho_tilde_in=s.rho_tilde_in,
            in_neighbors=s.in_neighbors,
            out_neighbors=s.out_neighbors,
        )
    return updated


def initial_states(topology: SystemTopology, inputs) -> dict[int, AgentState]:
    """Build per-agent states from an (N, d) array or mapping of inputs."""
    n = topology.n_agents
    if isinstance(inputs, dict):
        rows = [np.atleast_1d(np.asarray(inputs[a], dtype=float)) for a in range(n)]
    else:
        arr = np.asarray(inputs, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        rows = [arr[a] for a in range(n)]
    if len(rows) != n:
        raise ValueError(f"expected {n} input vectors, got {len(rows)}")
    states = {}
    for net in topology.sub_networks:
        for a in net.agents:
            states[a] = initial_state(
                a, rows[a], net.in_neighbors(a), net.out_neighbors(a)
            )
    return states


def advance_round(
    states: dict[int, AgentState],
    topology: SystemTopology,
    schedule: DropSchedule,
    round_index: int,
) -> dict[int, AgentState]:
    """One synchronous round for every agent (no fusion here).

    Payloads are generated from the previous round's states for everyone
    before any delivery, then each agent consumes whatever the schedule
    let through.
    """
    payloads = {a: outgoing_payload(states[a], len(states[a].out_neighbors))
                for a in sorted(states)}
    delivered: dict[int, list[LinkMessage]] = {a: [] for a in states}
    for link in topology.links:
        sender, receiver = link
        if schedule.operational(link, round_index):
            sp, stp = payloads[sender]
            delivered[receiver].append(
                LinkMessage(sender, receiver, sp, stp, round_index)
            )
    return {
        a: local_round(states[a], delivered[a], round_index)[0]
        for a in sorted(states)
    }


def apply_fusion(
    states: dict[int, AgentState], topology: SystemTopology
) -> dict[int, AgentState]:
    designated = topology.designated
    fused = fusion_round({a: states[a] for a in designated}, topology.m_count)
    merged = dict(states)
    merged.update(fused)
    return merged


def augmented_snapshot(
    states: dict[int, AgentState], topology: SystemTopology
) -> tuple[np.ndarray, np.ndarray]:
    """Stack real and in-flight quantities in the oracle's vertex order.

    Row for a real agent holds (z, m); row for the virtual vertex of link
    (j', j) holds the backlog (sigma_{j'} - rho_{j'j}, mass analogue).
    """
    n = topology.n_agents
    links = topology.links
    dim = states[0].z.shape[0]
    values = np.zeros((n + len(links), dim))
    masses = np.zeros(n + len(links))
    for a in range(n):
        values[a] = states[a].z
        masses[a] = states[a].m
    for k, (sender, receiver) in enumerate(links):
        values[n + k] = states[sender].sigma - states[receiver].rho_in[sender]
        masses[n + k] = states[sender].sigma_tilde - states[receiver].rho_tilde_in[sender]
    return values, masses


@dataclass
class ConsensusResult:
    """Round-indexed trajectories of one consensus run (row 0 = init)."""

    topology: SystemTopology
    inputs: np.ndarray
    target: np.ndarray
    estimates: np.ndarray      # (rounds+1, N, d)
    errors: np.ndarray         # (rounds+1, N) l2 distance to the average
    aug_values: np.ndarray | None   # (rounds+1, N_tilde, d)
    aug_masses: np.ndarray | None   # (rounds+1, N_tilde)

    @property
    def rounds(self) -> int:
        return self.estimates.shape[0] - 1


def run_consensus(
    topology: SystemTopology,
    inputs,
    schedule: DropSchedule,
    rounds: int,
    record_augmented: bool = True,
) -> ConsensusResult:
    """Full hierarchical execution for ``rounds`` rounds."""
    states = initial_states(topology, inputs)
    n = topology.n_agents
    dim = states[0].z.shape[0]
    arr_inputs = np.stack([states[a].z for a in range(n)])
    target = arr_inputs.mean(axis=0)

    estimates = np.zeros((rounds + 1, n, dim))
    errors = np.zeros((rounds + 1, n))
    aug_values = aug_masses = None
    if record_augmented:
        n_tilde = n + len(topology.links)
        aug_values = np.zeros((rounds + 1, n_tilde, dim))
        aug_masses = np.zeros((rounds + 1, n_tilde))

    def record(t: int):
        for a in range(n):
            estimates[t, a] = states[a].z / states[a].m
            errors[t, a] = float(np.linalg.norm(estimates[t, a] - target))
        if record_augmented:
            aug_values[t], aug_masses[t] = augmented_snapshot(states, topology)

    record(0)
    for t in range(1, rounds + 1):
        states = advance_round(states, topology, schedule, t)
        if t % topology.gamma == 0:
            states = apply_fusion(states, topology)
        record(t)

    return ConsensusResult(
        topology=topology,
        inputs=arr_inputs,
        target=target,
        estimates=estimates,
        errors=errors,
        aug_values=aug_values,
        aug_masses=aug_masses,
    )
