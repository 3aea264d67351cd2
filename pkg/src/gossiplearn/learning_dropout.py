"""Non-Bayesian learning over lossy links.

Consensus runs on per-hypothesis accumulated log-likelihoods (the value
vector of the push-sum state, one coordinate per hypothesis) while each
agent injects the log-likelihood of one fresh private signal every
round.  Beliefs are read out by the closed form of the KL-proximal dual
averaging step: a softmax of the mass-normalized accumulators under the
uniform prior.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .errors import IdentifiabilityFailure, NonpositiveMass
from .faults import DropSchedule
from .pushsum import (
    AgentState,
    advance_round,
    apply_fusion,
    augmented_snapshot,
    initial_state,
)
from .rng import substream
from .signals import (
    SignalModel,
    check_global_observability,
    log_likelihood_vector,
    sample_signal,
)
from .topology import SystemTopology, compute_metrics


def belief_project(z_theta, mass: float) -> np.ndarray:
    """Closed form of the simplex projection: softmax of z/mass.

    Stabilized by subtracting the top coordinate before exponentiating;
    the accumulators grow linearly with time, so the naive form would
    overflow.
    """
    if mass <= 0:
        raise NonpositiveMass(f"mass must be positive, got {mass}")
    scores = np.asarray(z_theta, dtype=float) / mass
    scores = scores - scores.max()
    weights = np.exp(scores)
    return weights / weights.sum()


def innovation_step(
    state: AgentState, model: SignalModel, rng: np.random.Generator
) -> tuple[AgentState, int]:
    """Draw one signal and push its log-likelihoods into every coordinate."""
    signal = sample_signal(model, state.agent, rng)
    new_z = state.z + log_likelihood_vector(model, state.agent, signal)
    new_state = AgentState(
        agent=state.agent,
        z=new_z,
        m=state.m,
        sigma=state.sigma,
        sigma_tilde=state.sigma_tilde,
        rho_in=state.rho_in,
        rho_tilde_in=state.rho_tilde_in,
        in_neighbors=state.in_neighbors,
        out_neighbors=state.out_neighbors,
    )
    return new_state, signal


@dataclass
class LearningResult:
    """Round-indexed learning trajectories (row 0 = uniform start)."""

    topology: SystemTopology
    model: SignalModel
    delta: float
    beliefs: np.ndarray        # (rounds+1, N, m)
    log_ratios: np.ndarray     # (rounds+1, N, m): log mu(theta)/mu(truth)
    masses: np.ndarray         # (rounds+1, N)
    zbar: np.ndarray           # (rounds+1, m): global innovation average
    consensus_gap: np.ndarray  # (rounds+1, N): |zbar - z/m| at the truth
    signals: np.ndarray        # (rounds, N)
    innovations: np.ndarray    # (rounds+1, N, m), row t added at round t
    aug_values: np.ndarray | None
    aug_masses: np.ndarray | None

    @property
    def rounds(self) -> int:
        return self.beliefs.shape[0] - 1


def run_learning(
    topology: SystemTopology,
    model: SignalModel,
    schedule: DropSchedule,
    rounds: int,
    master_seed: int,
    delta: float = 0.1,
    allow_unidentifiable: bool = False,
    record_augmented: bool = False,
) -> LearningResult:
    """Execute the drop-tolerant learning dynamics for ``rounds`` rounds.

    The accumulators start at zero and the mass at one; each round runs
    the push-sum double update, then the innovation, then (every gamma
    rounds) the server fusion.  Raises IdentifiabilityFailure when the
    model is not globally observable, unless the caller explicitly wants
    a negative-control run.
    """
    observability = check_global_observability(model)
    if not observability.passed and not allow_unidentifiable:
        raise IdentifiabilityFailure(
            f"weakest hypothesis pair {observability.weakest_pair()} has "
            f"divergence {observability.minimum:.3e}"
        )
    compute_metrics(topology)  # validates strong connectivity

    n = topology.n_agents
    m = model.n_hypotheses
    truth = model.truth_index
    states: dict[int, AgentState] = {}
    for net in topology.sub_networks:
        for a in net.agents:
            states[a] = initial_state(
                a, np.zeros(m), net.in_neighbors(a), net.out_neighbors(a)
            )
    rngs = {a: substream(master_seed, "signals", a) for a in range(n)}

    beliefs = np.zeros((rounds + 1, n, m))
    log_ratios = np.zeros((rounds + 1, n, m))
    masses = np.zeros((rounds + 1, n))
    zbar = np.zeros((rounds + 1, m))
    consensus_gap = np.zeros((rounds + 1, n))
    signals = np.zeros((rounds, n), dtype=int)
    innovations = np.zeros((rounds + 1, n, m))
    aug_values = aug_masses = None
    if record_augmented:
        n_tilde = n + len(topology.links)
        aug_values = np.zeros((rounds + 1, n_tilde, m))
        aug_masses = np.zeros((rounds + 1, n_tilde))

    cumulative = np.zeros(m)

    def record(t: int):
        zbar[t] = cumulative / n
        for a in range(n):
            s = states[a]
            beliefs[t, a] = belief_project(s.z, s.m)
            log_ratios[t, a] = (s.z - s.z[truth]) / s.m
            masses[t, a] = s.m
            consensus_gap[t, a] = abs(zbar[t, truth] - s.z[truth] / s.m)
        if record_augmented:
            aug_values[t], aug_masses[t] = augmented_snapshot(states, topology)

    record(0)
    for t in range(1, rounds + 1):
        states = advance_round(states, topology, schedule, t)
        for a in range(n):
            states[a], signal = innovation_step(states[a], model, rngs[a])
            signals[t - 1, a] = signal
            innovations[t, a] = log_likelihood_vector(model, a, signal)
            cumulative = cumulative + innovations[t, a]
        if t % topology.gamma == 0:
            states = apply_fusion(states, topology)
        record(t)

    return LearningResult(
        topology=topology,
        model=model,
        delta=delta,
        beliefs=beliefs,
        log_ratios=log_ratios,
        masses=masses,
        zbar=zbar,
        consensus_gap=consensus_gap,
        signals=signals,
        innovations=innovations,
        aug_values=aug_values,
        aug_masses=aug_masses,
    )


def bound_trajectory(result: LearningResult, t: int) -> dict[str, float]:
    """High-probability ceiling on each non-true log-ratio at round t."""
    metrics = compute_metrics(result.topology)
    return oracle.log_ratio_bound(metrics, result.model, t, result.delta)


def violates_bound(result: LearningResult, t: int) -> bool:
    """True when any non-true hypothesis breaks its round-t ceiling."""
    bounds = bound_trajectory(result, t)
    model = result.model
    for theta, ceiling in bounds.items():
        idx = model.index(theta)
        if np.any(result.log_ratios[t, :, idx] > ceiling):
            return True
    return False
