"""Independent matrix oracle for the gossip dynamics.

The lossy push-sum dynamics become a linear iteration on an augmented
vertex set: one virtual vertex per directed link holds whatever that
link has absorbed but not yet delivered.  This module builds the per
round column-stochastic matrices from first principles (degrees and the
delivery indicators only), entirely independent of the per-agent counter
bookkeeping in ``pushsum``, and provides the matrix products, ergodic
coefficients, and bound evaluators used for verification.

Dense matrices only; instances are capped at a few hundred vertices
because this exists for verification, not scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HorizonTooSmall, InstanceTooLarge, NotRowStochastic
from .faults import DropSchedule
from .signals import SignalModel
from .topology import GraphMetrics, Link, SystemTopology

#: Hard cap on augmented-system size for the dense oracle.
MAX_AUGMENTED_VERTICES = 200


@dataclass(frozen=True)
class AugmentedSystem:
    """Vertex indexing: real agents 0..N-1, then one vertex per link."""

    n_real: int
    link_index: tuple[Link, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "_position",
            {link: self.n_real + k for k, link in enumerate(self.link_index)},
        )

    @property
    def n_virtual(self) -> int:
        return len(self.link_index)

    @property
    def n_total(self) -> int:
        return self.n_real + self.n_virtual

    def virtual_index(self, link: Link) -> int:
        return self._position[link]

    @classmethod
    def from_topology(cls, topology: SystemTopology) -> "AugmentedSystem":
        system = cls(n_real=topology.n_agents, link_index=topology.links)
        if system.n_total > MAX_AUGMENTED_VERTICES:
            raise InstanceTooLarge(
                f"augmented system has {system.n_total} vertices "
                f"(cap {MAX_AUGMENTED_VERTICES})"
            )
        return system


def fusion_matrix(topology: SystemTopology, aug: AugmentedSystem | None = None) -> np.ndarray:
    """Doubly stochastic mixing of the designated agents, identity elsewhere."""
    aug = aug or AugmentedSystem.from_topology(topology)
    m = topology.m_count
    f = np.eye(aug.n_total)
    designated = topology.designated
    for a in designated:
        for b in designated:
            f[a, b] = (m + 1) / (2.0 * m) if a == b else 1.0 / (2.0 * m)
    return f


def build_round_matrix(
    topology: SystemTopology,
    schedule: DropSchedule,
    round_index: int,
    aug: AugmentedSystem | None = None,
) -> np.ndarray:
    """Column-stochastic matrix M[t] such that state[t] = M[t] state[t-1].

    On fusion rounds (t mod gamma == 0) the plain round matrix is
    left-multiplied by the fusion matrix.
    """
    aug = aug or AugmentedSystem.from_topology(topology)
    mat = _bar_matrix(topology, schedule, round_index, aug)
    if round_index % topology.gamma == 0:
        mat = fusion_matrix(topology, aug) @ mat
    return mat


def _bar_matrix(
    topology: SystemTopology,
    schedule: DropSchedule,
    round_index: int,
    aug: AugmentedSystem,
) -> np.ndarray:
    mat = np.zeros((aug.n_total, aug.n_total))
    for net in topology.sub_networks:
        degree = {a: net.out_degree(a) for a in net.agents}
        for j in net.agents:
            dj = degree[j] + 1
            mat[j, j] = 1.0 / dj**2
            for jp in net.in_neighbors(j):
                on = 1.0 if schedule.operational((jp, j), round_index) else 0.0
                mat[j, jp] = on / (dj * (degree[jp] + 1))
                mat[j, aug.virtual_index((jp, j))] = on / dj
        for link in net.sorted_links():
            jp, j = link
            row = aug.virtual_index(link)
            djp = degree[jp] + 1
            on = 1.0 if schedule.operational(link, round_index) else 0.0
            # The sender feeds its virtual vertex every round; on a drop the
            # vertex additionally absorbs the undelivered share and keeps
            # its own backlog.
            mat[row, jp] = 1.0 / djp**2 + (1.0 - on) / djp
            for k in net.in_neighbors(jp):
                k_on = 1.0 if schedule.operational((k, jp), round_index) else 0.0
                mat[row, k] = k_on / ((degree[k] + 1) * djp)
                mat[row, aug.virtual_index((k, jp))] = k_on / djp
            mat[row, row] = 1.0 - on
    return mat


def psi_product(
    topology: SystemTopology,
    schedule: DropSchedule,
    r: int,
    t: int,
    aug: AugmentedSystem | None = None,
) -> np.ndarray:
    """Row-stochastic product M^T[r] M^T[r+1] ... M^T[t].

    By convention the empty product (r == t + 1) is the identity.
    Entry (u, v) is the influence of vertex u's state at round r-1 on
    vertex v's state at round t.
    """
    aug = aug or AugmentedSystem.from_topology(topology)
    if not 1 <= r <= t + 1:
        raise ValueError(f"need 1 <= r <= t+1, got r={r}, t={t}")
    product = np.eye(aug.n_total)
    for tau in range(r, t + 1):
        product = product @ build_round_matrix(topology, schedule, tau, aug).T
    return product


def apply_rounds(
    state_values: np.ndarray,
    state_masses: np.ndarray,
    topology: SystemTopology,
    schedule: DropSchedule,
    round_index: int,
    aug: AugmentedSystem | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One oracle step: multiply the stacked state by M[round_index]."""
    aug = aug or AugmentedSystem.from_topology(topology)
    mat = build_round_matrix(topology, schedule, round_index, aug)
    return mat @ state_values, mat @ state_masses


def ergodic_coefficients(a) -> tuple[float, float]:
    """(delta, lambda) of a row-stochastic matrix.

    delta is the largest column-wise spread between rows; lambda is one
    minus the smallest shared mass between any two rows.  Both vanish
    exactly when all rows coincide.
    """
    mat = np.asarray(a, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise NotRowStochastic("expected a square matrix")
    sums = mat.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > 1e-9):
        raise NotRowStochastic(f"row sums deviate by {np.abs(sums - 1).max():.3e}")
    delta = float((mat.max(axis=0) - mat.min(axis=0)).max())
    n = mat.shape[0]
    shared = 1.0
    for i in range(n):
        pairwise = np.minimum(mat[i], mat[i + 1 :]).sum(axis=1)
        if pairwise.size:
            shared = min(shared, float(pairwise.min()))
    lam = 1.0 - shared
    return delta, lam


def entry_lower_bound(metrics: GraphMetrics) -> float:
    """Floor for the agent-block entries of round-matrix products.

    Holds for products spanning at least 2*Gamma rounds that start at the
    first round or at a multiple of the double fusion period; windows that
    straddle the fusion cadence can contain structural zeros and are not
    covered.
    """
    m = metrics.m_count
    return (metrics.min_beta ** (2 * metrics.d_star * metrics.window_b)) / (4.0 * m * m)


def consensus_error_bound(metrics: GraphMetrics, inputs, t: int) -> float:
    """Worst-case consensus error at round t >= 2*Gamma.

    Prefactor sums the norms of all N input vectors; the decay exponent
    is floor(t / 2 Gamma) - 1.
    """
    two_gamma = 2 * metrics.gamma
    if t < two_gamma:
        raise HorizonTooSmall(f"bound needs t >= {two_gamma}, got {t}")
    arr = np.atleast_2d(np.asarray(inputs, dtype=float))
    norm_sum = float(np.linalg.norm(arr, axis=1).sum())
    m = metrics.m_count
    denom = (metrics.min_beta ** (2 * metrics.d_star * metrics.window_b)) * metrics.n_agents
    prefactor = 4.0 * m * m * norm_sum / denom
    exponent = t // two_gamma - 1
    return prefactor * metrics.gamma_rate**exponent


def _gamma_rate_root(metrics: GraphMetrics) -> tuple[float, float]:
    """(gamma^(1/2Gamma), 1 - gamma^(1/2Gamma)) computed without cancellation."""
    two_gamma = 2 * metrics.gamma
    log_rate = math.log(metrics.gamma_rate)
    root = math.exp(log_rate / two_gamma)
    one_minus = -math.expm1(log_rate / two_gamma)
    return root, one_minus


def consensus_term_bound_geometric(metrics: GraphMetrics, l_bound: float) -> float:
    """Closed-form ceiling on the accumulated consensus error of the
    log-likelihood averages: (4 M^2 L / (N beta^...)) * q / (1 - q) with
    q = gamma^(1/2Gamma)."""
    m = metrics.m_count
    root, one_minus = _gamma_rate_root(metrics)
    denom = (
        metrics.n_agents
        * one_minus
        * (metrics.min_beta ** (2 * metrics.d_star * metrics.window_b))
    )
    return 4.0 * m * m * l_bound * root / denom


def consensus_term_bound_exact(metrics: GraphMetrics, l_bound: float, t: int) -> float:
    """Floor/ceiling-exact version of the accumulated consensus error.

    Uses delta(Psi(r, t)) <= min(1, gamma^(floor(t/2G) - ceil(r/2G)))
    summed over r = 1..t; the smooth (t-r)/2G exponent would understate
    the provable bound, so it is reported separately, never asserted.
    """
    m = metrics.m_count
    two_gamma = 2 * metrics.gamma
    total = 0.0
    for r in range(1, t + 1):
        exponent = t // two_gamma - math.ceil(r / two_gamma)
        total += min(1.0, metrics.gamma_rate**exponent) if exponent > 0 else 1.0
    denom = metrics.n_agents * (
        metrics.min_beta ** (2 * metrics.d_star * metrics.window_b)
    )
    return 4.0 * m * m * l_bound * total / denom


def log_ratio_bound(
    metrics: GraphMetrics,
    model: SignalModel,
    t: int,
    delta: float,
) -> dict[str, float]:
    """High-probability ceiling on log(mu(theta)/mu(truth)) at round t.

    Linear drift down at the joint divergence rate, a sqrt(t) noise term,
    and a constant consensus-error term.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if t < 1:
        raise HorizonTooSmall("bound needs t >= 1")
    noise = model.l_bound * math.sqrt(2.0 * t * math.log(model.n_hypotheses / delta))
    consensus = 2.0 * consensus_term_bound_geometric(metrics, model.l_bound)
    bounds = {}
    for theta in model.hypotheses:
        if theta == model.truth:
            continue
        drift = model.joint_divergence(model.truth, theta)
        bounds[theta] = -(t / metrics.n_agents) * drift + noise + consensus
    return bounds


def reconstruct_learning_state(
    topology: SystemTopology,
    schedule: DropSchedule,
    innovations: np.ndarray,
    rounds: int,
    aug: AugmentedSystem | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Replay the learning dynamics through the matrices alone.

    ``innovations[t, j]`` is the vector added to real agent j right after
    the round-t mixing and before any fusion of round t.  Returns the
    stacked values (n_total, d) and masses at the end of ``rounds``.
    """
    aug = aug or AugmentedSystem.from_topology(topology)
    dim = innovations.shape[2]
    values = np.zeros((aug.n_total, dim))
    masses = np.zeros(aug.n_total)
    masses[: aug.n_real] = 1.0
    fusion = fusion_matrix(topology, aug)
    for t in range(1, rounds + 1):
        bar = _bar_matrix(topology, schedule, t, aug)
        values = bar @ values
        masses = bar @ masses
        values[: aug.n_real] += innovations[t]
        if t % topology.gamma == 0:
            values = fusion @ values
            masses = fusion @ masses
    return values, masses


def reconstruct_via_psi(
    topology: SystemTopology,
    schedule: DropSchedule,
    innovations: np.ndarray,
    t: int,
    aug: AugmentedSystem | None = None,
) -> np.ndarray:
    """Closed-form reconstruction: z[t] = sum_r (product of later rounds
    applied to the round-r innovation).

    Independent check of the recursive replay; returns real-agent values
    (n_real, d).
    """
    aug = aug or AugmentedSystem.from_topology(topology)
    dim = innovations.shape[2]
    fusion = fusion_matrix(topology, aug)
    total = np.zeros((aug.n_total, dim))
    suffix = np.eye(aug.n_total)  # M[t] ... M[r+1], built backwards
    for r in range(t, 0, -1):
        stacked = np.zeros((aug.n_total, dim))
        stacked[: aug.n_real] = innovations[r]
        if r % topology.gamma == 0:
            stacked = fusion @ stacked
        total += suffix @ stacked
        suffix = suffix @ build_round_matrix(topology, schedule, r, aug)
    return total[: aug.n_real]
