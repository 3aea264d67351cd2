"""Hypotheses, per-agent likelihood tables, sampling, and KL machinery.

Every agent observes one private signal per round, drawn from a finite
alphabet whose distribution depends on the unknown true hypothesis.
Tables are clamped away from zero at load so that all log-likelihood
ratios stay bounded.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SupportMismatch

#: Likelihood floor applied at load; zero entries would make log-ratios
#: unbounded.
LIKELIHOOD_FLOOR = 1e-12

#: A KL sum below this is floating-point dust, not identifiability.
KL_TOLERANCE = 1e-9


@dataclass(frozen=True)
class SignalModel:
    """Finite-support likelihood tables for each agent.

    ``tables[agent]`` has one row per hypothesis and one column per symbol
    of that agent's alphabet; rows are probability distributions.
    ``l_bound`` is the largest log-likelihood ratio over all agents,
    symbols, and ordered hypothesis pairs.
    """

    hypotheses: tuple[str, ...]
    truth: str
    tables: dict[int, np.ndarray]
    l_bound: float
    floor: float = LIKELIHOOD_FLOOR

    def __post_init__(self):
        log_tables = {a: np.log(t) for a, t in self.tables.items()}
        cumulative = {
            a: np.cumsum(t[self.truth_index], axis=-1) for a, t in self.tables.items()
        }
        object.__setattr__(self, "_log_tables", log_tables)
        object.__setattr__(self, "_truth_cumulative", cumulative)

    @classmethod
    def build(
        cls,
        hypotheses,
        truth: str,
        tables,
        floor: float = LIKELIHOOD_FLOOR,
    ) -> "SignalModel":
        """Validate, clamp, and renormalize raw tables."""
        hypotheses = tuple(hypotheses)
        if len(hypotheses) < 2:
            raise ValueError("at least two hypotheses are required")
        if len(set(hypotheses)) != len(hypotheses):
            raise ValueError("hypothesis ids must be unique")
        if truth not in hypotheses:
            raise ValueError(f"truth {truth!r} is not a hypothesis")
        clean: dict[int, np.ndarray] = {}
        for agent, raw in tables.items():
            arr = np.asarray(raw, dtype=float)
            if arr.ndim != 2 or arr.shape[0] != len(hypotheses):
                raise ValueError(
                    f"agent {agent}: table must be (n_hypotheses, alphabet)"
                )
            if arr.shape[1] < 1:
                raise ValueError(f"agent {agent}: empty signal alphabet")
            if np.any(arr < 0) or np.any(~np.isfinite(arr)):
                raise ValueError(f"agent {agent}: table entries must be finite and >= 0")
            sums = arr.sum(axis=1)
            if np.any(np.abs(sums - 1.0) > 1e-6):
                raise ValueError(f"agent {agent}: rows must sum to 1")
            arr = np.clip(arr, floor, None)
            arr = arr / arr.sum(axis=1, keepdims=True)
            arr.setflags(write=False)
            clean[int(agent)] = arr
        l_bound = 0.0
        for arr in clean.values():
            logs = np.log(arr)
            spread = logs.max(axis=0) - logs.min(axis=0)
            l_bound = max(l_bound, float(spread.max()))
        return cls(hypotheses, truth, clean, l_bound, floor)

    @property
    def n_hypotheses(self) -> int:
        return len(self.hypotheses)

    @property
    def truth_index(self) -> int:
        return self.hypotheses.index(self.truth)

    def index(self, theta: str) -> int:
        return self.hypotheses.index(theta)

    def alphabet_size(self, agent: int) -> int:
        return self.tables[agent].shape[1]

    def log_table(self, agent: int) -> np.ndarray:
        return self._log_tables[agent]

    def agent_divergence(self, agent: int, theta_a: str, theta_b: str) -> float:
        """KL(l_agent(.|theta_a) || l_agent(.|theta_b))."""
        table = self.tables[agent]
        return kl_divergence(table[self.index(theta_a)], table[self.index(theta_b)])

    def joint_divergence(self, theta_a: str, theta_b: str) -> float:
        """KL between the joint signal distributions under two hypotheses.

        Signals are independent across agents, so the joint divergence is
        the sum of the per-agent ones.
        """
        return sum(
            self.agent_divergence(a, theta_a, theta_b) for a in sorted(self.tables)
        )


def sample_signal(model: SignalModel, agent: int, rng: np.random.Generator) -> int:
    """Draw one symbol index from the agent's true-hypothesis row."""
    cum = model._truth_cumulative[agent]
    u = rng.random()
    idx = int(np.searchsorted(cum, u, side="right"))
    return min(idx, cum.shape[0] - 1)


def log_likelihood(model: SignalModel, agent: int, signal: int, theta: str) -> float:
    return float(model.log_table(agent)[model.index(theta), signal])


def log_likelihood_vector(model: SignalModel, agent: int, signal: int) -> np.ndarray:
    """log l_agent(signal | theta) for every hypothesis, in order."""
    return model.log_table(agent)[:, signal]


def kl_divergence(p, q) -> float:
    """Sum of p_k log(p_k / q_k); zero p entries contribute nothing."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise SupportMismatch(f"support sizes differ: {p.shape} vs {q.shape}")
    mask = p > 0
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


@dataclass(frozen=True)
class ObservabilityReport:
    """Per-pair network-wide divergences and the resulting verdict."""

    divergences: dict[tuple[str, str], float]
    minimum: float
    tolerance: float
    passed: bool

    def weakest_pair(self) -> tuple[str, str]:
        return min(self.divergences, key=self.divergences.get)


def check_global_observability(
    model: SignalModel, tolerance: float = KL_TOLERANCE
) -> ObservabilityReport:
    """Global observability: every ordered pair of distinct hypotheses must
    keep a strictly positive summed divergence across all agents."""
    divergences = {}
    for a in model.hypotheses:
        for b in model.hypotheses:
            if a == b:
                continue
            divergences[(a, b)] = model.joint_divergence(a, b)
    minimum = min(divergences.values())
    return ObservabilityReport(
        divergences=divergences,
        minimum=minimum,
        tolerance=tolerance,
        passed=minimum > tolerance,
    )


def make_peaked_tables(
    agents, n_hypotheses: int, alphabet: int, peak: float = 0.4
) -> dict[int, np.ndarray]:
    """Informative generator: hypothesis k peaks agent j's row at symbol
    (k + j) mod alphabet, remaining mass spread uniformly."""
    if not 1.0 / alphabet < peak < 1.0:
        raise ValueError("peak must exceed the uniform weight and stay below 1")
    rest = (1.0 - peak) / (alphabet - 1)
    tables = {}
    for j in agents:
        rows = np.full((n_hypotheses, alphabet), rest)
        for k in range(n_hypotheses):
            rows[k, (k + j) % alphabet] = peak
        tables[j] = rows
    return tables


def make_uniform_tables(agents, n_hypotheses: int, alphabet: int) -> dict[int, np.ndarray]:
    """Uninformative generator: identical uniform rows (negative control)."""
    return {
        j: np.full((n_hypotheses, alphabet), 1.0 / alphabet) for j in agents
    }
