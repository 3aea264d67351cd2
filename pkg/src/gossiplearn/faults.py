"""Packet-drop schedules and Byzantine message forging.

Drop schedules are precomputed per (link, round) and are always
B-bounded: every link is operational at least once in any window of B
consecutive rounds.  Byzantine agents act only through the messages they
send; a forged value may differ per receiver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotFaulty
from .topology import Link, SystemTopology

FORGE_STRATEGIES = ("constant", "negate", "amplify", "random", "collude_extreme")


@dataclass(frozen=True)
class DropSchedule:
    """Operational indicators per link, rounds indexed from 1."""

    window_b: int
    rounds: int
    table: dict[Link, np.ndarray]

    def operational(self, link: Link, round_index: int) -> bool:
        if not 1 <= round_index <= self.rounds:
            raise ValueError(f"round {round_index} outside schedule horizon")
        return bool(self.table[link][round_index])

    def is_b_bounded(self) -> bool:
        b = self.window_b
        for flags in self.table.values():
            ops = flags[1:]
            for start in range(0, len(ops) - b + 1):
                if not ops[start : start + b].any():
                    return False
        return True


def all_operational(topology: SystemTopology, rounds: int) -> DropSchedule:
    table = {
        link: np.ones(rounds + 1, dtype=bool) for link in topology.links
    }
    return DropSchedule(window_b=topology.window_b, rounds=rounds, table=table)


def make_schedule(
    topology: SystemTopology,
    drop_prob: float,
    rng: np.random.Generator,
    rounds: int,
    placement: str = "window_end",
) -> DropSchedule:
    """I.i.d. Bernoulli drops with forced deliveries keeping B-boundedness.

    ``window_end`` forces a delivery whenever a link has been dropped for
    B-1 consecutive rounds.  ``uniform`` instead forces one uniformly
    placed round inside each aligned window of B rounds, which gives more
    varied schedules for the same bound.
    """
    if not 0.0 <= drop_prob < 1.0:
        raise ValueError("drop_prob must lie in [0, 1)")
    if placement not in ("window_end", "uniform"):
        raise ValueError(f"unknown placement {placement!r}")
    b = topology.window_b
    table: dict[Link, np.ndarray] = {}
    for link in topology.links:
        flags = np.ones(rounds + 1, dtype=bool)
        drops = rng.random(rounds) < drop_prob
        if placement == "window_end":
            streak = 0
            for t in range(1, rounds + 1):
                if streak == b - 1:
                    operational = True
                else:
                    operational = not drops[t - 1]
                flags[t] = operational
                streak = 0 if operational else streak + 1
        else:
            for start in range(1, rounds + 1, b):
                width = min(b, rounds - start + 1)
                forced = start + int(rng.integers(width))
                for t in range(start, start + width):
                    flags[t] = (not drops[t - 1]) or t == forced
            # The per-block forcing alone leaves straddling windows
            # uncovered; cap drop streaks at B-1 like the default mode.
            streak = 0
            for t in range(1, rounds + 1):
                if streak == b - 1:
                    flags[t] = True
                streak = 0 if flags[t] else streak + 1
        table[link] = flags
    return DropSchedule(window_b=b, rounds=rounds, table=table)


@dataclass(frozen=True)
class ForgeStrategy:
    """Named message-forging policy with its parameters."""

    name: str
    constant: float = 0.0
    kappa: float = 2.0
    low: float = -1.0
    high: float = 1.0
    magnitude: float = 1e6

    def __post_init__(self):
        if self.name not in FORGE_STRATEGIES:
            raise ValueError(f"unknown forge strategy {self.name!r}")


@dataclass(frozen=True)
class ByzantinePlan:
    """Faulty agent set (at most f_bound) and each agent's strategy."""

    faulty: frozenset[int]
    f_bound: int
    strategies: dict[int, ForgeStrategy]

    def __post_init__(self):
        object.__setattr__(self, "faulty", frozenset(self.faulty))
        if len(self.faulty) > self.f_bound:
            raise ValueError("|faulty| exceeds f_bound")
        missing = self.faulty - set(self.strategies)
        if missing:
            raise ValueError(f"no strategy for faulty agents {sorted(missing)}")


def forge(
    plan: ByzantinePlan,
    sender: int,
    receiver,
    honest_value: float,
    round_index: int,
    rng: np.random.Generator,
) -> float:
    """Value agent ``sender`` reports to ``receiver`` instead of the truth.

    ``collude_extreme`` pushes against the direction of the honest value
    (the adversary is assumed omniscient, so it knows which way to pull).
    """
    if sender not in plan.faulty:
        raise NotFaulty(f"agent {sender} is not in the Byzantine set")
    strategy = plan.strategies[sender]
    if strategy.name == "constant":
        return strategy.constant
    if strategy.name == "negate":
        return -honest_value
    if strategy.name == "amplify":
        return strategy.kappa * honest_value
    if strategy.name == "random":
        return float(rng.uniform(strategy.low, strategy.high))
    # collude_extreme
    return -strategy.magnitude if honest_value >= 0 else strategy.magnitude
