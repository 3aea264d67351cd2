"""Fault-tolerant gossip consensus and social learning, with matrix oracles.

Simulates hierarchical robust push-sum over packet-dropping links,
non-Bayesian learning on top of it, and Byzantine-resilient pairwise
learning dynamics, each verifiable against independent matrix-product
and brute-force oracles.
"""

from . import errors
from .faults import ByzantinePlan, DropSchedule, ForgeStrategy, all_operational, forge, make_schedule
from .harness import ExperimentConfig, config_from_dict, load_config, run_experiment, verify
from .learning_byzantine import (
    ByzantineResult,
    agent_pair_step,
    ps_gossip_round,
    run_byzantine_learning,
    sample_representatives,
    trimmed_filter,
)
from .learning_dropout import LearningResult, belief_project, run_learning
from .oracle import AugmentedSystem, build_round_matrix, ergodic_coefficients, psi_product
from .pushsum import AgentState, ConsensusResult, fusion_round, local_round, run_consensus
from .signals import SignalModel, check_global_observability, kl_divergence, sample_signal
from .topology import (
    GraphMetrics,
    ReducedGraph,
    SubNetwork,
    SystemTopology,
    certify_byzantine_network,
    compute_metrics,
    enumerate_reduced_graphs,
    has_unique_source_component,
)

__version__ = "0.1.0"
