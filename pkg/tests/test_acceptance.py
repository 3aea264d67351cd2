"""Acceptance suite: one test per release criterion.

Each test prints a single PASS/FAIL line (visible with ``pytest -s``) and
asserts the criterion at its stated tolerance.  Run via:

    pytest tests/test_acceptance.py -v -s
"""

import itertools

import numpy as np

from gossiplearn import oracle
from gossiplearn.faults import ByzantinePlan, ForgeStrategy, make_schedule
from gossiplearn.harness import config_from_dict, run_experiment
from gossiplearn.learning_byzantine import (
    run_byzantine_learning,
    trimmed_filter,
)
from gossiplearn.learning_dropout import run_learning, violates_bound
from gossiplearn.pushsum import run_consensus
from gossiplearn.rng import substream
from gossiplearn.topology import (
    ReducedGraph,
    SystemTopology,
    compute_metrics,
    enumerate_reduced_graphs,
    source_components,
)

from conftest import (
    auto_gamma_topology,
    complete_subnetwork,
    pair_subnetwork,
    peaked_model,
    ring_subnetwork,
)


def report(index: int, name: str, passed: bool, detail: str = "") -> None:
    status = "PASS" if passed else "FAIL"
    extra = f" ({detail})" if detail else ""
    print(f"{status} criterion {index}: {name}{extra}")
    assert passed, f"criterion {index}: {name}{extra}"


def two_ring_topology(b: int) -> SystemTopology:
    nets = (ring_subnetwork(range(0, 4)), ring_subnetwork(range(4, 8)))
    return auto_gamma_topology(nets, {0: 0, 1: 4}, window_b=b)


def two_pair_topology(b: int = 2) -> SystemTopology:
    nets = (pair_subnetwork(0, 1), pair_subnetwork(2, 3))
    return auto_gamma_topology(nets, {0: 0, 1: 2}, window_b=b)


def three_complete_topology() -> SystemTopology:
    nets = (
        complete_subnetwork(range(0, 4)),
        complete_subnetwork(range(4, 8)),
        complete_subnetwork(range(8, 12)),
    )
    return SystemTopology(nets, {0: 0, 1: 4, 2: 8}, gamma=5, window_b=1)


def test_criterion_01_mass_and_value_conservation():
    top = two_ring_topology(b=2)
    worst = 0.0
    for seed in range(10):
        sched = make_schedule(top, 0.5, substream(seed, "drops"), 500)
        inputs = substream(seed, "inputs").normal(size=(8, 1))
        result = run_consensus(top, inputs, sched, 500)
        mass = np.abs(result.aug_masses.sum(axis=1) - 8.0).max()
        value = np.abs(result.aug_values.sum(axis=1) - inputs.sum(axis=0)).max()
        worst = max(worst, float(mass), float(value))
    report(
        1,
        "mass/value conservation over 10 seeds x 500 rounds",
        worst <= 1e-9,
        f"max residual {worst:.3e}",
    )


def test_criterion_02_oracle_equivalence():
    def directed_cycles():
        def cyc(agents):
            agents = tuple(agents)
            n = len(agents)
            from gossiplearn.topology import SubNetwork

            return SubNetwork(
                agents,
                frozenset((agents[i], agents[(i + 1) % n]) for i in range(n)),
            )

        return auto_gamma_topology(
            (cyc(range(0, 3)), cyc(range(3, 6))), {0: 0, 1: 3}, window_b=2
        )

    worst = 0.0
    cases = [(two_ring_topology(2), s) for s in range(5)]
    cases += [(directed_cycles(), s) for s in range(5)]
    for top, seed in cases:
        aug = oracle.AugmentedSystem.from_topology(top)
        assert aug.n_total <= 30
        sched = make_schedule(top, 0.5, substream(seed, "drops"), 40)
        inputs = substream(seed, "inputs").normal(size=(top.n_agents, 1))
        result = run_consensus(top, inputs, sched, 40)
        for t in range(1, 41):
            mat = oracle.build_round_matrix(top, sched, t, aug)
            worst = max(
                worst,
                float(np.abs(mat @ result.aug_values[t - 1] - result.aug_values[t]).max()),
                float(np.abs(mat @ result.aug_masses[t - 1] - result.aug_masses[t]).max()),
            )
        psi = oracle.psi_product(top, sched, 1, 40, aug)
        worst = max(
            worst,
            float(np.abs(psi.T @ result.aug_values[0] - result.aug_values[40]).max()),
        )
    report(
        2,
        "simulation equals the matrix-product oracle (10 schedules)",
        worst <= 1e-9,
        f"max residual {worst:.3e}",
    )


def test_criterion_03_consensus_error_bound():
    top = two_ring_topology(b=2)
    metrics = compute_metrics(top)
    assert metrics.gamma == metrics.window_b * metrics.d_star
    two_gamma = 2 * metrics.gamma
    rounds = 120
    violations = 0
    smallest_margin = np.inf
    for seed in range(20):
        sched = make_schedule(top, 0.5, substream(seed, "drops"), rounds)
        inputs = substream(seed, "inputs").normal(size=(8, 1))
        result = run_consensus(top, inputs, sched, rounds, record_augmented=False)
        for t in range(two_gamma, rounds + 1):
            bound = oracle.consensus_error_bound(metrics, result.inputs, t)
            worst_agent = float(result.errors[t].max())
            smallest_margin = min(smallest_margin, bound - worst_agent)
            if worst_agent > bound:
                violations += 1
    report(
        3,
        "worst-case consensus error bound, 20 seeds, every round >= 2*Gamma",
        violations == 0,
        f"smallest margin {smallest_margin:.3e}",
    )


def test_criterion_04_product_entry_floor():
    """Entry floor for the products the convergence argument consumes:
    those anchored at round 1 (any span >= 2*Gamma) and the interior
    windows aligned to the double fusion period.  Windows straddling the
    fusion cadence contain structural zeros at the in-flight vertices and
    are excluded; see the verification notes."""
    top = two_ring_topology(b=2)
    metrics = compute_metrics(top)
    floor = oracle.entry_lower_bound(metrics)
    aug = oracle.AugmentedSystem.from_topology(top)
    n = top.n_agents
    two_gamma = 2 * metrics.gamma
    rounds = 4 * two_gamma
    violations = 0
    min_entry = np.inf
    for seed in range(10):
        sched = make_schedule(top, 0.5, substream(seed, "drops"), rounds)
        mats = [
            oracle.build_round_matrix(top, sched, t, aug).T
            for t in range(1, rounds + 1)
        ]
        prod = np.eye(aug.n_total)
        for t in range(1, rounds + 1):
            prod = prod @ mats[t - 1]
            if t >= two_gamma:
                entry = float(prod[:n, :n].min())
                min_entry = min(min_entry, entry)
                violations += entry < floor
        for k in range(rounds // two_gamma):
            win = np.eye(aug.n_total)
            for tau in range(k * two_gamma, (k + 1) * two_gamma):
                win = win @ mats[tau]
            entry = float(win[:n, :n].min())
            min_entry = min(min_entry, entry)
            violations += entry < floor
    report(
        4,
        "product entry floor on anchored and aligned windows, 10 schedules",
        violations == 0,
        f"min entry {min_entry:.3e} vs floor {floor:.3e}",
    )


def test_criterion_05_accumulator_reconstruction():
    top = two_pair_topology(b=2)
    model = peaked_model(4, n_hypotheses=3)
    rounds = 40
    worst = 0.0
    for seed in range(5):
        sched = make_schedule(top, 0.3, substream(seed, "drops"), rounds)
        result = run_learning(top, model, sched, rounds, seed, record_augmented=True)
        aug = oracle.AugmentedSystem.from_topology(top)
        via_psi = oracle.reconstruct_via_psi(top, sched, result.innovations, rounds, aug)
        real_z = result.aug_values[rounds, : top.n_agents]
        worst = max(worst, float(np.abs(via_psi - real_z).max()))
    report(
        5,
        "accumulators match the summed product reconstruction (N=4, T=40)",
        worst <= 1e-7,
        f"max residual {worst:.3e}",
    )


def test_criterion_06_learning_success_under_drops():
    top = two_ring_topology(b=3)
    model = peaked_model(8, n_hypotheses=3, peak=0.4)
    rounds = 5000
    truth = model.truth_index
    successes = 0
    oracle_rounds = []
    for seed in range(20):
        sched = make_schedule(top, 0.3, substream(seed, "drops"), rounds)
        result = run_learning(top, model, sched, rounds, seed)
        reached = np.nonzero(result.beliefs[:, :, truth].min(axis=1) > 0.99)[0]
        if reached.size:
            successes += 1
        # Centralized likelihood oracle on the same signal streams: the
        # global posterior must concentrate far inside the horizon, which
        # is what justifies the 5000-round budget.
        log_post = np.zeros(model.n_hypotheses)
        oracle_round = None
        for t in range(1, rounds + 1):
            for a in range(8):
                log_post = log_post + model.log_table(a)[:, result.signals[t - 1, a]]
            post = np.exp(log_post - log_post.max())
            post /= post.sum()
            if post[truth] > 0.99:
                oracle_round = t
                break
        assert oracle_round is not None and oracle_round < rounds / 10
        oracle_rounds.append(oracle_round)
    report(
        6,
        "all agents reach belief > 0.99 within 5000 rounds, >= 18/20 seeds",
        successes >= 18,
        f"{successes}/20 seeds; centralized oracle concentrates by round "
        f"{max(oracle_rounds)}",
    )


def test_criterion_07_log_ratio_bound_statistics():
    top = two_pair_topology(b=2)
    model = peaked_model(4, n_hypotheses=2, peak=0.4)
    rounds = 300
    violations = 0
    for seed in range(50):
        sched = make_schedule(top, 0.3, substream(seed, "drops"), rounds)
        result = run_learning(top, model, sched, rounds, seed, delta=0.1)
        violations += violates_bound(result, rounds)
    report(
        7,
        "log-ratio ceiling violated in at most 9 of 50 runs (delta=0.1)",
        violations <= 9,
        f"{violations}/50 violations",
    )


def test_criterion_08_trimmed_filter_safety():
    grid = (-2.0, -1.0, 0.0, 1.0, 2.0)
    checked = 0
    safe = True
    witness = ""
    for f_bound in (1, 2):
        for length in range(2 * f_bound + 1, 8):
            for values in itertools.combinations_with_replacement(grid, length):
                entries = [(v, i) for i, v in enumerate(values)]
                survivors = trimmed_filter(entries, f_bound)
                for k in range(f_bound + 1):
                    for bad in itertools.combinations(range(length), k):
                        honest = [v for i, v in enumerate(values) if i not in bad]
                        lo, hi = min(honest), max(honest)
                        checked += 1
                        if any(not lo <= v <= hi for v, _ in survivors):
                            safe = False
                            witness = f"values={values} adversarial={bad} F={f_bound}"
    report(
        8,
        "trimmed survivors stay inside the honest hull (exhaustive)",
        safe,
        witness or f"{checked} cases checked",
    )


def _byzantine_scenario(byz_agent: int, seeds, rounds: int = 3000):
    top = three_complete_topology()
    model = peaked_model(12, n_hypotheses=3, peak=0.4)
    plan = ByzantinePlan(
        faulty=frozenset({byz_agent}),
        f_bound=1,
        strategies={byz_agent: ForgeStrategy("collude_extreme", magnitude=1e6)},
    )
    c_set = {0, 1}
    truth = model.truth_index
    stable_cutoff = int(rounds * 0.7)
    tail_start = int(rounds * 0.8)
    all_ok = True
    detail = ""
    for seed in seeds:
        result = run_byzantine_learning(top, model, plan, c_set, rounds, seed)
        for agent in result.normal_agents:
            stable = result.first_stable_round(agent, truth)
            if stable is None or stable > stable_cutoff:
                all_ok = False
                detail = f"seed {seed} agent {agent} unstable (from {stable})"
        c_agents = [
            a
            for i in c_set
            for a in top.sub_networks[i].agents
            if a not in plan.faulty
        ]
        tail = np.arange(tail_start, rounds + 1)
        for agent in c_agents:
            for p, (i, j) in enumerate(result.pairs):
                if i != truth:
                    continue
                ratios = result.r_history[tail, agent, p] / tail.astype(float) ** 2
                if ratios.mean() <= 0:
                    all_ok = False
                    detail = f"seed {seed} agent {agent} pair {(i, j)} ratio <= 0"
    return all_ok, detail


def test_criterion_09_byzantine_learning():
    ok_outside, detail_a = _byzantine_scenario(byz_agent=9, seeds=range(20))
    ok_inside, detail_b = _byzantine_scenario(byz_agent=1, seeds=range(20))
    report(
        9,
        "all normal agents decode the truth, stable over the final 30%, "
        "with positive r/t^2 tails (Byzantine outside and inside C)",
        ok_outside and ok_inside,
        detail_a or detail_b or "40/40 runs",
    )


def test_criterion_10_reduced_graph_certification():
    net = complete_subnetwork(range(4))
    graphs = enumerate_reduced_graphs(net, frozenset(), 1)
    count_ok = len(graphs) == 81

    def independent_sources(nodes, edges):
        nodes = sorted(nodes)
        reach = {a: {a} for a in nodes}
        changed = True
        while changed:
            changed = False
            for s, r in edges:
                extra = reach[r] - reach[s]
                if extra:
                    reach[s] |= extra
                    changed = True
        comps = {
            frozenset(x for x in nodes if a in reach[x] and x in reach[a])
            for a in nodes
        }
        sources = set()
        for comp in comps:
            if not any(s not in comp and r in comp for s, r in edges):
                sources.add(comp)
        return sources

    rng = np.random.default_rng(123)
    verdicts_ok = True
    for _ in range(200):
        n = int(rng.integers(1, 7))
        edges = frozenset(
            (int(a), int(b))
            for a in range(n)
            for b in range(n)
            if a != b and rng.random() < rng.uniform(0.1, 0.8)
        )
        rg = ReducedGraph(frozenset(range(n)), edges)
        mine = set(source_components(rg))
        theirs = independent_sources(range(n), edges)
        if mine != theirs:
            verdicts_ok = False
    report(
        10,
        "reduced-graph count and source verdicts match independent oracles",
        count_ok and verdicts_ok,
        f"chi(K4, F=1) = {len(graphs)}",
    )


def test_criterion_11_determinism(tmp_path):
    data = {
        "topology": {
            "sub_networks": [
                {
                    "agents": [0, 1, 2, 3],
                    "edges": [
                        [0, 1], [1, 0], [1, 2], [2, 1],
                        [2, 3], [3, 2], [3, 0], [0, 3],
                    ],
                },
            ],
            "designated": [0],
            "gamma": "auto",
            "window_b": 2,
        },
        "signals": {
            "hypotheses": ["h0", "h1", "h2"],
            "truth": "h0",
            "generator": {"kind": "peaked", "alphabet": 4, "peak": 0.4},
        },
        "faults": {"mode": "drops", "drop_prob": 0.4},
        "run": {"rounds": 60, "seeds": [5], "format": "csv"},
    }
    config = config_from_dict(data)
    identical = True
    for mode in ("consensus", "learn-drop"):
        run_experiment(config, 5, mode, out_dir=tmp_path / "a")
        run_experiment(config, 5, mode, out_dir=tmp_path / "b")
        first = (tmp_path / "a" / f"{mode}-seed5.csv").read_bytes()
        second = (tmp_path / "b" / f"{mode}-seed5.csv").read_bytes()
        identical = identical and first == second
    report(11, "identical (config, seed) runs are byte-identical", identical)
