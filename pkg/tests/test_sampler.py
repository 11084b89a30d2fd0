import math
from collections import Counter
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hypercollapse import hypergraph as hg
from hypercollapse.errors import DomainError
from hypercollapse.mixing import MixingDistribution
from hypercollapse.rng import make_rng, trial_rng
from hypercollapse.sampler import EventStream, sample_process, sample_static, uniform_subsets
from hypercollapse.stats import tv_empirical

SEED = 20240611


# mixing distribution

def test_eval_examples():
    assert MixingDistribution((0, 1.0)).eval(0.5) == (0.25, 1.0, 2.0)
    assert MixingDistribution((0.2, 0, 0.8)).eval(0.0) == (0.0, 0.2, 0.0)
    with pytest.raises(DomainError):
        MixingDistribution((1.0,)).eval(1.5)


@given(st.lists(st.floats(0, 1), min_size=1, max_size=8).filter(lambda c: sum(c) > 1e-3))
def test_probability_normalizes_at_one(c):
    m = MixingDistribution(tuple(x / sum(c) for x in c))
    assert m.eval(1.0)[0] == pytest.approx(1.0, abs=1e-9)


def test_mixing_validation():
    with pytest.raises(ValueError):
        MixingDistribution((0.5, 0.4))
    with pytest.raises(ValueError):
        MixingDistribution((-0.1, 1.1))
    assert MixingDistribution((0.5, 0.4), is_probability=False).coeffs == (0.5, 0.4)
    assert MixingDistribution.from_dict({2: 1.0}).coeffs == (0.0, 1.0)


# static sampler

def test_zero_beta_is_empty():
    beta = MixingDistribution((0.0,), is_probability=False)
    assert sample_static(beta, 10, 1).num_edges == 0


def test_patch_count_is_poisson():
    beta = MixingDistribution((1.0,), is_probability=False)
    counts = [sample_static(beta, 1000, trial_rng(SEED, i)).num_edges for i in range(200)]
    se = math.sqrt(1000 / 200)
    assert abs(np.mean(counts) - 1000) < 3 * se


def test_static_deterministic():
    beta = MixingDistribution((0.3, 0.5, 0.2), is_probability=False)
    assert sample_static(beta, 50, 7) == sample_static(beta, 50, 7)


def test_sizes_above_n_skipped():
    beta = MixingDistribution((0, 0, 0, 0, 5.0), is_probability=False)
    assert sample_static(beta, 4, 1).num_edges == 0


def test_uniform_subsets_uniform():
    rng = make_rng(SEED)
    rows = uniform_subsets(6, 3, 40000, rng)
    counts = Counter(map(tuple, rows.tolist()))
    assert set(counts) == set(combinations(range(6), 3))
    freq = np.array(list(counts.values())) / 40000
    assert np.abs(freq - 1 / 20).max() < 4 * math.sqrt(0.05 * 0.95 / 40000)


def test_two_stage_matches_per_subset_definition():
    """Full multiplicity vector against the literal per-subset Poisson sampler (chi-square)."""
    from scipy import stats as sst

    n = 5
    beta = MixingDistribution((0.2, 0.15, 0.1), is_probability=False)
    subsets = [c for k in (1, 2, 3) for c in combinations(range(n), k)]
    means = np.array([n * beta.coeff(len(a)) / math.comb(n, len(a)) for a in subsets])
    reps = 100000
    rng = make_rng(SEED, 1)
    literal = Counter(map(tuple, rng.poisson(means, size=(reps, len(subsets))).tolist()))
    index = {a: i for i, a in enumerate(subsets)}
    two = Counter()
    rng2 = make_rng(SEED, 2)
    for _ in range(reps):
        v = [0] * len(subsets)
        for e in sample_static(beta, n, rng2).edges:
            v[index[e]] += 1
        two[tuple(v)] += 1
    keys = [k for k in set(literal) | set(two) if literal[k] + two[k] >= 20]
    table = np.array([[literal[k] for k in keys], [two[k] for k in keys]])
    p = sst.chi2_contingency(table)[1]
    assert p > 0.01


def test_simplify_patch_correction():
    """(patches - simplified patches)/N concentrates at b + exp(-b) - 1."""
    b = 0.8
    beta = MixingDistribution((b,), is_probability=False)
    h = sample_static(beta, 200000, SEED)
    diff = (h.patch_count - hg.simplify(h).patch_count) / 200000
    assert abs(diff - (b + math.exp(-b) - 1)) < 0.005


# process

def test_process_rate():
    rho = MixingDistribution((0.3, 0.7))
    counts = [sample_process(rho, 100, 0.5, trial_rng(SEED, i)).num_events for i in range(200)]
    assert abs(np.mean(counts) - 50) < 3 * math.sqrt(50 / 200)


def test_tiny_horizon_mostly_empty():
    rho = MixingDistribution((1.0,))
    empties = sum(sample_process(rho, 10, 1e-6, trial_rng(SEED, i)).num_events == 0 for i in range(100))
    assert empties >= 99


def test_graph_process_edges_have_size_two():
    s = sample_process(MixingDistribution((0, 1.0)), 4, 3.0, SEED)
    assert set(np.diff(s.ptr).tolist()) <= {2}
    assert np.all(np.diff(s.taus) > 0) and s.taus.max() <= 3.0


def test_large_k_events_kept_as_markers():
    rho = MixingDistribution((0.5, 0, 0, 0, 0, 0.5))
    s = sample_process(rho, 4, 5.0, SEED)
    big = s.ks > 4
    assert big.any()
    assert np.all(np.diff(s.ptr)[big] == 0)
    assert s.snapshot_at(5.0).num_edges == int((~big).sum())


def test_cardinality_law():
    rho = MixingDistribution((0.2, 0.5, 0.3))
    s = sample_process(rho, 1000, 20.0, SEED)
    freq = np.bincount(s.ks, minlength=4)[1:] / s.num_events
    assert np.abs(freq - np.array(rho.coeffs)).max() < 4 * math.sqrt(0.25 / s.num_events)


def test_snapshot_examples():
    s = sample_process(MixingDistribution((0.4, 0.6)), 20, 2.0, SEED)
    assert s.snapshot_at(0.0).num_edges == 0
    assert s.snapshot_at(2.0).num_edges == s.num_events
    a, b = s.snapshot_at(0.7).edges, s.snapshot_at(1.3).edges
    assert b[: len(a)] == a
    with pytest.raises(DomainError):
        s.snapshot_at(2.5)


def test_snapshot_matches_static_law():
    rho = MixingDistribution((0.3, 0.7))
    t, n = 0.6, 50
    a = [sample_process(rho, n, 1.0, trial_rng(SEED, i, 1)).snapshot_at(t).num_edges for i in range(10000)]
    b = [sample_static(rho.scaled(t), n, trial_rng(SEED, i, 2)).num_edges for i in range(10000)]
    assert tv_empirical(np.array(a), np.array(b)) < 0.05


def test_path_trivial_grid():
    s = sample_process(MixingDistribution((0.5, 0.5)), 10, 1.0, SEED)
    assert s.identifiability_path([0.0]) == [(0.0, 0.0, 0.0)]


@settings(max_examples=60)
@given(st.integers(1, 30), st.integers(0, 2 ** 32 - 1))
def test_path_matches_scratch_collapse(n, seed):
    s = sample_process(MixingDistribution((0.3, 0.4, 0.3)), n, 2.0, seed)
    grid = np.linspace(0, 2.0, 9)
    path = s.identifiability_path(grid)
    for t, v, e in path:
        r = hg.collapse(s.snapshot_at(t))
        assert (v, e) == (len(r.identifiable_vertices) / n, r.identifiable_edge_count / n)
    vs = [p[1] for p in path]
    es = [p[2] for p in path]
    assert vs == sorted(vs) and es == sorted(es)


def test_stream_csv_roundtrip(tmp_path):
    s = sample_process(MixingDistribution((0.5, 0, 0, 0, 0.5)), 3, 2.0, SEED)
    p = tmp_path / "events.csv"
    s.to_csv(p)
    assert p.read_text().splitlines()[0] == "tau,k,vertices"
    t = EventStream.from_csv(p, 3, 2.0)
    assert t.events() == s.events()


def test_stream_deterministic(tmp_path):
    rho = MixingDistribution((0.5, 0.5))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    sample_process(rho, 30, 1.0, 5).to_csv(a)
    sample_process(rho, 30, 1.0, 5).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
