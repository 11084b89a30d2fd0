import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _strategies import components, hypergraphs, multigraphs, naive_collapse
from hypercollapse import hypergraph as hg
from hypercollapse.errors import InvalidVertex, NotAGraph, PatchesPresent
from hypercollapse.hypergraph import Hypergraph


def H(n, *edges):
    return Hypergraph.from_edges(n, edges)


# insert_edge

def test_insert_canonicalizes():
    h = hg.insert_edge(Hypergraph.empty(3), {2, 0, 1})
    assert h.edges == [(0, 1, 2)]


def test_insert_twice_is_multiset():
    h = hg.insert_edge(hg.insert_edge(Hypergraph.empty(3), [0, 1]), [1, 0])
    assert h.multiplicity()[(0, 1)] == 2


def test_insert_empty_is_debris():
    h = hg.insert_edge(Hypergraph.empty(3), [])
    assert h.debris_count == 1 and h.multiplicity()[()] == 1


def test_insert_keeps_labels():
    h = H(4, [3, 1], [0])
    h2 = hg.insert_edge(h, [2])
    assert h2.edges[:2] == h.edges


@pytest.mark.parametrize("bad", [[3], [-1], [0, 0]])
def test_invalid_vertex(bad):
    with pytest.raises(InvalidVertex):
        hg.insert_edge(Hypergraph.empty(3), bad)


# restrict

def test_restrict_examples():
    assert hg.restrict(H(3, [0, 1], [1, 2]), {1}).edges == [(0,), (2,)]
    assert hg.restrict(H(2, [0, 1]), {0, 1}).edges == [()]
    assert hg.restrict(H(2, [0, 1], [0, 1]), {0}).multiplicity()[(1,)] == 2


@given(hypergraphs(), st.data())
def test_restrict_composes(h, data):
    vs = list(range(h.num_vertices))
    s1 = set(data.draw(st.lists(st.sampled_from(vs), unique=True)))
    s2 = set(data.draw(st.lists(st.sampled_from(vs), unique=True))) - s1
    assert hg.restrict(hg.restrict(h, s1), s2) == hg.restrict(h, s1 | s2)


@given(hypergraphs(), st.data())
def test_restrict_matches_definition(h, data):
    s = set(data.draw(st.lists(st.sampled_from(range(h.num_vertices)), unique=True)))
    expect = [tuple(v for v in e if v not in s) for e in h.edges]
    assert hg.restrict(h, s).edges == expect


# collapse

def test_collapse_no_patches():
    h = H(3, [0, 1], [1, 2])
    r = hg.collapse(h)
    assert r.identifiable_vertices == frozenset() and r.residual == h


def test_collapse_chain_example():
    r = hg.collapse(H(2, [0], [0, 1]))
    assert r.identifiable_vertices == {0, 1} and r.identifiable_edge_count == 2


def test_figure_two_asymmetry():
    u, v, w = 0, 1, 2
    base = [[v, w], [u, v, w]]
    assert hg.collapse(H(3, *base, [v])).identifiable_vertices == {u, v, w}
    assert hg.collapse(H(3, *base, [u])).identifiable_vertices == {u}


def test_trace_semantics():
    # two patches on vertex 0: one step removes the vertex, the other patch becomes debris
    r = hg.collapse(H(3, [0], [0], [0, 1]))
    tr = r.trace
    assert tr.ys == [2, 1, 0] and tr.zs == [0, 2, 3]
    assert tr.stop_index == 2


@settings(max_examples=200)
@given(hypergraphs(), st.lists(st.integers(0, 2 ** 32 - 1), min_size=3, max_size=3))
def test_order_invariance(h, seeds):
    base = hg.collapse(h)
    for s in seeds:
        r = hg.collapse(h, order_seed=s)
        assert r.identifiable_vertices == base.identifiable_vertices
        assert r.identifiable_edge_count == base.identifiable_edge_count


@settings(max_examples=200)
@given(hypergraphs())
def test_matches_naive_oracle(h):
    vs, count = naive_collapse(h.num_vertices, h.edges)
    r = hg.collapse(h)
    assert set(r.identifiable_vertices) == vs
    assert r.identifiable_edge_count == count


@given(hypergraphs(), st.integers(0, 2 ** 32 - 1))
def test_debris_accounting(h, seed):
    r = hg.collapse(h, order_seed=seed)
    vstar = r.identifiable_vertices
    inside = sum(1 for e in h.edges if set(e) <= vstar)
    assert r.identifiable_edge_count == inside == r.trace.zs[-1]
    assert r.identifiable_edge_count + r.residual.num_edges == h.num_edges
    assert r.residual.patch_count == 0 and r.residual.debris_count == 0


@given(hypergraphs(), st.integers(0, 2 ** 32 - 1))
def test_trace_invariants(h, seed):
    tr = hg.collapse(h, order_seed=seed).trace
    ys, zs = tr.ys, tr.zs
    assert min(ys) >= 0 and ys[-1] == 0
    assert all(y > 0 for y in ys[:-1])
    assert all(a <= b for a, b in zip(zs, zs[1:]))


@given(hypergraphs(), st.data())
def test_monotone_under_insertion(h, data):
    k = data.draw(st.integers(0, min(3, h.num_vertices)))
    e = data.draw(st.lists(st.integers(0, h.num_vertices - 1), min_size=k, max_size=k, unique=True))
    assert hg.collapse(h).identifiable_vertices <= hg.collapse(hg.insert_edge(h, e)).identifiable_vertices


@given(hypergraphs())
def test_residual_is_restriction(h):
    r = hg.collapse(h)
    full = hg.restrict(h, r.identifiable_vertices)
    assert r.residual.edges == [full.edges[i] for i in r.residual_labels]


# domains

def test_domain_examples():
    assert hg.domain_of(Hypergraph.empty(4), 2) == ({2}, 0)
    u, v, w = 0, 1, 2
    h = H(3, [v, w], [u, v, w])
    assert hg.domain_of(h, v) == ({u, v, w}, 2)
    assert hg.domain_of(h, u) == ({u}, 0)
    assert hg.domain_of(H(3, [0, 1], [1, 2]), 0)[0] == {0, 1, 2}


def test_domain_rejects_patches():
    with pytest.raises(PatchesPresent):
        hg.domain_of(H(3, [0], [1, 2]), 1)


@given(multigraphs(), st.data())
def test_domain_is_component_on_graphs(g, data):
    v = data.draw(st.integers(0, g.num_vertices - 1))
    comp = components(g.num_vertices, g.edges)
    dom, _ = hg.domain_of(g, v)
    assert dom == comp[v]
    assert hg.domain_counts(g, v)[0] == len(comp[v])


# dual and 2-core

def test_dual_examples():
    d = hg.dual(H(3, [0, 1], [1, 2]))
    assert d.num_vertices == 2 and d.edges == [(0,), (0, 1), (1,)]
    e = hg.dual(Hypergraph.empty(3))
    assert e.num_vertices == 0 and e.edges == [(), (), ()]


@given(hypergraphs())
def test_dual_involution(h):
    assert np.array_equal(hg.incidence_matrix(hg.dual(hg.dual(h))), hg.incidence_matrix(h))
    assert np.array_equal(hg.incidence_matrix(hg.dual(h)), hg.incidence_matrix(h).T)


def test_two_core_examples():
    assert hg.two_core(H(3, [0, 1], [1, 2], [0, 2])) == {0, 1, 2}
    assert hg.two_core(H(3, [0, 1], [1, 2])) == set()
    assert hg.two_core(H(4, [0, 1], [1, 2], [0, 2], [2, 3])) == {0, 1, 2}


def test_two_core_rejects_hyperedges():
    with pytest.raises(NotAGraph):
        hg.two_core(H(3, [0, 1, 2]))


@settings(max_examples=300)
@given(multigraphs())
def test_two_core_routes_agree(g):
    assert hg.two_core_peel(g) == hg.two_core_dual(g)


# simplify

def test_simplify_examples():
    assert hg.simplify(H(2, [0], [0], [0, 1])).edges == [(0,), (0, 1)]
    h = H(3, [0, 1], [2])
    assert hg.simplify(h) == h


@given(hypergraphs())
def test_simplify_caps_multiplicity(h):
    mult = hg.simplify(h).multiplicity()
    assert set(mult) == set(h.multiplicity()) and set(mult.values()) <= {1}


# serialization

@given(hypergraphs())
def test_roundtrips(h):
    assert Hypergraph.from_text(h.to_text()) == h
    assert Hypergraph.from_json(h.to_json()) == h


def test_text_format(tmp_path):
    h = H(3, [2, 0], [], [1])
    p = tmp_path / "h.txt"
    hg.save(h, p)
    assert p.read_text() == "N 3\n0 2\n\n1\n"
    assert hg.load(p) == h
    q = tmp_path / "h.json"
    hg.save(h, q)
    assert json.loads(q.read_text()) == {"n": 3, "edges": [[0, 2], [], [1]]}
    assert hg.load(q) == h
