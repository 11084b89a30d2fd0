"""Multiset hypergraphs with labelled edges, collapse and its dual.

A hypergraph on vertices ``0..N-1`` is stored as a flat CSR pair: edge ``i``
(its label) is ``verts[ptr[i]:ptr[i+1]]``, always strictly increasing. The
empty edge is allowed and counts as debris. The multiplicity map
``A -> number of labels carrying A`` is derived on demand.
"""
from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import InvalidVertex, NotAGraph, PatchesPresent
from .rng import make_rng


@dataclass(frozen=True, eq=False)
class Hypergraph:
    num_vertices: int
    ptr: np.ndarray
    verts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "ptr", np.asarray(self.ptr, dtype=np.int64))
        object.__setattr__(self, "verts", np.asarray(self.verts, dtype=np.int64))
        self.ptr.setflags(write=False)
        self.verts.setflags(write=False)

    @classmethod
    def empty(cls, num_vertices: int) -> "Hypergraph":
        return cls(num_vertices, np.zeros(1, np.int64), np.zeros(0, np.int64))

    @classmethod
    def from_edges(cls, num_vertices: int, edges: Iterable[Iterable[int]]) -> "Hypergraph":
        rows = [_canonical(e, num_vertices) for e in edges]
        ptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(r) for r in rows], out=ptr[1:])
        verts = np.fromiter((v for r in rows for v in r), dtype=np.int64, count=int(ptr[-1]))
        return cls(num_vertices, ptr, verts)

    @property
    def num_edges(self) -> int:
        return len(self.ptr) - 1

    @property
    def sizes(self) -> np.ndarray:
        return np.diff(self.ptr)

    def edge(self, label: int) -> tuple:
        return tuple(self.verts[self.ptr[label]:self.ptr[label + 1]].tolist())

    @property
    def edges(self) -> list:
        v = self.verts.tolist()
        p = self.ptr.tolist()
        return [tuple(v[p[i]:p[i + 1]]) for i in range(len(p) - 1)]

    def multiplicity(self) -> Counter:
        """The map Lambda: subset -> number of edges equal to it."""
        return Counter(self.edges)

    @property
    def patch_count(self) -> int:
        return int(np.count_nonzero(self.sizes == 1))

    @property
    def debris_count(self) -> int:
        return int(np.count_nonzero(self.sizes == 0))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.verts, minlength=self.num_vertices)

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return (
            self.num_vertices == other.num_vertices
            and np.array_equal(self.ptr, other.ptr)
            and np.array_equal(self.verts, other.verts)
        )

    def __repr__(self):
        return f"Hypergraph(num_vertices={self.num_vertices}, num_edges={self.num_edges})"

    # serialization

    def to_text(self) -> str:
        lines = [f"N {self.num_vertices}"]
        lines += [" ".join(map(str, e)) for e in self.edges]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Hypergraph":
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[0].startswith("N"):
            raise ValueError("first line must be 'N <num_vertices>'")
        n = int(lines[0].split()[1])
        return cls.from_edges(n, ([int(t) for t in ln.split()] for ln in lines[1:]))

    def to_json(self) -> str:
        return json.dumps({"n": self.num_vertices, "edges": [list(e) for e in self.edges]})

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        obj = json.loads(text)
        return cls.from_edges(int(obj["n"]), obj["edges"])


def _canonical(edge, n):
    row = sorted(int(v) for v in edge)
    for i, v in enumerate(row):
        if v < 0 or v >= n:
            raise InvalidVertex(f"vertex {v} not in [0, {n})")
        if i and row[i - 1] == v:
            raise InvalidVertex(f"vertex {v} repeated within an edge")
    return row


def load(path) -> Hypergraph:
    """Read a hypergraph from ``.json`` or the line-oriented text format."""
    with open(path) as fh:
        text = fh.read()
    if str(path).endswith(".json") or text.lstrip().startswith("{"):
        return Hypergraph.from_json(text)
    return Hypergraph.from_text(text)


def save(h: Hypergraph, path, fmt: Optional[str] = None) -> None:
    fmt = fmt or ("json" if str(path).endswith(".json") else "text")
    with open(path, "w") as fh:
        fh.write(h.to_json() if fmt == "json" else h.to_text())


def insert_edge(h: Hypergraph, vertices: Iterable[int]) -> Hypergraph:
    row = _canonical(vertices, h.num_vertices)
    ptr = np.append(h.ptr, h.ptr[-1] + len(row))
    verts = np.concatenate([h.verts, np.asarray(row, dtype=np.int64)])
    return Hypergraph(h.num_vertices, ptr, verts)


def concat(h: Hypergraph, edges: Iterable[Iterable[int]]) -> Hypergraph:
    """Append several edges at once (labels continue after ``h``'s)."""
    extra = Hypergraph.from_edges(h.num_vertices, edges)
    return Hypergraph(
        h.num_vertices,
        np.concatenate([h.ptr, h.ptr[-1] + extra.ptr[1:]]),
        np.concatenate([h.verts, extra.verts]),
    )


def restrict(h: Hypergraph, s: Iterable[int]) -> Hypergraph:
    """Delete the vertices in ``s``: every edge B becomes B minus s, labels kept.

    Vertex indices are not renumbered; deleted vertices simply occur in no edge.
    """
    mask = np.zeros(h.num_vertices, dtype=bool)
    idx = np.fromiter((int(v) for v in s), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= h.num_vertices):
        raise InvalidVertex("restriction set contains an out-of-range vertex")
    mask[idx] = True
    keep = ~mask[h.verts]
    owner = np.repeat(np.arange(h.num_edges), h.sizes)
    counts = np.bincount(owner[keep], minlength=h.num_edges)
    ptr = np.zeros(h.num_edges + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return Hypergraph(h.num_vertices, ptr, h.verts[keep])


def simplify(h: Hypergraph) -> Hypergraph:
    """Lambda ^ 1: keep the first label of every distinct subset."""
    seen = set()
    rows = []
    for e in h.edges:
        if e not in seen:
            seen.add(e)
            rows.append(e)
    return Hypergraph.from_edges(h.num_vertices, rows)


def dual(h: Hypergraph) -> Hypergraph:
    """Transpose the incidence: one vertex per edge label, one edge per vertex."""
    vptr, vedges = kernels.incidence(h.num_vertices, h.ptr, h.verts)
    return Hypergraph(h.num_edges, vptr, vedges)


@dataclass(frozen=True)
class CollapseTrace:
    """Patch count Y_n and debris count Z_n along one collapse run.

    ``steps[n-1] = (vertex removed at step n, Y_n, Z_n)``; ``stop_index`` is
    the first n with Y_n = 0.
    """

    initial_patches: int
    initial_debris: int
    steps: tuple

    @property
    def stop_index(self) -> int:
        return len(self.steps)

    @property
    def ys(self) -> list:
        return [self.initial_patches] + [s[1] for s in self.steps]

    @property
    def zs(self) -> list:
        return [self.initial_debris] + [s[2] for s in self.steps]


@dataclass(frozen=True)
class CollapseResult:
    identifiable_vertices: frozenset
    identifiable_edge_count: int
    residual: Hypergraph
    residual_labels: tuple
    trace: Optional[CollapseTrace] = field(default=None, compare=False)

    @property
    def num_identifiable(self) -> int:
        return len(self.identifiable_vertices)


def _run(h: Hypergraph, order_seed=None):
    if order_seed is None:
        return kernels.collapse(h.num_vertices, h.ptr, h.verts, kernels.LOWEST_INDEX, np.zeros(0))
    rng = make_rng(order_seed)
    uniforms = rng.random(h.num_vertices)
    return kernels.collapse(h.num_vertices, h.ptr, h.verts, kernels.UNIFORM_TOKEN, uniforms)


def collapse(h: Hypergraph, order_seed=None, trace: bool = True) -> CollapseResult:
    """Collapse ``h``: repeatedly delete a vertex carrying a patch.

    Without a seed the lowest-index patched vertex goes first. With a seed
    (int or Generator) each step picks a patch token uniformly at random,
    which is randomized collapse. The identifiable set and edge count do not
    depend on the order; only the trace does.
    """
    order, ys, zs, sizes = _run(h, order_seed)
    gone = sizes == 0
    keep_labels = np.flatnonzero(~gone)
    removed = np.zeros(h.num_vertices, dtype=bool)
    removed[order] = True
    keep_v = ~removed[h.verts] & np.repeat(~gone, h.sizes)
    ptr = np.zeros(len(keep_labels) + 1, dtype=np.int64)
    np.cumsum(sizes[keep_labels], out=ptr[1:])
    residual = Hypergraph(h.num_vertices, ptr, h.verts[keep_v])
    tr = None
    if trace:
        tr = CollapseTrace(
            int(ys[0]),
            int(zs[0]),
            tuple(zip(order.tolist(), ys[1:].tolist(), zs[1:].tolist())),
        )
    return CollapseResult(
        frozenset(order.tolist()),
        int(np.count_nonzero(gone)),
        residual,
        tuple(keep_labels.tolist()),
        tr,
    )


def collapse_counts(h: Hypergraph, order_seed=None) -> tuple:
    """(identifiable vertices, identifiable edges) without building sets."""
    order, _, zs, _ = _run(h, order_seed)
    return len(order), int(zs[-1])


def collapse_trace(h: Hypergraph, order_seed=None) -> tuple:
    """Raw (Y_n, Z_n) arrays for n = 0..T."""
    _, ys, zs, _ = _run(h, order_seed)
    return ys, zs


def _require_patch_free(h):
    if h.patch_count:
        raise PatchesPresent("domain is defined for patch-free hypergraphs only")


def domain_of(h: Hypergraph, v0: int) -> tuple:
    """Vertices identifiable once the single patch {v0} is added.

    The edge count excludes the added patch itself.
    """
    _require_patch_free(h)
    res = collapse(insert_edge(h, [v0]), trace=False)
    return res.identifiable_vertices, res.identifiable_edge_count - 1


def domain_counts(h: Hypergraph, v0: int) -> tuple:
    """Sizes only: (|domain|, identifiable edges excluding the added patch)."""
    _require_patch_free(h)
    t, z = collapse_counts(insert_edge(h, [v0]))
    return t, z - 1


def _require_graph(g):
    if g.num_edges and not np.all(g.sizes == 2):
        raise NotAGraph("every edge must have exactly two vertices")


def two_core_peel(g: Hypergraph) -> frozenset:
    """2-core by direct peeling of degree-one vertices."""
    _require_graph(g)
    n = g.num_vertices
    edges = g.edges
    adj = [[] for _ in range(n)]
    for i, (a, b) in enumerate(edges):
        adj[a].append(i)
        adj[b].append(i)
    deg = [len(a) for a in adj]
    alive = [True] * len(edges)
    queue = deque(v for v in range(n) if deg[v] == 1)
    while queue:
        v = queue.popleft()
        if deg[v] != 1:
            continue
        i = next(i for i in adj[v] if alive[i])
        alive[i] = False
        for w in edges[i]:
            deg[w] -= 1
            if deg[w] == 1:
                queue.append(w)
    return frozenset(v for v in range(n) if deg[v] > 0)


def two_core_dual(g: Hypergraph) -> frozenset:
    """2-core as the vertices whose dual edges survive dual collapse."""
    _require_graph(g)
    d = dual(g)
    _, _, _, sizes = _run(d)
    return frozenset(np.flatnonzero(sizes > 0).tolist())


def two_core(g: Hypergraph) -> frozenset:
    a = two_core_peel(g)
    b = two_core_dual(g)
    assert a == b, "peeling and dual collapse disagree on the 2-core"
    return a


def incidence_matrix(h: Hypergraph) -> np.ndarray:
    mat = np.zeros((h.num_vertices, h.num_edges), dtype=np.int8)
    owner = np.repeat(np.arange(h.num_edges), h.sizes)
    mat[h.verts, owner] = 1
    return mat


def random_hypergraph(n: int, m: int, max_size: int, rng, patch_fraction=0.2) -> Hypergraph:
    """Small uniform-random test hypergraph with a share of patches."""
    rows = []
    for _ in range(m):
        if rng.random() < patch_fraction:
            k = 1
        else:
            k = int(rng.integers(2, max(2, min(max_size, n)) + 1)) if n >= 2 else 1
        rows.append(rng.choice(n, size=min(k, n), replace=False))
    return Hypergraph.from_edges(n, rows)


def random_multigraph(n: int, m: int, rng) -> Hypergraph:
    rows = [rng.choice(n, size=2, replace=False) for _ in range(m)] if n >= 2 else []
    return Hypergraph.from_edges(n, rows)


__all__: Sequence[str] = [
    "Hypergraph", "CollapseResult", "CollapseTrace", "insert_edge", "restrict",
    "collapse", "collapse_counts", "domain_of", "domain_counts", "dual",
    "two_core", "two_core_peel", "two_core_dual", "simplify", "load", "save",
]
