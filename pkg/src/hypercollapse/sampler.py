"""Poisson random hypergraphs and the Poisson hypergraph process."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import DomainError
from .hypergraph import Hypergraph
from .mixing import MixingDistribution
from .rng import make_rng


def uniform_subsets(n: int, k: int, count: int, rng) -> np.ndarray:
    """``count`` independent uniform k-subsets of range(n), rows sorted."""
    if count == 0 or k == 0:
        return np.zeros((count, k), dtype=np.int64)
    offsets = np.empty((count, k), dtype=np.int64)
    for j in range(k):
        offsets[:, j] = rng.integers(0, n - j, size=count)
    rows = kernels.resolve_subsets(n, offsets)
    rows.sort(axis=1)
    return rows


def sample_static(beta: MixingDistribution, n: int, seed=None) -> Hypergraph:
    """Poisson(beta) random hypergraph on n vertices.

    Subset A carries a Poisson(n*beta_|A| / C(n, |A|)) number of edges. By
    Poisson thinning this equals drawing Poisson(n*beta_k) edges of each size
    k and placing each on a uniform k-subset. Sizes above n are skipped.
    """
    if n < 1:
        raise DomainError("n must be at least 1")
    rng = make_rng(seed)
    blocks = []
    for k in range(1, min(beta.max_degree, n) + 1):
        b = beta.coeff(k)
        count = int(rng.poisson(n * b)) if b > 0 else 0
        if count:
            blocks.append(uniform_subsets(n, k, count, rng))
    if not blocks:
        return Hypergraph.empty(n)
    sizes = np.concatenate([np.full(len(b), b.shape[1], dtype=np.int64) for b in blocks])
    ptr = np.zeros(len(sizes) + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr[1:])
    verts = np.concatenate([b.ravel() for b in blocks])
    return Hypergraph(n, ptr, verts)


@dataclass(frozen=True, eq=False)
class EventStream:
    """Arrivals of a rate-n Poisson clock on [0, horizon].

    Event ``i`` arrives at ``taus[i]`` with drawn cardinality ``ks[i]``; its
    vertex set is ``verts[ptr[i]:ptr[i+1]]``, empty when ``ks[i] > n``.
    """

    num_vertices: int
    horizon: float
    taus: np.ndarray
    ks: np.ndarray
    ptr: np.ndarray
    verts: np.ndarray
    seed: Optional[int] = None

    @property
    def num_events(self) -> int:
        return len(self.taus)

    @property
    def valid(self) -> np.ndarray:
        return self.ks <= self.num_vertices

    def events(self):
        v = self.verts.tolist()
        p = self.ptr.tolist()
        return [(float(self.taus[i]), int(self.ks[i]), tuple(v[p[i]:p[i + 1]]))
                for i in range(self.num_events)]

    def _edges_upto(self, count):
        """Hypergraph of the first ``count`` valid events, in arrival order."""
        valid = self.valid
        sizes = np.diff(self.ptr)
        chosen = valid & (np.cumsum(valid) <= count)
        ptr = np.zeros(int(chosen.sum()) + 1, dtype=np.int64)
        np.cumsum(sizes[chosen], out=ptr[1:])
        return Hypergraph(self.num_vertices, ptr, self.verts[np.repeat(chosen, sizes)])

    def snapshot_at(self, t: float) -> Hypergraph:
        """All edges that arrived by time t."""
        if t > self.horizon or t < 0:
            raise DomainError(f"t={t} outside [0, {self.horizon}]")
        valid_taus = self.taus[self.valid]
        return self._edges_upto(int(np.searchsorted(valid_taus, t, side="right")))

    def identifiability_path(self, grid):
        """[(t, identifiable vertices / n, identifiable edges / n)] over ``grid``.

        Computed by one incremental collapse that absorbs arrivals in time order.
        """
        grid = np.asarray(grid, dtype=float)
        if np.any(np.diff(grid) < 0):
            raise DomainError("grid must be sorted")
        if len(grid) and (grid[0] < 0 or grid[-1] > self.horizon):
            raise DomainError("grid must lie within [0, horizon]")
        h = self._edges_upto(int(self.valid.sum()))
        stops = np.searchsorted(self.taus[self.valid], grid, side="right")
        t_counts, z_counts = kernels.collapse_stream(self.num_vertices, h.ptr, h.verts, stops)
        n = self.num_vertices
        return [(float(t), a / n, b / n) for t, a, b in zip(grid, t_counts.tolist(), z_counts.tolist())]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "k", "vertices"])
            for tau, k, edge in self.events():
                w.writerow([repr(tau), k, ";".join(map(str, edge))])

    @classmethod
    def from_csv(cls, path, num_vertices: int, horizon: float) -> "EventStream":
        taus, ks, rows = [], [], []
        with open(path, newline="") as fh:
            for rec in csv.DictReader(fh):
                taus.append(float(rec["tau"]))
                ks.append(int(rec["k"]))
                rows.append([int(v) for v in rec["vertices"].split(";")] if rec["vertices"] else [])
        ptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum([len(r) for r in rows], out=ptr[1:])
        verts = np.asarray([v for r in rows for v in r], dtype=np.int64)
        return cls(num_vertices, horizon, np.asarray(taus, float), np.asarray(ks, np.int64), ptr, verts)


def sample_process(rho: MixingDistribution, n: int, horizon: float, seed=None) -> EventStream:
    """Poisson(rho) hypergraph process observed on [0, horizon]."""
    if not rho.is_probability:
        raise DomainError("the process needs a probability law for edge sizes")
    if horizon <= 0:
        raise DomainError("horizon must be positive")
    rng = make_rng(seed)
    count = int(rng.poisson(n * horizon))
    taus = np.sort(rng.uniform(0.0, horizon, size=count))
    p = np.asarray(rho.coeffs)
    ks = rng.choice(len(p), size=count, p=p / p.sum()).astype(np.int64) + 1
    sizes = np.where(ks <= n, ks, 0)
    ptr = np.zeros(count + 1, dtype=np.int64)
    np.cumsum(sizes, out=ptr[1:])
    verts = np.empty(int(ptr[-1]), dtype=np.int64)
    for k in np.unique(ks[ks <= n]):
        idx = np.flatnonzero(ks == k)
        rows = uniform_subsets(n, int(k), len(idx), rng)
        pos = ptr[idx][:, None] + np.arange(k)
        verts[pos.ravel()] = rows.ravel()
    return EventStream(n, float(horizon), taus, ks, ptr, verts,
                       seed if isinstance(seed, (int, np.integer)) else None)


def snapshot_at(s: EventStream, t: float) -> Hypergraph:
    return s.snapshot_at(t)


def identifiability_path(s: EventStream, grid):
    return s.identifiability_path(grid)
