"""Pure-Python reference kernels.

These define the semantics; ``_ckernels`` must return identical arrays for
identical inputs. Hypergraphs arrive in CSR form: edge ``i`` holds
``everts[eptr[i]:eptr[i+1]]``.
"""
import heapq

import numpy as np

LOWEST_INDEX = 0
UNIFORM_TOKEN = 1


def incidence(n, eptr, everts):
    """Vertex-to-edge CSR; each vertex's edge list is in increasing label order."""
    everts = np.asarray(everts, dtype=np.int64)
    counts = np.bincount(everts, minlength=n)
    vptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=vptr[1:])
    sizes = np.diff(np.asarray(eptr, dtype=np.int64))
    owner = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
    order = np.argsort(everts, kind="stable")
    return vptr, owner[order]


def collapse(n, eptr, everts, mode, uniforms):
    """Run hypergraph collapse to completion.

    Returns ``(order, ys, zs, sizes)``: removed vertices in removal order,
    patch and debris counts before the first step and after every step, and
    the final residual cardinality of every edge.
    """
    eptr = np.asarray(eptr, dtype=np.int64)
    everts = np.asarray(everts, dtype=np.int64)
    vptr, vedges = incidence(n, eptr, everts)
    vptr = vptr.tolist()
    vedges = vedges.tolist()
    size = np.diff(eptr).tolist()
    m = len(size)
    owner = np.repeat(np.arange(m, dtype=np.int64), size)
    rem = np.bincount(owner, weights=everts, minlength=m).astype(np.int64).tolist()
    removed = [False] * n
    uniforms = np.asarray(uniforms, dtype=np.float64).tolist()

    y = sum(1 for s in size if s == 1)
    z = sum(1 for s in size if s == 0)
    ys = [y]
    zs = [z]
    order = []

    if mode == LOWEST_INDEX:
        pcount = [0] * n
        heap = []
        for e in range(m):
            if size[e] == 1:
                w = rem[e]
                if pcount[w] == 0:
                    heap.append(w)
                pcount[w] += 1
        heapq.heapify(heap)
    else:
        tokens = [e for e in range(m) if size[e] == 1]
        tpos = [-1] * m
        for i, e in enumerate(tokens):
            tpos[e] = i

    while True:
        if mode == LOWEST_INDEX:
            v = -1
            while heap:
                cand = heapq.heappop(heap)
                if not removed[cand]:
                    v = cand
                    break
            if v < 0:
                break
        else:
            if not tokens:
                break
            u = uniforms[len(order)]
            idx = min(int(u * len(tokens)), len(tokens) - 1)
            v = rem[tokens[idx]]

        removed[v] = True
        order.append(v)
        for k in range(vptr[v], vptr[v + 1]):
            e = vedges[k]
            if size[e] == 0:
                continue
            size[e] -= 1
            rem[e] -= v
            if size[e] == 0:
                y -= 1
                z += 1
                if mode == UNIFORM_TOKEN:
                    i = tpos[e]
                    last = tokens.pop()
                    if last != e:
                        tokens[i] = last
                        tpos[last] = i
                    tpos[e] = -1
            elif size[e] == 1:
                y += 1
                w = rem[e]
                if mode == LOWEST_INDEX:
                    if pcount[w] == 0:
                        heapq.heappush(heap, w)
                    pcount[w] += 1
                else:
                    tpos[e] = len(tokens)
                    tokens.append(e)
        ys.append(y)
        zs.append(z)

    return (
        np.asarray(order, dtype=np.int64),
        np.asarray(ys, dtype=np.int64),
        np.asarray(zs, dtype=np.int64),
        np.asarray(size, dtype=np.int64),
    )


def collapse_stream(n, eptr, everts, stops):
    """Incremental collapse as edges arrive in label order.

    ``stops[j]`` is the number of edges present at checkpoint ``j``
    (non-decreasing). Returns identifiable vertex and edge counts there.
    """
    eptr = np.asarray(eptr, dtype=np.int64)
    everts = np.asarray(everts, dtype=np.int64)
    vptr, vedges = incidence(n, eptr, everts)
    vptr = vptr.tolist()
    vedges = vedges.tolist()
    ep = eptr.tolist()
    ev = everts.tolist()
    m = len(ep) - 1
    size = [0] * m
    rem = [0] * m
    active = [False] * m
    removed = [False] * n
    stack = []
    t_count = 0
    z_count = 0
    nxt = 0
    out_t = []
    out_z = []
    for stop in np.asarray(stops, dtype=np.int64).tolist():
        while nxt < stop:
            e = nxt
            nxt += 1
            active[e] = True
            s = 0
            r = 0
            for k in range(ep[e], ep[e + 1]):
                w = ev[k]
                if not removed[w]:
                    s += 1
                    r += w
            size[e] = s
            rem[e] = r
            if s == 0:
                z_count += 1
            elif s == 1:
                stack.append(r)
            while stack:
                v = stack.pop()
                if removed[v]:
                    continue
                removed[v] = True
                t_count += 1
                for k in range(vptr[v], vptr[v + 1]):
                    f = vedges[k]
                    if not active[f] or size[f] == 0:
                        continue
                    size[f] -= 1
                    rem[f] -= v
                    if size[f] == 0:
                        z_count += 1
                    elif size[f] == 1:
                        stack.append(rem[f])
        out_t.append(t_count)
        out_z.append(z_count)
    return np.asarray(out_t, dtype=np.int64), np.asarray(out_z, dtype=np.int64)


def resolve_subsets(n, offsets):
    """Partial Fisher-Yates on a virtual identity array of length ``n``.

    Row ``r`` of ``offsets`` holds ``k`` draws with ``offsets[r, j]`` uniform
    on ``[0, n - j)``; the result row is the selected ``k``-subset in draw
    order. Only swapped positions are tracked, so memory is ``O(k)`` per row.
    """
    offsets = np.asarray(offsets, dtype=np.int64)
    c, k = offsets.shape
    out = np.empty((c, k), dtype=np.int64)
    pos = np.empty((c, k), dtype=np.int64)
    held = np.empty((c, k), dtype=np.int64)
    for j in range(k):
        p = offsets[:, j] + j
        cur_p = p.copy()
        cur_j = np.full(c, j, dtype=np.int64)
        for i in range(j):
            hit = pos[:, i] == p
            cur_p[hit] = held[hit, i]
            hit = pos[:, i] == j
            cur_j[hit] = held[hit, i]
        out[:, j] = cur_p
        pos[:, j] = p
        held[:, j] = cur_j
    return out
