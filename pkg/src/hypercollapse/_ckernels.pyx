# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled collapse kernels. Semantics mirror ``_pykernels`` exactly."""
import numpy as np

from libcpp.queue cimport priority_queue
from libcpp.vector cimport vector
from libc.stdint cimport int64_t

DEF LOWEST_INDEX = 0


cdef _incidence(Py_ssize_t n, const int64_t[:] eptr, const int64_t[:] everts):
    cdef Py_ssize_t m = eptr.shape[0] - 1
    cdef Py_ssize_t e, k, v
    vptr_a = np.zeros(n + 1, dtype=np.int64)
    vedges_a = np.empty(everts.shape[0], dtype=np.int64)
    cdef int64_t[:] vptr = vptr_a
    cdef int64_t[:] vedges = vedges_a
    for k in range(everts.shape[0]):
        vptr[everts[k] + 1] += 1
    for v in range(n):
        vptr[v + 1] += vptr[v]
    fill_a = np.array(vptr_a[:n], dtype=np.int64)
    cdef int64_t[:] fill = fill_a
    for e in range(m):
        for k in range(eptr[e], eptr[e + 1]):
            v = everts[k]
            vedges[fill[v]] = e
            fill[v] += 1
    return vptr_a, vedges_a


def incidence(n, eptr, everts):
    return _incidence(n, np.ascontiguousarray(eptr, dtype=np.int64),
                      np.ascontiguousarray(everts, dtype=np.int64))


def collapse(Py_ssize_t n, eptr_in, everts_in, int mode, uniforms_in):
    cdef const int64_t[:] eptr = np.ascontiguousarray(eptr_in, dtype=np.int64)
    cdef const int64_t[:] everts = np.ascontiguousarray(everts_in, dtype=np.int64)
    cdef const double[:] uniforms = np.ascontiguousarray(uniforms_in, dtype=np.float64)
    vptr_a, vedges_a = _incidence(n, eptr, everts)
    cdef int64_t[:] vptr = vptr_a
    cdef int64_t[:] vedges = vedges_a
    cdef Py_ssize_t m = eptr.shape[0] - 1
    size_a = np.diff(np.asarray(eptr)).astype(np.int64)
    rem_a = np.zeros(m, dtype=np.int64)
    cdef int64_t[:] size = size_a
    cdef int64_t[:] rem = rem_a
    cdef Py_ssize_t e, k, i, idx, last
    cdef int64_t v, w, y = 0, z = 0
    for e in range(m):
        for k in range(eptr[e], eptr[e + 1]):
            rem[e] += everts[k]
        if size[e] == 1:
            y += 1
        elif size[e] == 0:
            z += 1

    cdef vector[char] removed = vector[char](n, 0)
    cdef vector[int64_t] pcount
    cdef priority_queue[int64_t] heap
    cdef vector[int64_t] tokens
    cdef vector[int64_t] tpos
    cdef vector[int64_t] order
    cdef vector[int64_t] ys
    cdef vector[int64_t] zs
    ys.push_back(y)
    zs.push_back(z)

    if mode == LOWEST_INDEX:
        pcount.assign(n, 0)
        for e in range(m):
            if size[e] == 1:
                w = rem[e]
                if pcount[w] == 0:
                    heap.push(-w)
                pcount[w] += 1
    else:
        tpos.assign(m, -1)
        for e in range(m):
            if size[e] == 1:
                tpos[e] = tokens.size()
                tokens.push_back(e)

    while True:
        if mode == LOWEST_INDEX:
            v = -1
            while not heap.empty():
                w = -heap.top()
                heap.pop()
                if not removed[w]:
                    v = w
                    break
            if v < 0:
                break
        else:
            if tokens.size() == 0:
                break
            idx = <Py_ssize_t>(uniforms[order.size()] * tokens.size())
            if idx >= <Py_ssize_t>tokens.size():
                idx = tokens.size() - 1
            v = rem[tokens[idx]]

        removed[v] = 1
        order.push_back(v)
        for k in range(vptr[v], vptr[v + 1]):
            e = vedges[k]
            if size[e] == 0:
                continue
            size[e] -= 1
            rem[e] -= v
            if size[e] == 0:
                y -= 1
                z += 1
                if mode != LOWEST_INDEX:
                    i = tpos[e]
                    last = tokens.back()
                    tokens.pop_back()
                    if last != e:
                        tokens[i] = last
                        tpos[last] = i
                    tpos[e] = -1
            elif size[e] == 1:
                y += 1
                w = rem[e]
                if mode == LOWEST_INDEX:
                    if pcount[w] == 0:
                        heap.push(-w)
                    pcount[w] += 1
                else:
                    tpos[e] = tokens.size()
                    tokens.push_back(e)
        ys.push_back(y)
        zs.push_back(z)

    return (
        np.asarray(<int64_t[:order.size()]> order.data(), dtype=np.int64).copy()
        if order.size() else np.zeros(0, dtype=np.int64),
        np.asarray(<int64_t[:ys.size()]> ys.data(), dtype=np.int64).copy(),
        np.asarray(<int64_t[:zs.size()]> zs.data(), dtype=np.int64).copy(),
        size_a,
    )


def collapse_stream(Py_ssize_t n, eptr_in, everts_in, stops_in):
    cdef const int64_t[:] eptr = np.ascontiguousarray(eptr_in, dtype=np.int64)
    cdef const int64_t[:] everts = np.ascontiguousarray(everts_in, dtype=np.int64)
    cdef const int64_t[:] stops = np.ascontiguousarray(stops_in, dtype=np.int64)
    vptr_a, vedges_a = _incidence(n, eptr, everts)
    cdef int64_t[:] vptr = vptr_a
    cdef int64_t[:] vedges = vedges_a
    cdef Py_ssize_t m = eptr.shape[0] - 1
    cdef vector[int64_t] size = vector[int64_t](m, 0)
    cdef vector[int64_t] rem = vector[int64_t](m, 0)
    cdef vector[char] active = vector[char](m, 0)
    cdef vector[char] removed = vector[char](n, 0)
    cdef vector[int64_t] stack
    cdef int64_t t_count = 0, z_count = 0, s, r, v, w
    cdef Py_ssize_t nxt = 0, e, f, k, j
    out_t_a = np.zeros(stops.shape[0], dtype=np.int64)
    out_z_a = np.zeros(stops.shape[0], dtype=np.int64)
    cdef int64_t[:] out_t = out_t_a
    cdef int64_t[:] out_z = out_z_a
    for j in range(stops.shape[0]):
        while nxt < stops[j]:
            e = nxt
            nxt += 1
            active[e] = 1
            s = 0
            r = 0
            for k in range(eptr[e], eptr[e + 1]):
                w = everts[k]
                if not removed[w]:
                    s += 1
                    r += w
            size[e] = s
            rem[e] = r
            if s == 0:
                z_count += 1
            elif s == 1:
                stack.push_back(r)
            while stack.size():
                v = stack.back()
                stack.pop_back()
                if removed[v]:
                    continue
                removed[v] = 1
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
                        stack.push_back(rem[f])
        out_t[j] = t_count
        out_z[j] = z_count
    return out_t_a, out_z_a


def resolve_subsets(Py_ssize_t n, offsets_in):
    cdef const int64_t[:, :] offsets = np.ascontiguousarray(offsets_in, dtype=np.int64)
    cdef Py_ssize_t c = offsets.shape[0], kk = offsets.shape[1]
    out_a = np.empty((c, kk), dtype=np.int64)
    cdef int64_t[:, :] out = out_a
    cdef vector[int64_t] pos = vector[int64_t](kk, 0)
    cdef vector[int64_t] held = vector[int64_t](kk, 0)
    cdef Py_ssize_t r, i, j
    cdef int64_t p, cur_p, cur_j
    for r in range(c):
        for j in range(kk):
            p = offsets[r, j] + j
            cur_p = p
            cur_j = j
            for i in range(j):
                if pos[i] == p:
                    cur_p = held[i]
                if pos[i] == j:
                    cur_j = held[i]
            out[r, j] = cur_p
            pos[j] = p
            held[j] = cur_j
    return out_a
