# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cluster kernels: union-find labelling and capped BFS diameters."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _find(Py_ssize_t[::1] parent, Py_ssize_t x) nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def label_clusters(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, cnp.uint8_t[::1] open_mask):
    cdef Py_ssize_t n = open_mask.shape[0]
    cdef Py_ssize_t v, k, w, a, b, nxt = 0
    parent_arr = np.arange(n, dtype=np.intp)
    cdef Py_ssize_t[::1] parent = parent_arr
    labels_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] labels = labels_arr
    remap_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] remap = remap_arr
    with nogil:
        for v in range(n):
            if not open_mask[v]:
                continue
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if w > v and open_mask[w]:
                    a = _find(parent, v)
                    b = _find(parent, w)
                    if a != b:
                        if a < b:
                            parent[b] = a
                        else:
                            parent[a] = b
        for v in range(n):
            if open_mask[v]:
                a = _find(parent, v)
                if remap[a] < 0:
                    remap[a] = nxt
                    nxt += 1
                labels[v] = remap[a]
    return labels_arr


def cluster_diameter(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices, cnp.int64_t[::1] members,
                     cnp.int64_t[::1] labels, long cap):
    cdef Py_ssize_t m = members.shape[0]
    if m == 0:
        return 0
    cdef Py_ssize_t n = labels.shape[0]
    dist_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    queue_arr = np.empty(m, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.int64_t target = labels[members[0]]
    cdef Py_ssize_t s, head, tail, v, k, w, i
    cdef long best = 0, d
    with nogil:
        for s in range(m):
            head = 0
            tail = 1
            queue[0] = members[s]
            dist[members[s]] = 0
            while head < tail:
                v = queue[head]
                head += 1
                d = dist[v]
                if d > best:
                    best = d
                    if best > cap:
                        break
                for k in range(indptr[v], indptr[v + 1]):
                    w = indices[k]
                    if labels[w] == target and dist[w] < 0:
                        dist[w] = d + 1
                        queue[tail] = w
                        tail += 1
            for i in range(tail):
                dist[queue[i]] = -1
            if best > cap:
                break
    return cap + 1 if best > cap else best
