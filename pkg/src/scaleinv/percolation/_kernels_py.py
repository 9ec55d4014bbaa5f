"""Pure-Python cluster kernels; same contract as the compiled module."""

from __future__ import annotations

from collections import deque

import numpy as np


def label_clusters(indptr, indices, open_mask):
    """Union-find over open vertices.

    Returns int64 labels: -1 for closed vertices, otherwise components numbered
    0, 1, ... in order of their smallest vertex id.
    """
    ptr = indptr.tolist()
    nbr = indices.tolist()
    is_open = open_mask.tolist()
    n = len(is_open)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v in range(n):
        if not is_open[v]:
            continue
        for k in range(ptr[v], ptr[v + 1]):
            w = nbr[k]
            if w > v and is_open[w]:
                a, b = find(v), find(w)
                if a != b:
                    if a < b:
                        parent[b] = a
                    else:
                        parent[a] = b
    labels = [-1] * n
    index = {}
    for v in range(n):
        if is_open[v]:
            r = find(v)
            if r not in index:
                index[r] = len(index)
            labels[v] = index[r]
    return np.asarray(labels, dtype=np.int64)


def cluster_diameter(indptr, indices, members, labels, cap):
    """Graph diameter of one cluster, or cap + 1 as soon as it is known to exceed cap."""
    ptr = indptr.tolist()
    nbr = indices.tolist()
    lab = labels.tolist()
    mem = members.tolist()
    if not mem:
        return 0
    target = lab[mem[0]]
    best = 0
    for src in mem:
        dist = {src: 0}
        queue = deque([src])
        while queue:
            v = queue.popleft()
            d = dist[v]
            if d > best:
                best = d
                if best > cap:
                    return cap + 1
            for k in range(ptr[v], ptr[v + 1]):
                w = nbr[k]
                if lab[w] == target and w not in dist:
                    dist[w] = d + 1
                    queue.append(w)
    return best
