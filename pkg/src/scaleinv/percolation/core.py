"""Bernoulli site percolation on finite substrates: clusters, good boxes and giant-cluster profiles."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _backend


# -- substrates ----------------------------------------------------------------------

@dataclass(frozen=True)
class BoxSpec:
    d: int
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("box side must be at least 2")
        if self.d < 1:
            raise ValueError("dimension must be positive")

    @property
    def volume(self) -> int:
        return self.n ** self.d


@dataclass(eq=False)
class Substrate:
    """Undirected graph in CSR form; vertices are 0..size-1."""

    indptr: np.ndarray
    indices: np.ndarray
    box: BoxSpec | None = None
    coords: np.ndarray | None = None
    payloads: list | None = None

    @property
    def size(self) -> int:
        return len(self.indptr) - 1

    @classmethod
    def from_edges(cls, size: int, edges, **kw) -> "Substrate":
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        both = np.concatenate([edges, edges[:, ::-1]]) if len(edges) else edges
        order = np.lexsort((both[:, 1], both[:, 0])) if len(both) else np.zeros(0, dtype=np.int64)
        both = both[order]
        counts = np.bincount(both[:, 0], minlength=size) if len(both) else np.zeros(size, dtype=np.int64)
        indptr = np.zeros(size + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(indptr, np.ascontiguousarray(both[:, 1], dtype=np.int64), **kw)

    @classmethod
    def from_graph(cls, graph) -> "Substrate":
        """From a LabeledGraph; parallel edges with different labels collapse."""
        pairs = sorted({(u, v) for u, v, _ in graph.edges if u != v})
        return cls.from_edges(graph.number_of_vertices(), pairs, payloads=graph.payloads())

    def neighbors(self, v: int) -> list[int]:
        return self.indices[self.indptr[v]:self.indptr[v + 1]].tolist()


def box_substrate(spec: BoxSpec) -> Substrate:
    """Nearest-neighbour box {0..n-1}^d, vertices in row-major order."""
    d, n = spec.d, spec.n
    coords = np.indices((n,) * d).reshape(d, -1).T
    ids = np.arange(spec.volume).reshape((n,) * d)
    edges = []
    for axis in range(d):
        lo = np.take(ids, range(n - 1), axis=axis).ravel()
        hi = np.take(ids, range(1, n), axis=axis).ravel()
        edges.append(np.stack([lo, hi], axis=1))
    return Substrate.from_edges(spec.volume, np.concatenate(edges), box=spec, coords=coords)


def as_substrate(graph) -> Substrate:
    return graph if isinstance(graph, Substrate) else Substrate.from_graph(graph)


def substrate_from_elements(elements, generators) -> Substrate:
    """Cayley graph induced on a finite set of group elements."""
    elements = list(elements)
    index = {g: i for i, g in enumerate(elements)}
    pairs = set()
    for g, i in index.items():
        for s in generators:
            j = index.get(g * s)
            if j is not None and j != i:
                pairs.add((min(i, j), max(i, j)))
    return Substrate.from_edges(len(elements), sorted(pairs), payloads=elements)


# -- configurations -------------------------------------------------------------------

def uniforms(size: int, seed: int, stream: int = 0) -> np.ndarray:
    """Uniform variates from Philox keyed by (seed, stream); vertex v reads counter slot v."""
    if seed < 0 or stream < 0:
        raise ValueError("seed and stream must be non-negative")
    key = np.array([seed, stream], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key)).random(size)


@dataclass(eq=False)
class Configuration:
    substrate: Substrate
    open: np.ndarray
    p: float
    seed: int
    stream: int = 0

    @property
    def open_count(self) -> int:
        return int(self.open.sum())


def bernoulli_sites(graph, p, seed: int, stream: int = 0) -> Configuration:
    """Each vertex is open iff its uniform variate is below p."""
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    sub = as_substrate(graph)
    u = uniforms(sub.size, seed, stream)
    return Configuration(sub, u < p, p, seed, stream)


# -- clusters -------------------------------------------------------------------------

@dataclass(eq=False)
class ClusterStats:
    sizes: tuple            # descending
    labels: np.ndarray      # per vertex component id, -1 when closed
    substrate: Substrate = field(repr=False)

    @property
    def c1(self) -> int:
        return self.sizes[0] if self.sizes else 0

    @property
    def c2(self) -> int:
        return self.sizes[1] if len(self.sizes) > 1 else 0

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label).astype(np.int64)

    def diameter(self, label: int, cap: int | None = None) -> int:
        cap = self.substrate.size if cap is None else cap
        return int(_backend.cluster_diameter(self.substrate.indptr, self.substrate.indices,
                                             self.members(label), self.labels, cap))

    def diameters(self, cap: int | None = None) -> list[int]:
        """Diameters of components in descending-size order."""
        counts = np.bincount(self.labels[self.labels >= 0]) if self.sizes else np.zeros(0)
        order = sorted(range(len(counts)), key=lambda c: (-counts[c], c))
        return [self.diameter(c, cap) for c in order]


def _labels(sub: Substrate, mask: np.ndarray) -> np.ndarray:
    return _backend.label_clusters(sub.indptr, sub.indices, np.ascontiguousarray(mask, dtype=np.uint8))


def clusters(graph, config: Configuration, within: np.ndarray | None = None) -> ClusterStats:
    """Open clusters, optionally of the subgraph induced on the vertex mask ``within``."""
    sub = as_substrate(graph)
    mask = config.open if within is None else config.open & within
    labels = _labels(sub, mask)
    counts = np.bincount(labels[labels >= 0]) if mask.any() else np.zeros(0, dtype=np.int64)
    return ClusterStats(tuple(sorted(counts.tolist(), reverse=True)), labels, sub)


# -- good boxes -----------------------------------------------------------------------

def _face_masks(sub: Substrate) -> list[np.ndarray]:
    n = sub.box.n
    out = []
    for axis in range(sub.box.d):
        out.append(sub.coords[:, axis] == 0)
        out.append(sub.coords[:, axis] == n - 1)
    return out


def good_box(config: Configuration, eps: float) -> bool:
    """Some open cluster meets all 2d faces and every other cluster has diameter at most eps*n."""
    sub = config.substrate
    if sub.box is None:
        raise ValueError("good_box needs a box substrate")
    if eps <= 0:
        raise ValueError("eps must be positive")
    stats = clusters(sub, config)
    if not stats.sizes:
        return False
    labels = stats.labels
    crossing = None
    for face in _face_masks(sub):
        present = set(np.unique(labels[face]).tolist()) - {-1}
        crossing = present if crossing is None else crossing & present
        if not crossing:
            return False
    counts = np.bincount(labels[labels >= 0])
    giant = min(crossing, key=lambda c: (-counts[c], c))
    if eps >= 1:
        return True
    cap = math.floor(eps * sub.box.n)
    for c in range(len(counts)):
        if c == giant or counts[c] - 1 <= cap:
            continue
        if stats.diameter(c, cap) > cap:
            return False
    return True


@dataclass(frozen=True)
class RenormRow:
    n: int
    trials: int
    good: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.good, self.trials)

    @property
    def sigma(self) -> float:
        f = float(self.fraction)
        return math.sqrt(f * (1 - f) / self.trials)


def renorm_experiment(d: int, ns, p: float, eps: float, trials: int, seed: int) -> list[RenormRow]:
    """Fraction of good n-boxes over independent seeded trials, one row per n."""
    rows = []
    for n in ns:
        sub = box_substrate(BoxSpec(d, n))
        good = sum(good_box(bernoulli_sites(sub, p, seed, (n << 32) + trial), eps)
                   for trial in range(trials))
        rows.append(RenormRow(n, trials, good))
    return rows


def nondecreasing_within_noise(rows, sigmas: float = 2.0) -> bool:
    """Each fraction is at least the previous one minus ``sigmas`` binomial standard errors."""
    for a, b in zip(rows, rows[1:]):
        slack = sigmas * math.sqrt(a.sigma ** 2 + b.sigma ** 2)
        if float(b.fraction) < float(a.fraction) - slack:
            return False
    return True


# -- giant-cluster profiles -------------------------------------------------------------

@dataclass(frozen=True)
class ProfileRow:
    level: int
    volume: int
    ratio: float       # median c2/c1
    giant_share: float  # median c1/|F|
    density: float     # median open density


def centered_boxes(d: int, sides) -> tuple[Substrate, list[np.ndarray]]:
    """The box of the largest side with concentric sub-boxes as vertex masks."""
    outer = max(sides)
    sub = box_substrate(BoxSpec(d, outer))
    tiles = []
    for n in sides:
        lo = (outer - n) // 2
        inside = np.all((sub.coords >= lo) & (sub.coords < lo + n), axis=1)
        tiles.append(inside)
    return sub, tiles


def unique_giant_profile(graph, tiles, p: float, trials: int, seed: int) -> list[ProfileRow]:
    """Median c2/c1, c1/|F| and open density on each tile over seeded trials.

    Exploratory only: the ratio is recorded, no limit is asserted. When a tile
    has no open vertex its ratio counts as 0.
    """
    sub = as_substrate(graph)
    masks = []
    for t in tiles:
        t = np.asarray(t)
        if t.dtype != bool:
            m = np.zeros(sub.size, dtype=bool)
            m[t] = True
            t = m
        masks.append(t)
    samples = [([], [], []) for _ in masks]
    for trial in range(trials):
        cfg = bernoulli_sites(sub, p, seed, trial)
        for (ratios, shares, dens), mask in zip(samples, masks):
            st = clusters(sub, cfg, within=mask)
            vol = int(mask.sum())
            ratios.append(st.c2 / st.c1 if st.c1 else 0.0)
            shares.append(st.c1 / vol)
            dens.append(int((cfg.open & mask).sum()) / vol)
    return [ProfileRow(k, int(mask.sum()), statistics.median(r), statistics.median(s), statistics.median(dn))
            for k, (mask, (r, s, dn)) in enumerate(zip(masks, samples))]


def strictly_decreasing(values) -> bool:
    values = list(values)
    return all(b < a for a, b in zip(values, values[1:]))
