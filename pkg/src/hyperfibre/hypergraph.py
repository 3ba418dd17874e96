"""Undirected hypergraphs with multiset hyperedges.

Nodes are the integers ``0..node_count-1``; optional string labels map them
back to the names used in input files.  A hyperedge is stored as a sorted
tuple of node indices and may repeat a node; its order is its length
(repetitions included).
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .errors import EmptyHyperedge, EmptyInput, InvalidCounts, MalformedLine
from .partition import Partition

Edge = tuple[int, ...]

_TOKEN = re.compile(r"^[\w.:+\-/@|]+$")


@dataclass(frozen=True)
class Hypergraph:
    node_count: int
    hyperedges: tuple[Edge, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.node_count < 0:
            raise ValueError("node_count must be non-negative")
        edges = tuple(tuple(sorted(int(v) for v in e)) for e in self.hyperedges)
        for idx, e in enumerate(edges):
            if not e:
                raise EmptyHyperedge(f"hyperedge {idx} is empty")
            if e[0] < 0 or e[-1] >= self.node_count:
                raise ValueError(f"hyperedge {idx} references a node outside 0..{self.node_count - 1}")
        object.__setattr__(self, "hyperedges", edges)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != self.node_count:
                raise ValueError("one label per node is required")
            if len(set(labels)) != len(labels):
                raise ValueError("node labels must be distinct")
            object.__setattr__(self, "labels", labels)

    @property
    def edge_count(self) -> int:
        return len(self.hyperedges)

    @property
    def rank(self) -> int:
        return max((len(e) for e in self.hyperedges), default=0)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    @property
    def node_labels(self) -> list[str]:
        return [self.label(i) for i in range(self.node_count)]

    def edges_of_order(self, m: int) -> list[int]:
        """Indices of the hyperedges of order ``m``."""
        return [k for k, e in enumerate(self.hyperedges) if len(e) == m]

    def with_hyperedges(self, hyperedges: Iterable[Iterable[int]]) -> Hypergraph:
        """Same node set (and labels), different hyperedge list."""
        return Hypergraph(self.node_count, tuple(tuple(e) for e in hyperedges), self.labels)

    def edge_set(self) -> Counter:
        return Counter(self.hyperedges)

    def relabel(self, perm: Sequence[int]) -> Hypergraph:
        """Move node ``i`` to position ``perm[i]``; hyperedge order is kept."""
        labels = None
        if self.labels is not None:
            new = [""] * self.node_count
            for i, p in enumerate(perm):
                new[p] = self.labels[i]
            labels = tuple(new)
        edges = tuple(tuple(perm[v] for v in e) for e in self.hyperedges)
        return Hypergraph(self.node_count, edges, labels)

    @cached_property
    def incident(self) -> list[list[int]]:
        """For each node, the hyperedge indices containing it (once per occurrence)."""
        out: list[list[int]] = [[] for _ in range(self.node_count)]
        for k, e in enumerate(self.hyperedges):
            for v in e:
                out[v].append(k)
        return out


# ---------------------------------------------------------------- parsing


def _parse_edge_list(text: str) -> tuple[list[str], list[list[int]]]:
    index: dict[str, int] = {}
    edges: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        edge = []
        for tok in line.split():
            if not _TOKEN.match(tok):
                raise MalformedLine(lineno, raw, f"invalid token {tok!r}")
            edge.append(index.setdefault(tok, len(index)))
        edges.append(edge)
    return list(index), edges


def _parse_json(text: str) -> tuple[list[str], list[list[int]]]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedLine(exc.lineno, text.splitlines()[exc.lineno - 1] if text else "", exc.msg) from None
    if not isinstance(obj, dict):
        raise MalformedLine(1, text[:40], "expected a JSON object")
    index: dict[str, int] = {}
    if "hyperedges" in obj:
        raw_edges = obj["hyperedges"]
        for lab in obj.get("nodes", []):
            index.setdefault(str(lab), len(index))
    elif "edge-dict" in obj:
        # XGI interchange layout: {"node-data": {...}, "edge-dict": {id: [members]}}
        raw_edges = list(obj["edge-dict"].values())
        for lab in obj.get("node-data", {}):
            index.setdefault(str(lab), len(index))
    else:
        raise MalformedLine(1, text[:40], 'missing "hyperedges" (or XGI "edge-dict")')
    edges = []
    for k, members in enumerate(raw_edges):
        if not isinstance(members, list):
            raise MalformedLine(1, str(members)[:40], f"hyperedge {k} is not a list")
        if not members:
            raise EmptyHyperedge(f"hyperedge {k} is empty")
        edges.append([index.setdefault(str(lab), len(index)) for lab in members])
    return list(index), edges


def parse_hypergraph(
    text: str,
    format: Literal["edgelist", "json"] = "edgelist",
    *,
    dedup: bool = False,
    drop_singletons: bool = False,
) -> Hypergraph:
    """Parse a hyperedge list or JSON document.

    Hyperedge-list: one hyperedge per line, whitespace-separated labels,
    ``#`` to end of line is a comment.  JSON: ``{"nodes": [...],
    "hyperedges": [[...], ...]}`` (``nodes`` optional) or the XGI
    ``edge-dict`` layout.  Labels are interned in order of first appearance.
    Duplicate hyperedges are kept unless ``dedup`` is set.
    """
    if format in ("edgelist", "hyperedge-list"):
        labels, edges = _parse_edge_list(text)
    elif format == "json":
        if not text.strip():
            raise EmptyInput("no hyperedges in input")
        labels, edges = _parse_json(text)
    else:
        raise ValueError(f"unknown format {format!r}")
    if drop_singletons:
        edges = [e for e in edges if len(e) >= 2]
    if dedup:
        seen: set[Edge] = set()
        kept = []
        for e in edges:
            key = tuple(sorted(e))
            if key not in seen:
                seen.add(key)
                kept.append(e)
        edges = kept
    if not edges:
        raise EmptyInput("no hyperedges in input")
    return Hypergraph(len(labels), tuple(tuple(e) for e in edges), tuple(labels))


def format_hypergraph(h: Hypergraph) -> str:
    """Hyperedge-list text: members in node-index order, lines in stored order."""
    return "".join(" ".join(h.label(v) for v in e) + "\n" for e in h.hyperedges)


def hypergraph_to_json(h: Hypergraph) -> str:
    return json.dumps(
        {"nodes": h.node_labels, "hyperedges": [[h.label(v) for v in e] for e in h.hyperedges]}
    )


def drop_isolated(h: Hypergraph) -> Hypergraph:
    """Remove nodes that belong to no hyperedge."""
    used = sorted({v for e in h.hyperedges for v in e})
    sub, _ = induced_subhypergraph(h, used)
    return sub


# ------------------------------------------------------------- incidence


@dataclass(frozen=True)
class IncidenceBipartite:
    """Two-layer incidence multigraph.

    Vertices ``0..left_count-1`` are hypergraph nodes, vertices
    ``left_count..left_count+right_count-1`` are hyperedges.  ``entries``
    lists ``(node, hyperedge, multiplicity)`` for every nonzero incidence.
    """

    left_count: int
    right_count: int
    entries: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        weight = [0] * self.right_count
        for _, e, m in self.entries:
            weight[e] += m
        if any(w == 0 for w in weight):
            raise ValueError("an edge-layer vertex has no incidence (empty hyperedge)")

    @property
    def vertex_count(self) -> int:
        return self.left_count + self.right_count

    def layer(self, v: int) -> Literal["node", "edge"]:
        return "node" if v < self.left_count else "edge"

    def multiplicity(self, node: int, edge: int) -> int:
        for n, e, m in self.entries:
            if n == node and e == edge:
                return m
        return 0

    @property
    def total_weight(self) -> int:
        return sum(m for _, _, m in self.entries)

    def adjacency(self) -> list[list[tuple[int, int]]]:
        """Undirected weighted adjacency over all vertices."""
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.vertex_count)]
        for n, e, m in self.entries:
            ev = self.left_count + e
            adj[n].append((ev, m))
            adj[ev].append((n, m))
        return adj

    def layer_colors(self) -> list[int]:
        return [0] * self.left_count + [1] * self.right_count

    def to_hypergraph(self, labels: Sequence[str] | None = None) -> Hypergraph:
        members: list[list[int]] = [[] for _ in range(self.right_count)]
        for n, e, m in self.entries:
            members[e].extend([n] * m)
        return Hypergraph(self.left_count, tuple(tuple(x) for x in members),
                          tuple(labels) if labels is not None else None)


def incidence(h: Hypergraph) -> IncidenceBipartite:
    entries = []
    for k, e in enumerate(h.hyperedges):
        for v, m in sorted(Counter(e).items()):
            entries.append((v, k, m))
    return IncidenceBipartite(h.node_count, h.edge_count, tuple(entries))


# ------------------------------------------------------------ projection


def project(h: Hypergraph, mode: Literal["simple", "multi"] = "simple") -> Hypergraph:
    """Clique expansion.

    ``multi`` emits every unordered pair of positions of every hyperedge,
    including self-pairs from repeated members; ``simple`` keeps each
    distinct pair of distinct nodes once, in order of first appearance.
    """
    if mode not in ("simple", "multi"):
        raise ValueError(f"unknown projection mode {mode!r}")
    pairs: list[Edge] = []
    for e in h.hyperedges:
        for a in range(len(e)):
            for b in range(a + 1, len(e)):
                pairs.append((e[a], e[b]))
    if mode == "simple":
        seen: set[Edge] = set()
        simple = []
        for p in pairs:
            if p[0] != p[1] and p not in seen:
                seen.add(p)
                simple.append(p)
        pairs = simple
    return h.with_hyperedges(pairs)


# --------------------------------------------------------------- degrees


@dataclass(frozen=True)
class DegreeProfile:
    """``counts[i, m]`` = incidences of node ``i`` in hyperedges of order ``m``.

    A node occurring twice in one hyperedge contributes 2.  Column 0 is
    always zero; columns run up to the rank.
    """

    counts: np.ndarray

    def k(self, m: int) -> np.ndarray:
        if m < self.counts.shape[1]:
            return self.counts[:, m]
        return np.zeros(self.counts.shape[0], dtype=self.counts.dtype)

    def sequence(self, i: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.counts[i, 1:])

    @property
    def node_count(self) -> int:
        return self.counts.shape[0]

    def groups(self) -> Partition:
        """Nodes grouped by their full degree sequence."""
        return Partition.from_labels(self.sequence(i) for i in range(self.node_count))


def degrees(h: Hypergraph) -> DegreeProfile:
    counts = np.zeros((h.node_count, h.rank + 1), dtype=np.int64)
    for e in h.hyperedges:
        m = len(e)
        for v in e:
            counts[v, m] += 1
    counts.setflags(write=False)
    return DegreeProfile(counts)


# ---------------------------------------------------------- connectivity


def _components(h: Hypergraph) -> Partition:
    parent = list(range(h.node_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in h.hyperedges:
        r = find(e[0])
        for v in e[1:]:
            s = find(v)
            if s != r:
                parent[s] = r
    return Partition.from_labels(find(i) for i in range(h.node_count))


def connectivity(h: Hypergraph) -> tuple[bool, Partition]:
    """Whether all nodes are linked by chains of shared hyperedges, plus the components."""
    comps = _components(h)
    return comps.num_classes <= 1, comps


def is_connected(h: Hypergraph) -> bool:
    return _components(h).num_classes <= 1


def induced_subhypergraph(h: Hypergraph, nodes: Sequence[int]) -> tuple[Hypergraph, dict[int, int]]:
    """Keep ``nodes`` (relabelled in the given order) and the hyperedges inside them."""
    old_to_new = {v: i for i, v in enumerate(nodes)}
    edges = [tuple(old_to_new[v] for v in e) for e in h.hyperedges if all(v in old_to_new for v in e)]
    labels = tuple(h.label(v) for v in nodes) if h.labels is not None else None
    return Hypergraph(len(nodes), tuple(edges), labels), old_to_new


def largest_component(h: Hypergraph) -> tuple[Hypergraph, dict[int, int]]:
    """The largest connected component (ties: the one holding the lowest node)."""
    _, comps = connectivity(h)
    if comps.num_classes <= 1:
        return h, {i: i for i in range(h.node_count)}
    best = max(comps.classes, key=len)
    return induced_subhypergraph(h, best)


# ------------------------------------------------------- random generator


def _unrank_combination(rank: int, n: int, k: int) -> tuple[int, ...]:
    """The ``rank``-th k-subset of range(n) in lexicographic order."""
    out = []
    x = 0
    for slot in range(k, 0, -1):
        while True:
            c = math.comb(n - x - 1, slot - 1)
            if rank < c:
                break
            rank -= c
            x += 1
        out.append(x)
        x += 1
    return tuple(out)


def seeded_rng(seed: int) -> np.random.Generator:
    """The package-wide generator: numpy's Philox4x64 counter-based bit generator."""
    return np.random.Generator(np.random.Philox(seed))


def random_hypergraph(n: int, m2: int, m3: int, seed: int) -> Hypergraph:
    """Random hypergraph on ``n`` nodes with ``m2`` pairs and ``m3`` triples.

    Draw procedure (stable for a given seed):
      rng = Generator(Philox(seed))
      pair ranks   = rng.choice(C(n,2), m2, replace=False)   (skipped when m2 == 0)
      triple ranks = rng.choice(C(n,3), m3, replace=False)   (skipped when m3 == 0)
    Each rank is unranked into the corresponding lexicographic k-subset of
    range(n); hyperedges keep draw order, pairs first.  The largest
    connected component is returned, nodes relabelled in increasing order and
    labelled with their original index.
    """
    if n < 3:
        raise InvalidCounts("n must be at least 3")
    if m2 < 0 or m3 < 0 or m2 + m3 == 0:
        raise InvalidCounts("need m2 + m3 >= 1 with non-negative counts")
    if m2 > math.comb(n, 2) or m3 > math.comb(n, 3):
        raise InvalidCounts(f"cannot draw {m2} pairs / {m3} triples on {n} nodes")
    rng = seeded_rng(seed)
    edges: list[Edge] = []
    for k, count in ((2, m2), (3, m3)):
        if count:
            ranks = rng.choice(math.comb(n, k), size=count, replace=False)
            edges.extend(_unrank_combination(int(r), n, k) for r in ranks)
    full = Hypergraph(n, tuple(edges), tuple(str(i) for i in range(n)))
    sub, _ = largest_component(full)
    return sub
