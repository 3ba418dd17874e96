"""Fibres of hypergraphs by colour refinement on the incidence bipartite graph.

The fibre partition is the coarsest refinement of the two-layer colouring
(nodes vs. hyperedges) in which vertices of one class see identical
multisets of neighbour classes, counting incidence multiplicity.
"""

from __future__ import annotations

from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass

from .errors import UnbalancedPartition
from .hypergraph import Hypergraph, IncidenceBipartite, incidence
from .partition import FibreStats, Partition, canonical_ids, fibre_stats

__all__ = [
    "FibrationResult",
    "QuotientIncidence",
    "refine",
    "refine_with_rounds",
    "hypergraph_fibres",
    "fibres",
    "node_signatures",
    "is_balanced",
    "induced_edge_partition",
    "quotient",
    "fibre_stats",
    "FibreStats",
]

Adjacency = Sequence[Sequence[tuple[int, int]]]


def refine_with_rounds(graph: IncidenceBipartite | Adjacency, init_colors: Sequence[int]) -> tuple[Partition, int]:
    """Refine ``init_colors`` to the coarsest stable colouring.

    ``graph`` is an incidence bipartite graph or a plain weighted adjacency
    list (``graph[v]`` = list of ``(neighbour, multiplicity)``, every edge
    listed from both ends).  Returns the partition and the number of rounds
    run, including the final round that detected stability.
    """
    adj = graph.adjacency() if isinstance(graph, IncidenceBipartite) else graph
    if len(init_colors) != len(adj):
        raise ValueError(f"init_colors has length {len(init_colors)}, graph has {len(adj)} vertices")
    colors = canonical_ids(init_colors)
    count = max(colors, default=-1) + 1
    rounds = 0
    while True:
        rounds += 1
        signatures = []
        for v, nbrs in enumerate(adj):
            seen: dict[int, int] = {}
            for u, w in nbrs:
                c = colors[u]
                seen[c] = seen.get(c, 0) + w
            signatures.append((colors[v], tuple(sorted(seen.items()))))
        new = canonical_ids(signatures)
        new_count = max(new, default=-1) + 1
        colors = new
        if new_count == count:
            break
        count = new_count
    return Partition(colors), rounds


def refine(graph: IncidenceBipartite | Adjacency, init_colors: Sequence[int]) -> Partition:
    return refine_with_rounds(graph, init_colors)[0]


@dataclass(frozen=True)
class FibrationResult:
    node_partition: Partition
    hyperedge_partition: Partition
    round_count: int


def hypergraph_fibres(h: Hypergraph) -> FibrationResult:
    """Node and hyperedge fibres of ``h``."""
    b = incidence(h)
    part, rounds = refine_with_rounds(b, b.layer_colors())
    n = h.node_count
    return FibrationResult(
        node_partition=Partition.from_labels(part.class_of[:n]),
        hyperedge_partition=Partition.from_labels(part.class_of[n:]),
        round_count=rounds,
    )


def fibres(h: Hypergraph) -> Partition:
    """Shorthand for the node partition of :func:`hypergraph_fibres`."""
    return hypergraph_fibres(h).node_partition


def node_signatures(h: Hypergraph, p: Partition) -> list[Counter]:
    """Per node, counts of incident hyperedges keyed by (order, co-member classes).

    Co-member classes are the sorted classes of the hyperedge's other
    members, with one occurrence of the node itself removed.  A node that
    occurs twice in a hyperedge contributes two entries.
    """
    sigs = [Counter() for _ in range(h.node_count)]
    cls = p.class_of
    for e in h.hyperedges:
        members = [cls[v] for v in e]
        for pos, v in enumerate(e):
            others = tuple(sorted(members[:pos] + members[pos + 1:]))
            sigs[v][(len(e), others)] += 1
    return sigs


def is_balanced(h: Hypergraph, p: Partition) -> tuple[bool, tuple[int, int, Counter, Counter] | None]:
    """Check that all members of each class have identical signatures.

    Returns ``(True, None)`` or ``(False, (i, j, sig_i, sig_j))`` where ``i``
    is the first member of the offending class and ``j`` the first member
    that disagrees with it.
    """
    if p.element_count != h.node_count:
        raise ValueError("partition size does not match node count")
    sigs = node_signatures(h, p)
    for members in p.classes:
        first = members[0]
        for j in members[1:]:
            if sigs[j] != sigs[first]:
                return False, (first, j, sigs[first], sigs[j])
    return True, None


def induced_edge_partition(h: Hypergraph, p: Partition) -> Partition:
    """Hyperedges grouped by the multiset of their members' classes."""
    cls = p.class_of
    return Partition.from_labels(tuple(sorted(cls[v] for v in e)) for e in h.hyperedges)


@dataclass(frozen=True)
class QuotientIncidence:
    """Class-level incidence counts.

    ``edge_to_node[c][a]``: members of node class ``a`` in a hyperedge of
    class ``c``.  ``node_to_edge[a][c]``: incidences between a node of class
    ``a`` and hyperedges of class ``c``.  Both are read from the
    least-index representative of each class.
    """

    node_classes: Partition
    edge_classes: Partition
    edge_to_node: tuple[tuple[int, ...], ...]
    node_to_edge: tuple[tuple[int, ...], ...]

    @property
    def node_class_count(self) -> int:
        return self.node_classes.num_classes

    @property
    def edge_class_count(self) -> int:
        return self.edge_classes.num_classes


def _class_incidence(h: Hypergraph, np_: Partition, ep: Partition):
    """Per node and per hyperedge, counts towards the other layer's classes."""
    a_n, a_e = np_.num_classes, ep.num_classes
    node_rows = [[0] * a_e for _ in range(h.node_count)]
    edge_rows = [[0] * a_n for _ in range(h.edge_count)]
    for k, e in enumerate(h.hyperedges):
        ce = ep.class_of[k]
        for v in e:
            node_rows[v][ce] += 1
            edge_rows[k][np_.class_of[v]] += 1
    return node_rows, edge_rows


def quotient(h: Hypergraph, p: Partition, *, check: bool = True) -> QuotientIncidence:
    """Collapse each class of a balanced node partition to one vertex."""
    if check:
        ok, witness = is_balanced(h, p)
        if not ok:
            i, j, _, _ = witness
            raise UnbalancedPartition(f"nodes {h.label(i)} and {h.label(j)} share a class but differ in input")
    ep = induced_edge_partition(h, p)
    node_rows, edge_rows = _class_incidence(h, p, ep)
    return QuotientIncidence(
        node_classes=p,
        edge_classes=ep,
        edge_to_node=tuple(tuple(edge_rows[c[0]]) for c in ep.classes),
        node_to_edge=tuple(tuple(node_rows[c[0]]) for c in p.classes),
    )


def lifting_holds(h: Hypergraph, q: QuotientIncidence) -> bool:
    """Every class member reproduces its representative's tabulated counts."""
    node_rows, edge_rows = _class_incidence(h, q.node_classes, q.edge_classes)
    for a, members in enumerate(q.node_classes.classes):
        if any(tuple(node_rows[v]) != q.node_to_edge[a] for v in members):
            return False
    for c, members in enumerate(q.edge_classes.classes):
        if any(tuple(edge_rows[k]) != q.edge_to_node[c] for k in members):
            return False
    return True
