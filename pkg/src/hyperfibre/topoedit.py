"""Fibre-aware topology edits: sparsification, retargeting, redundancy injection."""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from .errors import Disconnected
from .fibration import fibres, hypergraph_fibres, node_signatures
from .hypergraph import Edge, Hypergraph, is_connected, seeded_rng
from .partition import Partition


@dataclass(frozen=True)
class EditConfig:
    seed: int = 0
    n_orders: int = 10
    protected: frozenset[int] = frozenset()
    max_iter: int = 50
    K: int = 10
    T: int = 100
    retry_limit: int = 3

    def __post_init__(self):
        if self.n_orders < 1 or self.max_iter < 1 or self.retry_limit < 1:
            raise ValueError("n_orders, max_iter and retry_limit must be >= 1")
        object.__setattr__(self, "protected", frozenset(self.protected))


@dataclass(frozen=True)
class EditReport:
    hypergraph: Hypergraph
    added: list[Edge] = field(default_factory=list)
    removed: list[Edge] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0
    batches: list[list[Edge]] = field(default_factory=list)

    def to_json(self) -> str:
        h = self.hypergraph
        lab = lambda e: [h.label(v) for v in e]  # noqa: E731
        return json.dumps({
            "added": [lab(e) for e in self.added],
            "removed": [lab(e) for e in self.removed],
            "converged": self.converged,
            "iterations": self.iterations,
        })


# ------------------------------------------------------------ sparsify


def _greedy_pass(h: Hypergraph, groups: list[list[int]], order: Sequence[int],
                 blocked: set[int], reference: Partition) -> list[int]:
    alive = [True] * h.edge_count
    for g in order:
        if g in blocked:
            continue
        for k in groups[g]:
            alive[k] = False
        trial = h.with_hyperedges(e for k, e in enumerate(h.hyperedges) if alive[k])
        if not (is_connected(trial) and fibres(trial) == reference):
            for k in groups[g]:
                alive[k] = True
    return [k for k in range(h.edge_count) if alive[k]]


def sparsify(h: Hypergraph, cfg: EditConfig = EditConfig(), *, target: Partition | None = None) -> EditReport:
    """Greedily drop whole hyperedge colour groups while keeping fibres and connectivity.

    Tries ``cfg.n_orders`` seeded permutations of the groups and keeps the
    smallest survivor set (ties: lexicographically smallest index list).
    A group holding a protected hyperedge is never removed.  ``target``
    overrides the partition to preserve (default: the fibres of ``h``).
    """
    if not is_connected(h):
        raise Disconnected("sparsify needs a connected hypergraph")
    res = hypergraph_fibres(h)
    reference = target if target is not None else res.node_partition
    groups = res.hyperedge_partition.classes
    blocked = {g for g, members in enumerate(groups) if cfg.protected.intersection(members)}
    rng = seeded_rng(cfg.seed)
    best: list[int] | None = None
    for _ in range(cfg.n_orders):
        order = rng.permutation(len(groups))
        kept = _greedy_pass(h, groups, order, blocked, reference)
        if best is None or (len(kept), kept) < (len(best), best):
            best = kept
    keep = set(best)
    removed = [e for k, e in enumerate(h.hyperedges) if k not in keep]
    out = h.with_hyperedges(h.hyperedges[k] for k in best)
    return EditReport(out, added=[], removed=removed, converged=True, iterations=cfg.n_orders)


def feasible_group_subsets(h: Hypergraph, target: Partition | None = None):
    """Exhaustively yield every removable set of colour groups (small inputs only)."""
    res = hypergraph_fibres(h)
    reference = target if target is not None else res.node_partition
    groups = res.hyperedge_partition.classes
    for r in range(len(groups) + 1):
        for combo in itertools.combinations(range(len(groups)), r):
            drop = {k for g in combo for k in groups[g]}
            trial = h.with_hyperedges(e for k, e in enumerate(h.hyperedges) if k not in drop)
            if is_connected(trial) and fibres(trial) == reference:
                yield combo, trial


# ------------------------------------------------------------ retarget


def _disagreement(a: Partition, b: Partition) -> int:
    """Node pairs grouped together by exactly one of the two partitions."""
    joint = Counter(zip(a.class_of, b.class_of))
    pa = sum(math.comb(s, 2) for s in Counter(a.class_of).values())
    pb = sum(math.comb(s, 2) for s in Counter(b.class_of).values())
    both = sum(math.comb(s, 2) for s in joint.values())
    return pa + pb - 2 * both


class _EdgeBuilder:
    """Accumulates new hyperedges, refusing duplicates of existing ones."""

    def __init__(self, h: Hypergraph):
        self.existing = set(h.hyperedges)
        self.new: list[Edge] = []

    def add(self, members: Iterable[int]) -> bool:
        e = tuple(sorted(members))
        if e in self.existing:
            return False
        self.existing.add(e)
        self.new.append(e)
        return True

    def has(self, members: Iterable[int]) -> bool:
        return tuple(sorted(members)) in self.existing


def _split_step(fibre: list[int], target: Partition, b: _EdgeBuilder) -> None:
    tcls = target.class_of
    parts: dict[int, list[int]] = {}
    for v in fibre:
        parts.setdefault(tcls[v], []).append(v)
    if len(parts) < 2:
        return
    chosen = min(parts.values(), key=lambda s: (len(s), s[0]))
    in_fibre = set(fibre)
    disjoint = [c for c in target.classes if not in_fibre.intersection(c)]
    disjoint.sort(key=lambda c: (len(c), c[0]))
    anchors = [v for c in disjoint for v in c]
    chosen_set = set(chosen)
    anchors += sorted(v for v in range(target.element_count) if v not in chosen_set and v not in anchors)
    for s in chosen:
        for x in anchors:
            if x != s and b.add((s, x)):
                break


def _merge_step(h: Hypergraph, members: list[int], target: Partition, b: _EdgeBuilder) -> None:
    current = h.with_hyperedges(list(h.hyperedges) + b.new)
    sigs = node_signatures(current, target)
    top: Counter = Counter()
    for v in members:
        for key, cnt in sigs[v].items():
            top[key] = max(top[key], cnt)
    classes = target.classes
    for v in members:
        for key in sorted(top):
            missing = top[key] - sigs[v][key]
            order, others = key
            for _ in range(missing):
                pools = [[u for u in classes[c] if u != v] or classes[c] for c in others]
                fallback = None
                for combo in itertools.product(*pools):
                    cand = (v, *combo)
                    if fallback is None:
                        fallback = cand
                    if len(set(combo)) == len(combo) and b.add(cand):
                        break
                else:
                    if fallback is not None:
                        b.add(fallback)


def retarget(h: Hypergraph, target: Partition, cfg: EditConfig = EditConfig()) -> EditReport:
    """Add hyperedges until the fibres equal ``target``, then prune the additions.

    Each round recomputes the fibres, splits computed fibres that straddle
    target classes, and equalises the class signatures of target classes
    spread over several fibres.  Stops after ``cfg.max_iter`` rounds (or
    when a round adds nothing) with ``converged=False`` and the state
    closest to the target.
    """
    if target.element_count != h.node_count:
        raise ValueError("target partition size does not match node count")
    original = h.edge_count
    current = h
    best = (math.inf, current, 0)
    rounds = 0
    while True:
        p = fibres(current)
        if p == target:
            break
        score = _disagreement(p, target)
        if score < best[0]:
            best = (score, current, rounds)
        if rounds >= cfg.max_iter:
            _, state, _ = best
            added = list(state.hyperedges[original:])
            return EditReport(state, added=added, converged=False, iterations=rounds)
        rounds += 1
        b = _EdgeBuilder(current)
        for fibre in p.classes:
            _split_step(fibre, target, b)
        tcls_of_fibre = p.class_of
        for members in target.classes:
            if len({tcls_of_fibre[v] for v in members}) > 1:
                _merge_step(current, members, target, b)
        if not b.new:
            _, state, _ = best
            return EditReport(state, added=list(state.hyperedges[original:]), converged=False,
                              iterations=rounds)
        current = current.with_hyperedges(list(current.hyperedges) + b.new)

    if is_connected(current) and current.edge_count > original:
        pruned = sparsify(current, EditConfig(seed=cfg.seed, n_orders=cfg.n_orders,
                                              protected=frozenset(range(original))), target=target)
        current = pruned.hypergraph
    added = [e for e in current.hyperedges[original:]]
    return EditReport(current, added=added, converged=True, iterations=rounds)


# ---------------------------------------------------- redundancy injection


def structured_batch(member_lists: Sequence[Sequence[int]]) -> list[Edge]:
    """Zip cyclically repeated member lists into lcm(sizes) hyperedges."""
    L = math.lcm(*(len(m) for m in member_lists))
    return [tuple(sorted(m[pos % len(m)] for m in member_lists)) for pos in range(L)]


def inject_redundancy(h: Hypergraph, K: int, cfg: EditConfig = EditConfig()) -> EditReport:
    """Add batches of hyperedges that leave the fibre partition unchanged.

    Each trial takes the next order from a shuffled list of ``2..rank``,
    picks that many distinct fibres, and builds a batch with
    :func:`structured_batch` from shuffled member lists.  A batch is
    rejected if any candidate already exists, and committed only if the
    fibres are unchanged; up to ``cfg.retry_limit`` fresh shuffles per
    trial.  Stops once ``K`` hyperedges were added or ``cfg.T`` trials ran.
    """
    if K < 0:
        raise ValueError("K must be non-negative")
    target = fibres(h)
    classes = target.classes
    rng = seeded_rng(cfg.seed)
    orders = [int(r) for r in rng.permutation(range(2, h.rank + 1))]
    current = h
    existing = set(h.hyperedges)
    added: list[Edge] = []
    batches: list[list[Edge]] = []
    trials = 0
    while len(added) < K and trials < cfg.T and orders:
        r = orders[trials % len(orders)]
        trials += 1
        if r > len(classes):
            continue
        picked = [classes[int(c)] for c in rng.choice(len(classes), size=r, replace=False)]
        for _ in range(cfg.retry_limit):
            lists = [[m[int(i)] for i in rng.permutation(len(m))] for m in picked]
            batch = structured_batch(lists)
            if any(e in existing for e in batch):
                continue
            trial = current.with_hyperedges(list(current.hyperedges) + batch)
            if fibres(trial) == target:
                current = trial
                existing.update(batch)
                added.extend(batch)
                batches.append(batch)
                break
    return EditReport(current, added=added, converged=len(added) >= K, iterations=trials,
                      batches=batches)
