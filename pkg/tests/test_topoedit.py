import math
import random
from collections import Counter

import pytest

from conftest import INJECT_CASE, RETARGET_CASE, SPARSIFY_CASE, by_label, label_sets
from hyperfibre import (
    EditConfig,
    Hypergraph,
    fibres,
    hypergraph_fibres,
    inject_redundancy,
    is_connected,
    parse_hypergraph,
    random_hypergraph,
    retarget,
    sparsify,
    structured_batch,
)
from hyperfibre.errors import Disconnected
from hyperfibre.partition import Partition
from hyperfibre.topoedit import feasible_group_subsets

ABCD = label_sets("AB", "C", "D")


def named(h, edges):
    return {tuple(sorted(h.label(v) for v in e)) for e in edges}


def target_from_labels(h, groups):
    index = {lab: i for i, lab in enumerate(h.node_labels)}
    return Partition.from_classes([[index[x] for x in g] for g in groups], h.node_count)


def random_target(h, seed):
    rnd = random.Random(seed)
    return Partition.from_labels(rnd.randrange(max(2, h.node_count // 2)) for _ in range(h.node_count))


class TestSparsify:
    def test_golden(self):
        h = parse_hypergraph(SPARSIFY_CASE)
        rep = sparsify(h)
        assert named(h, rep.removed) == {("A", "C"), ("B", "C")}
        assert named(rep.hypergraph, rep.hypergraph.hyperedges) == {("A", "B", "C"), ("A", "D"), ("B", "D")}
        assert by_label(rep.hypergraph, fibres(rep.hypergraph)) == ABCD

    def test_minimal_tree_unchanged(self):
        h = parse_hypergraph("a b\nb c\nc d\n")
        rep = sparsify(h)
        assert rep.hypergraph == h and rep.removed == []

    def test_all_protected(self):
        h = parse_hypergraph(SPARSIFY_CASE)
        rep = sparsify(h, EditConfig(protected=frozenset(range(h.edge_count))))
        assert rep.hypergraph == h

    def test_protected_group(self):
        h = parse_hypergraph(SPARSIFY_CASE)
        rep = sparsify(h, EditConfig(protected=frozenset({1})))
        assert rep.removed == []

    def test_disconnected(self):
        with pytest.raises(Disconnected):
            sparsify(parse_hypergraph("a b\nc d\n"))

    @pytest.mark.parametrize("seed", range(50))
    def test_invariants(self, seed):
        h = random_hypergraph(20, 18, 8, seed)
        protected = frozenset({0}) if seed % 2 else frozenset()
        rep = sparsify(h, EditConfig(seed=seed, n_orders=3, protected=protected))
        out = rep.hypergraph
        assert not Counter(out.hyperedges) - Counter(h.hyperedges)
        assert fibres(out) == fibres(h)
        assert is_connected(out)
        assert all(h.hyperedges[k] in out.hyperedges for k in protected)
        assert out.edge_count + len(rep.removed) == h.edge_count

    def test_deterministic(self):
        h = random_hypergraph(30, 30, 10, 4)
        a, b = sparsify(h, EditConfig(seed=9)), sparsify(h, EditConfig(seed=9))
        assert a == b and a.to_json() == b.to_json()


def symmetric_instances():
    """Small symmetric hypergraphs with at most six hyperedge colour groups."""
    found = []
    seed = 0
    while len(found) < 25:
        rnd = random.Random(seed)
        seed += 1
        k = rnd.randint(3, 5)
        # a ring or star of k identical blocks keeps the colour count low
        base = [(0, 1), (0, 2), (1, 2, 3)][: rnd.randint(1, 3)]
        edges = []
        for b in range(k):
            off = 4 * b
            edges += [tuple(off + v for v in e) for e in base]
            edges.append((off, 4 * ((b + 1) % k)))
            if rnd.random() < 0.5:
                edges.append((off + 1, 4 * ((b + 2) % k) + 1))
        h = Hypergraph(4 * k, tuple(edges))
        used = sorted({v for e in h.hyperedges for v in e})
        h = Hypergraph(len(used), tuple(tuple(used.index(v) for v in e) for e in h.hyperedges))
        if is_connected(h) and hypergraph_fibres(h).hyperedge_partition.num_classes <= 6:
            found.append(h)
    return found


class TestSparsifyOracle:
    @pytest.mark.parametrize("h", symmetric_instances())
    def test_greedy_is_feasible_and_bounded(self, h):
        rep = sparsify(h)
        subsets = list(feasible_group_subsets(h))
        kept = [trial.edge_count for _, trial in subsets]
        assert Counter(rep.hypergraph.hyperedges) in [Counter(t.hyperedges) for _, t in subsets]
        assert min(kept) <= rep.hypergraph.edge_count


class TestRetarget:
    def test_golden(self):
        h = parse_hypergraph(RETARGET_CASE)
        target = target_from_labels(h, ["AB", "C", "D"])
        rep = retarget(h, target)
        assert rep.converged
        assert named(h, rep.added) == {("B", "C")}
        assert fibres(rep.hypergraph) == target

    def test_already_at_target(self, ten_node):
        rep = retarget(ten_node, fibres(ten_node))
        assert rep.converged and rep.added == [] and rep.iterations == 0

    def test_max_iter_contract(self):
        h = random_hypergraph(16, 14, 6, 0)
        target = random_target(h, 0)
        full = retarget(h, target)
        assert full.converged and full.iterations >= 2
        capped = retarget(h, target, EditConfig(max_iter=1))
        assert not capped.converged
        assert capped.iterations <= 1

    def test_size_mismatch(self, ten_node):
        with pytest.raises(ValueError):
            retarget(ten_node, Partition.singletons(3))

    @pytest.mark.parametrize("seed", range(50))
    def test_invariants(self, seed):
        h = random_hypergraph(16, 14, 6, seed)
        target = random_target(h, seed) if seed % 2 else Partition.singletons(h.node_count)
        rep = retarget(h, target, EditConfig(seed=seed))
        out = rep.hypergraph
        assert not Counter(h.hyperedges) - Counter(out.hyperedges)
        assert not set(rep.added) & set(h.hyperedges)
        if rep.converged:
            assert fibres(out) == target
        if seed % 2 == 0:
            assert rep.converged

    def test_deterministic(self):
        h = random_hypergraph(16, 14, 6, 3)
        t = random_target(h, 3)
        assert retarget(h, t, EditConfig(seed=2)) == retarget(h, t, EditConfig(seed=2))


class TestInject:
    def test_batch_shape(self):
        assert structured_batch([[0, 1], [2]]) == [(0, 2), (1, 2)]
        assert len(structured_batch([[0, 1], [2, 3, 4]])) == 6

    def test_golden_batch_keeps_fibres(self):
        h = parse_hypergraph(INJECT_CASE)
        idx = {lab: i for i, lab in enumerate(h.node_labels)}
        batch = structured_batch([[idx["A"], idx["B"]], [idx["C"]]])
        assert named(h, batch) == {("A", "C"), ("B", "C")}
        grown = h.with_hyperedges(list(h.hyperedges) + batch)
        assert fibres(grown) == fibres(h)

    def test_merging_batch_is_detected(self):
        h = parse_hypergraph(INJECT_CASE)
        idx = {lab: i for i, lab in enumerate(h.node_labels)}
        grown = h.with_hyperedges(list(h.hyperedges) + [(idx["C"], idx["D"])])
        assert fibres(grown).num_classes < fibres(h).num_classes

    @pytest.mark.parametrize("seed", range(5))
    def test_case_never_merges(self, seed):
        h = parse_hypergraph(INJECT_CASE)
        rep = inject_redundancy(h, 2, EditConfig(seed=seed))
        assert rep.batches
        assert by_label(rep.hypergraph, fibres(rep.hypergraph)) == ABCD

    def test_zero(self, ten_node):
        rep = inject_redundancy(ten_node, 0)
        assert rep.hypergraph == ten_node and rep.added == []

    def test_negative(self, ten_node):
        with pytest.raises(ValueError):
            inject_redundancy(ten_node, -1)

    @pytest.mark.parametrize("seed", range(50))
    def test_invariants(self, seed):
        h = random_hypergraph(20, 18, 8, seed)
        rep = inject_redundancy(h, 6, EditConfig(seed=seed, T=30))
        out = rep.hypergraph
        assert out.hyperedges[: h.edge_count] == h.hyperedges
        assert fibres(out) == fibres(h)
        assert not set(rep.added) & set(h.hyperedges)
        assert sum(len(b) for b in rep.batches) == len(rep.added)
        part = fibres(h)
        for batch in rep.batches:
            gained = Counter(v for e in batch for v in e)
            for c in {part.class_of[v] for v in gained}:
                members = part.classes[c]
                assert all(gained[v] == len(batch) // len(members) for v in members)

    def test_uniform_incidence_gain(self):
        h = random_hypergraph(30, 30, 12, 1)
        rep = inject_redundancy(h, 8, EditConfig(seed=5))
        assert rep.batches
        part = fibres(h)
        for batch in rep.batches:
            L = len(batch)
            gained = Counter(v for e in batch for v in e)
            touched = {part.class_of[v] for v in gained}
            assert L == math.lcm(*(len(part.classes[c]) for c in touched))
            for c in touched:
                members = part.classes[c]
                assert all(gained[v] == L // len(members) for v in members)

    def test_deterministic(self):
        h = random_hypergraph(20, 18, 8, 2)
        assert inject_redundancy(h, 5, EditConfig(seed=1)) == inject_redundancy(h, 5, EditConfig(seed=1))

    def test_report_json(self):
        h = parse_hypergraph(SPARSIFY_CASE)
        assert sparsify(h).to_json() == (
            '{"added": [], "removed": [["A", "C"], ["B", "C"]], "converged": true, "iterations": 10}')
