"""Canonical set partitions of ``0..n-1``."""

from __future__ import annotations

import json
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple


def canonical_ids(keys: Iterable[Hashable]) -> tuple[int, ...]:
    """Relabel arbitrary keys to 0..h-1 in order of first occurrence."""
    seen: dict[Hashable, int] = {}
    return tuple(seen.setdefault(k, len(seen)) for k in keys)


@dataclass(frozen=True)
class Partition:
    """A partition of ``element_count`` elements in canonical form.

    ``class_of[i]`` is the class id of element ``i``; ids run over ``0..h-1``
    and are numbered by first occurrence, so two partitions are equal exactly
    when their ``class_of`` tuples are.
    """

    class_of: tuple[int, ...]

    def __post_init__(self):
        if tuple(canonical_ids(self.class_of)) != tuple(self.class_of):
            object.__setattr__(self, "class_of", canonical_ids(self.class_of))

    @classmethod
    def from_labels(cls, keys: Iterable[Hashable]) -> Partition:
        return cls(canonical_ids(keys))

    @classmethod
    def from_classes(cls, classes: Iterable[Iterable[int]], element_count: int) -> Partition:
        class_of = [-1] * element_count
        for cid, members in enumerate(classes):
            for m in members:
                if not 0 <= m < element_count:
                    raise ValueError(f"element {m} out of range 0..{element_count - 1}")
                if class_of[m] != -1:
                    raise ValueError(f"element {m} appears in more than one class")
                class_of[m] = cid
        missing = [i for i, c in enumerate(class_of) if c == -1]
        if missing:
            raise ValueError(f"elements not covered by any class: {missing[:10]}")
        return cls(tuple(class_of))

    @classmethod
    def singletons(cls, element_count: int) -> Partition:
        return cls(tuple(range(element_count)))

    @classmethod
    def trivial(cls, element_count: int) -> Partition:
        return cls((0,) * element_count)

    @property
    def element_count(self) -> int:
        return len(self.class_of)

    @cached_property
    def classes(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_classes)]
        for i, c in enumerate(self.class_of):
            out[c].append(i)
        return out

    @property
    def num_classes(self) -> int:
        return max(self.class_of, default=-1) + 1

    def merge(self, a: int, b: int) -> Partition:
        """Return the partition with classes ``a`` and ``b`` fused."""
        return Partition(tuple(a if c == b else c for c in self.class_of))

    def restrict(self, elements: Sequence[int]) -> Partition:
        return Partition.from_labels(self.class_of[e] for e in elements)

    def is_refinement_of(self, other: Partition) -> bool:
        image: dict[int, int] = {}
        for c, o in zip(self.class_of, other.class_of):
            if image.setdefault(c, o) != o:
                return False
        return True

    def to_json(self, labels: Sequence[str] | None = None) -> str:
        return partition_to_json(self, labels)


class FibreStats(NamedTuple):
    class_count: int
    avg_class_size: float
    nontrivial_count: int


def fibre_stats(partition: Partition) -> FibreStats:
    """Class count, mean class size and the number of classes with >= 2 members."""
    sizes = [len(c) for c in partition.classes]
    h = len(sizes)
    avg = partition.element_count / h if h else 0.0
    return FibreStats(h, avg, sum(1 for s in sizes if s >= 2))


def partition_to_json(partition: Partition, labels: Sequence[str] | None = None) -> str:
    name = (lambda i: labels[i]) if labels is not None else str
    classes = [[name(i) for i in cls] for cls in partition.classes]
    return json.dumps({"classes": classes})


def partition_from_json(text: str | dict, labels: Sequence[str]) -> Partition:
    """Read ``{"classes": [[label, ...], ...]}`` against a node label list."""
    obj = json.loads(text) if isinstance(text, str) else text
    if not isinstance(obj, dict) or not isinstance(obj.get("classes"), list):
        raise ValueError('partition JSON must be an object with a "classes" list')
    index = {lab: i for i, lab in enumerate(labels)}
    classes = []
    for cls in obj["classes"]:
        try:
            classes.append([index[str(lab)] for lab in cls])
        except KeyError as exc:
            raise ValueError(f"unknown node label {exc.args[0]!r} in partition") from None
    return Partition.from_classes(classes, len(labels))
