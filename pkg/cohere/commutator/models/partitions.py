# Python imports
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Optional

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.models.terms import Term


@dataclass(frozen=True, order=True)
class Partition:
    """
    An equivalence relation on ``{0, ..., n - 1}`` in canonical form.

    ``ids[i]`` is the least element of the block of ``i``, so two partitions are equal
    exactly when their id sequences are equal.
    """

    ids: tuple[int, ...]

    @classmethod
    def discrete(cls, n: int) -> "Partition":
        """The identity relation 0_A."""
        return cls(tuple(range(n)))

    @classmethod
    def full(cls, n: int) -> "Partition":
        """The full relation 1_A."""
        return cls((0,) * n)

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "Partition":
        """
        Canonicalize an arbitrary block labelling.

        :param labels: any sequence assigning equal labels to related elements.

        :returns: the partition whose blocks are the label classes.
        """
        arr = np.asarray(labels)
        if arr.size == 0:
            return cls(())
        _, first, inverse = np.unique(arr, return_index=True, return_inverse=True)
        return cls(tuple(int(i) for i in first[inverse.reshape(-1)]))

    @classmethod
    def from_blocks(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        """
        Build a partition from possibly incomplete blocks.

        Elements missing from every block become singletons.

        Blocks must be disjoint and within range; callers validating user text check
        this first.
        """
        labels = list(range(n))
        for block in blocks:
            members = sorted(block)
            if not members:
                continue
            for element in members:
                labels[element] = members[0]
        return cls.from_labels(labels)

    @property
    def size(self) -> int:
        """The size of the underlying set."""
        return len(self.ids)

    @cached_property
    def array(self) -> np.ndarray:
        """The block ids as a read-only numpy array."""
        arr = np.asarray(self.ids, dtype=np.intp)
        arr.setflags(write=False)
        return arr

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        """The blocks, sorted by least element, each in ascending order."""
        grouped: dict[int, list[int]] = {}
        for element, block_id in enumerate(self.ids):
            grouped.setdefault(block_id, []).append(element)
        return tuple(tuple(grouped[k]) for k in sorted(grouped))

    @property
    def num_blocks(self) -> int:  # noqa: D102
        return len(self.blocks)

    @property
    def is_discrete(self) -> bool:  # noqa: D102
        return all(i == e for e, i in enumerate(self.ids))

    @property
    def is_full(self) -> bool:  # noqa: D102
        return all(i == 0 for i in self.ids)

    def related(self, a: int, b: int) -> bool:
        """Return whether ``a`` and ``b`` lie in the same block."""
        return self.ids[a] == self.ids[b]

    def leq(self, other: "Partition") -> bool:
        """Return whether this partition refines ``other``."""
        mine = self.array
        theirs = other.array
        return bool(np.all(theirs == theirs[mine]))

    def matrix(self) -> np.ndarray:
        """The relation as an ``n x n`` boolean matrix."""
        return self.array[:, None] == self.array[None, :]

    def pairs(self) -> list[tuple[int, int]]:
        """All related pairs ``(a, b)`` with ``a != b``, in lexicographic order."""
        return [
            (a, b)
            for a in range(self.size)
            for b in range(self.size)
            if a != b and self.ids[a] == self.ids[b]
        ]

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        """Key ordering partitions from finest to coarsest, ties by id sequence."""
        return (self.size - self.num_blocks, self.ids)

    def to_text(self) -> str:
        """Render as ``0,2|1,3``; singleton blocks are kept."""
        return "|".join(",".join(str(e) for e in block) for block in self.blocks)

    def __str__(self) -> str:  # noqa: D105
        return self.to_text()


class Justification(str, Enum):
    """Why two classes were merged during congruence generation."""

    Generator = "generator"
    Translation = "translation"

    @classmethod
    def _missing_(cls, value: Any):
        return cls.Translation


@dataclass(frozen=True)
class MergeRecord:
    """
    One merge performed while generating a congruence.

    ``pair`` are the two elements whose classes were joined. A translation record
    obtained ``pair`` by applying the operation ``symbol`` at argument ``slot``, with
    the other arguments frozen to ``constants``, to the pair of record ``source``.
    """

    pair: tuple[int, int]
    justification: Justification
    symbol: Optional[str] = None
    slot: Optional[int] = None
    constants: tuple[int, ...] = ()
    source: Optional[int] = None


@dataclass
class WitnessLog:
    """The ordered merge records of one congruence generation run."""

    size: int
    records: list[MergeRecord] = field(default_factory=list)

    def replay(self) -> Partition:
        """Rebuild the generated partition from the discrete one and the records."""
        labels = list(range(self.size))
        for record in self.records:
            a, b = record.pair
            la, lb = labels[a], labels[b]
            if la == lb:
                continue
            low, high = min(la, lb), max(la, lb)
            labels = [low if label == high else label for label in labels]
        return Partition(tuple(labels))

    def __len__(self) -> int:  # noqa: D105
        return len(self.records)


@dataclass(frozen=True)
class ChainStep:
    """
    One link of a Mal'tsev chain.

    ``polynomial`` is a unary polynomial in ``x0`` with ``polynomial(pair[0]) == start``
    and ``polynomial(pair[1]) == end``, where ``pair`` is a generator pair read in the
    orientation recorded by ``forward``.
    """

    polynomial: Term
    generator: tuple[int, int]
    forward: bool
    start: int
    end: int

    @property
    def pair(self) -> tuple[int, int]:
        """The generator pair in the orientation used by this step."""
        a, b = self.generator
        return (a, b) if self.forward else (b, a)
