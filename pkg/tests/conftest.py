import itertools
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import pytest

from cohere.commutator.corpus import builtin, builtin_names
from cohere.commutator.models import FiniteAlgebra, Partition

GROUPS = ["Z2", "Z4", "V4", "S3", "D4"]
LATTICES = ["lattice2", "chain3", "M3lat", "N5lat"]
RINGS = ["zeroring2", "zeroring4"]
DOCS = Path(__file__).parent / "docs"


@pytest.fixture(scope="session")
def corpus() -> dict[str, FiniteAlgebra]:
    return {name: builtin(name) for name in builtin_names()}


@pytest.fixture(scope="session")
def z4(corpus: dict[str, FiniteAlgebra]) -> FiniteAlgebra:
    return corpus["Z4"]


@pytest.fixture(scope="session")
def s3(corpus: dict[str, FiniteAlgebra]) -> FiniteAlgebra:
    return corpus["S3"]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


class GroupOracle:
    """Brute-force group theory on the multiplication table of a group algebra."""

    def __init__(self, algebra: FiniteAlgebra):
        symbols = {op.symbol for op in algebra.operations}
        mul, inv, unit = ("+", "-", "0") if "+" in symbols else ("*", "inv", "e")
        n = algebra.size
        self.n = n
        self.mul = np.asarray(algebra.operation(mul).table).reshape(n, n)
        self.inv = np.asarray(algebra.operation(inv).table)
        self.e = algebra.operation(unit).table[0]

    def generated(self, elements: set[int]) -> frozenset[int]:
        found = {self.e} | set(elements)
        while True:
            fresh = {int(self.mul[a, b]) for a in found for b in found} - found
            if not fresh:
                return frozenset(found)
            found |= fresh

    def normal_subgroups(self) -> list[frozenset[int]]:
        result = []
        others = [x for x in range(self.n) if x != self.e]
        for r in range(len(others) + 1):
            for chosen in itertools.combinations(others, r):
                subset = frozenset(chosen) | {self.e}
                closed = all(self.mul[a, b] in subset for a in subset for b in subset)
                conjugation = all(
                    self.mul[self.mul[g, h], self.inv[g]] in subset
                    for g in range(self.n)
                    for h in subset
                )
                if closed and conjugation:
                    result.append(subset)
        return result

    def commutator_subgroup(
        self, m: frozenset[int], k: frozenset[int]
    ) -> frozenset[int]:
        commutators = {
            int(self.mul[self.mul[self.inv[a], self.inv[b]], self.mul[a, b]])
            for a in m
            for b in k
        }
        return self.generated(commutators)

    def center(self) -> frozenset[int]:
        return frozenset(
            z
            for z in range(self.n)
            if all(self.mul[z, g] == self.mul[g, z] for g in range(self.n))
        )

    def theta(self, subgroup: frozenset[int]) -> Partition:
        """Cosets of ``subgroup``: x ~ y iff x^-1 y is in it."""
        labels = [
            min(int(self.mul[x, h]) for h in subgroup) for x in range(self.n)
        ]
        return Partition.from_labels(labels)


@pytest.fixture
def group_oracle():
    return GroupOracle


def set_partitions(n: int) -> Iterator[Partition]:
    """Every partition of range(n), by restricted growth strings."""

    def grow(prefix: list[int], top: int) -> Iterator[list[int]]:
        if len(prefix) == n:
            yield prefix
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    for labels in grow([0], 0):
        yield Partition.from_labels(labels)


def compatible(algebra: FiniteAlgebra, p: Partition) -> bool:
    """Direct check that every operation maps related tuples to related values."""
    n = algebra.size
    for op in algebra.operations:
        table = np.asarray(op.table).reshape((n,) * op.arity)
        for args in itertools.product(range(n), repeat=op.arity):
            for slot in range(op.arity):
                for other in range(n):
                    if not p.related(args[slot], other):
                        continue
                    moved = list(args)
                    moved[slot] = other
                    if not p.related(int(table[args]), int(table[tuple(moved)])):
                        return False
    return True


def brute_force_congruences(algebra: FiniteAlgebra) -> set[Partition]:
    return {p for p in set_partitions(algebra.size) if compatible(algebra, p)}


def relation_product(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    n = len(p)
    return np.array(
        [
            [any(p[a, c] and q[c, b] for c in range(n)) for b in range(n)]
            for a in range(n)
        ]
    )
