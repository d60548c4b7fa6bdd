# Python imports
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.models.partitions import Partition


@dataclass(frozen=True)
class CongruenceLattice:
    """
    All congruences of an algebra, sorted from finest to coarsest.

    ``leq[i, j]`` holds when ``partitions[i]`` refines ``partitions[j]``; ``meet`` and
    ``join`` hold the indices of the lattice operations.
    """

    algebra_name: str
    size: int
    partitions: tuple[Partition, ...]
    leq: np.ndarray = field(compare=False, repr=False)
    meet: np.ndarray = field(compare=False, repr=False)
    join: np.ndarray = field(compare=False, repr=False)

    @cached_property
    def _positions(self) -> dict[Partition, int]:
        return {p: i for i, p in enumerate(self.partitions)}

    @property
    def bottom(self) -> int:
        """Index of 0_A."""
        return self.index(Partition.discrete(self.size))

    @property
    def top(self) -> int:
        """Index of 1_A."""
        return self.index(Partition.full(self.size))

    def index(self, partition: Partition) -> int:
        """
        Return the position of ``partition``.

        :raises KeyError: if ``partition`` is not a congruence in this lattice.
        """
        return self._positions[partition]

    def __contains__(self, partition: object) -> bool:  # noqa: D105
        return partition in self._positions

    def __len__(self) -> int:  # noqa: D105
        return len(self.partitions)

    def __iter__(self):  # noqa: D105
        return iter(self.partitions)

    def __getitem__(self, i: int) -> Partition:  # noqa: D105
        return self.partitions[i]

    def covers(self) -> list[tuple[int, int]]:
        """Covering pairs ``(i, j)``: ``i < j`` with nothing strictly between."""
        strict = self.leq & ~np.eye(len(self), dtype=bool)
        between = (strict.astype(np.int64) @ strict.astype(np.int64)) > 0
        cover = strict & ~between
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(cover))]


@dataclass(frozen=True)
class LatticeProperties:
    """
    Shape of a congruence lattice.

    The triples are lattice indices. ``pentagon`` is ``(theta, phi, psi)`` with
    ``theta <= psi`` and ``(theta v phi) ^ psi != theta v (phi ^ psi)``;
    ``nondistributive`` is ``(theta, phi, psi)`` with
    ``theta ^ (phi v psi) != (theta ^ phi) v (theta ^ psi)``.
    """

    modular: bool
    distributive: bool
    m3_01: Optional[tuple[int, int, int]] = None
    pentagon: Optional[tuple[int, int, int]] = None
    nondistributive: Optional[tuple[int, int, int]] = None

    @property
    def has_m3(self) -> bool:  # noqa: D102
        return self.m3_01 is not None
