# Python imports
from dataclasses import dataclass, field
from typing import Optional

# Local imports
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.partitions import Partition


@dataclass(frozen=True)
class MatrixQuad:
    """
    An element of A^4 read as a 2x2 matrix.

    The rows are ``(top_left, top_right)`` and ``(bottom_left, bottom_right)``.
    """

    top_left: int
    top_right: int
    bottom_left: int
    bottom_right: int

    @classmethod
    def from_row(cls, row: tuple[int, ...]) -> "MatrixQuad":  # noqa: D102
        tl, tr, bl, br = (int(v) for v in row)
        return cls(tl, tr, bl, br)

    @property
    def top(self) -> tuple[int, int]:  # noqa: D102
        return (self.top_left, self.top_right)

    @property
    def bottom(self) -> tuple[int, int]:  # noqa: D102
        return (self.bottom_left, self.bottom_right)

    @property
    def left(self) -> tuple[int, int]:  # noqa: D102
        return (self.top_left, self.bottom_left)

    @property
    def right(self) -> tuple[int, int]:  # noqa: D102
        return (self.top_right, self.bottom_right)


@dataclass(frozen=True)
class CentralityReport:
    """
    Outcome of the term condition C(alpha, beta; delta).

    A failing report carries a matrix of M(alpha, beta) whose top row is delta-related
    while its bottom row is not.
    """

    holds: bool
    counterexample: Optional[MatrixQuad] = None


@dataclass(frozen=True)
class AbelianAnalysis:
    """Abelianness of an algebra and its largest Abelian quotient."""

    abelian: bool
    derived: Partition
    abelianization: FiniteAlgebra
    projection: tuple[int, ...]
    diagonal_coset_check: bool


@dataclass(frozen=True)
class SolvabilityReport:
    """
    The derived series of a congruence.

    ``series[0]`` is the congruence itself; ``degree`` is the least ``k`` with
    ``series[k]`` equal to 0_A, or ``None`` when the series stabilised above 0_A or ran
    out of steps.
    """

    series: list[Partition] = field(default_factory=list)
    degree: Optional[int] = None

    @property
    def solvable(self) -> bool:  # noqa: D102
        return self.degree is not None


@dataclass(frozen=True)
class DeltaRelation:
    """
    A congruence on the algebra A_alpha of alpha-pairs.

    ``pairs[i]`` is the alpha-pair that is element ``i`` of ``algebra``; ``partition``
    is a congruence of ``algebra``.
    """

    algebra: FiniteAlgebra
    pairs: tuple[tuple[int, int], ...]
    partition: Partition

    def index(self, a: int, b: int) -> int:
        """Position of the alpha-pair ``(a, b)``."""
        return self.pairs.index((a, b))

    def related(self, left: tuple[int, int], right: tuple[int, int]) -> bool:
        """Whether two alpha-pairs lie in the same block."""
        return self.partition.related(self.index(*left), self.index(*right))
