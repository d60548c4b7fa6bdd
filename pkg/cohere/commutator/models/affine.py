# Python imports
from dataclasses import dataclass, field
from typing import Optional

# Local imports
from cohere.commutator.models.partitions import Partition
from cohere.commutator.models.terms import Term


@dataclass(frozen=True)
class TernaryGroupWitness:
    """
    A ternary operation certified as a ternary Abelian group on ``elements``.

    ``table`` is indexed by positions in ``elements``, row-major over three arguments.
    """

    elements: tuple[int, ...]
    table: tuple[int, ...]
    maltsev: bool
    self_commuting: bool

    @property
    def holds(self) -> bool:  # noqa: D102
        return self.maltsev and self.self_commuting


@dataclass(frozen=True)
class GroupStructure:
    """An Abelian group ``(A, +, -, 0)`` read off a ternary Abelian group."""

    zero: int
    plus: tuple[tuple[int, ...], ...]
    neg: tuple[int, ...]
    witness: TernaryGroupWitness


@dataclass(frozen=True)
class OperationDecomposition:
    """
    ``f(x_1, ..., x_k) = r_1(x_1) + ... + r_k(x_k) + constant`` with ring indices
    ``r_i``.
    """

    symbol: str
    coefficients: tuple[int, ...]
    constant: int


@dataclass(frozen=True)
class AffineRepresentation:
    """
    An algebra presented as an affine module over its ring of zero-fixing polynomials.

    ``ring`` holds the function tables of the ring elements and ``ring_terms`` their
    provenance polynomials; ``ring_add``, ``ring_mul`` and ``action`` are indexed by
    ring positions.
    """

    group: GroupStructure
    ring: tuple[tuple[int, ...], ...]
    ring_terms: tuple[Term, ...]
    ring_add: tuple[tuple[int, ...], ...]
    ring_mul: tuple[tuple[int, ...], ...]
    action: tuple[tuple[int, ...], ...]
    ring_zero: int
    ring_one: int
    decompositions: tuple[OperationDecomposition, ...] = ()

    @property
    def zero(self) -> int:  # noqa: D102
        return self.group.zero

    @property
    def plus(self) -> tuple[tuple[int, ...], ...]:  # noqa: D102
        return self.group.plus

    @property
    def neg(self) -> tuple[int, ...]:  # noqa: D102
        return self.group.neg

    @property
    def ring_size(self) -> int:  # noqa: D102
        return len(self.ring)


@dataclass(frozen=True)
class CosetGroupReport:
    """Ternary groups on the blocks of an Abelian congruence."""

    congruence: Partition
    cosets: list[TernaryGroupWitness] = field(default_factory=list)
    homomorphism_holds: bool = True
    failure: Optional[str] = None

    @property
    def holds(self) -> bool:  # noqa: D102
        return self.homomorphism_holds and all(w.holds for w in self.cosets)


@dataclass(frozen=True)
class DifferenceTermReport:
    """
    Checks of a difference term ``d``.

    ``idempotent_law`` is ``d(x, x, y) = y``; ``per_congruence`` maps the text of each
    congruence alpha to whether ``d(x, y, y)`` is ``[alpha, alpha]``-related to ``x``
    for every alpha-pair.
    """

    term: Term
    idempotent_law: bool
    per_congruence: dict[str, bool] = field(default_factory=dict)

    @property
    def holds(self) -> bool:  # noqa: D102
        return self.idempotent_law and all(self.per_congruence.values())


@dataclass(frozen=True)
class CommutingReport:
    """Outcome of the difference-term characterisation of ``[alpha, beta] = 0``."""

    commutes: bool
    preserves_pairs: bool
    failure: Optional[str] = None

    @property
    def holds(self) -> bool:  # noqa: D102
        return self.commutes and self.preserves_pairs
