# Python imports
from typing import Optional

# Local imports
from cohere.commutator.models import ValidatedModel


class AlgebraSummary(ValidatedModel):
    """Name, size and signature of the algebra a report describes."""

    name: str
    size: int
    signature: list[tuple[str, int]]


class LatticeReport(ValidatedModel):
    """Shape of Con(A); triples are given as partition texts."""

    modular: bool
    distributive: bool
    m3_01: Optional[list[str]] = None
    pentagon: Optional[list[str]] = None
    nondistributive: Optional[list[str]] = None


class TermOutcomeReport(ValidatedModel):
    """The outcome of one term search."""

    family: str
    outcome: str
    length: Optional[int] = None
    terms: list[str] = []
    reason: str = ""


class DecompositionReport(ValidatedModel):
    """``f = sum(r_i(x_i)) + constant`` for one basic operation."""

    symbol: str
    coefficients: list[int]
    constant: int


class AffineReport(ValidatedModel):
    """An affine module representation in report form."""

    zero: int
    plus: list[list[int]]
    neg: list[int]
    ring_size: int
    ring: list[list[int]]
    ring_terms: list[str]
    ring_add: list[list[int]]
    ring_mul: list[list[int]]
    action: list[list[int]]
    decompositions: list[DecompositionReport]


class CapsReport(ValidatedModel):
    """The caps a report was computed under."""

    closure_cap: int
    free_algebra_cap_3: int
    free_algebra_cap_4: int
    congruence_cap: int


class AlgebraReport(ValidatedModel):
    """
    Everything computed about one algebra.

    ``commutators[i][j]`` is the commutator of ``congruences[i]`` and
    ``congruences[j]`` computed with the term condition.
    """

    algebra: AlgebraSummary
    congruence_count: int
    congruences: list[str]
    lattice: LatticeReport
    commutators: list[list[str]]
    center: str
    abelian: bool
    solvability_degree: Optional[int] = None
    terms: dict[str, TermOutcomeReport]
    difference_term: Optional[str] = None
    affine: Optional[AffineReport] = None
    affine_error: Optional[str] = None
    caps: CapsReport
    timing: Optional[dict[str, float]] = None
