# Python imports
import logging
import threading
import time
from collections.abc import Iterable
from typing import Optional

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.exceptions import (
    CapExceededError,
    NotAbelianError,
    NotACongruenceError,
    NotAffineError,
    NotModularError,
)
from cohere.commutator.models import (
    AbelianAnalysis,
    AffineReport,
    AffineRepresentation,
    AlgebraReport,
    AlgebraSummary,
    CapsReport,
    CommutatorMethod,
    ComputationConfig,
    CongruenceLattice,
    DecompositionReport,
    FiniteAlgebra,
    LatticeProperties,
    LatticeReport,
    Partition,
    SolvabilityReport,
    Term,
    TermFamily,
    TermOutcomeReport,
    TermSearchResult,
    WitnessLog,
)
from cohere.commutator.ops.affine import (
    commutator_day,
    difference_term,
    module_reconstruct,
)
from cohere.commutator.ops.commutator import (
    abelian_analysis,
    center,
    commutator_delta,
    commutator_tc,
    iterated_commutator,
    matrix_rows,
)
from cohere.commutator.ops.congruence import cg, cg_with_witnesses, is_congruence
from cohere.commutator.ops.lattice import con_all, lattice_properties
from cohere.commutator.ops.maltsev import find_terms
from cohere.commutator.utils import parallel_map

logger = logging.getLogger(__name__)

Pair = tuple[int, int]


class AlgebraCalculator:
    """
    Client computing congruences, commutators and term conditions of one algebra.

    The client is stateful: Con(A), the matrix sets M(alpha, beta) and the term search
    outcomes are computed once and reused by every later call. All limits come from the
    ``ComputationConfig`` the client was created with.

    :param algebra: the algebra to work on
    :param config: caps, number of jobs and the zero used for affine reconstruction
    """

    def __init__(
        self,
        *,
        algebra: FiniteAlgebra,
        config: Optional[ComputationConfig] = None,
    ):
        """
        Initialize the AlgebraCalculator.

        :param algebra: the algebra to work on
        :param config: the computation limits; defaults are used when omitted
        """
        self.algebra = algebra
        self.config = config or ComputationConfig()
        self._lattice: Optional[CongruenceLattice] = None
        self._properties: Optional[LatticeProperties] = None
        self._matrices: dict[tuple[Partition, Partition], np.ndarray] = {}
        self._terms: dict[TermFamily, TermSearchResult] = {}
        self._congruences: set[Partition] = set()
        self._lock = threading.Lock()
        logger.info(f"AlgebraCalculator initialized for {algebra}")

    @property
    def size(self) -> int:  # noqa: D102
        return self.algebra.size

    def congruences(self) -> CongruenceLattice:
        """Con(A), sorted from 0_A to 1_A."""
        if self._lattice is None:
            self._lattice = con_all(self.algebra, self.config.congruence_cap)
        return self._lattice

    def lattice_properties(self) -> LatticeProperties:
        """Modularity, distributivity and M3 detection for Con(A)."""
        if self._properties is None:
            self._properties = lattice_properties(self.congruences())
        return self._properties

    def cg(self, pairs: Iterable[Pair]) -> Partition:
        """The congruence generated by ``pairs``."""
        return cg(self.algebra, pairs)

    def cg_with_witnesses(self, pairs: Iterable[Pair]) -> tuple[Partition, WitnessLog]:
        """The congruence generated by ``pairs`` with its merge log."""
        return cg_with_witnesses(self.algebra, pairs)

    def matrices(self, alpha: Partition, beta: Partition) -> np.ndarray:
        """M(alpha, beta) as an ``m x 4`` array, computed once per pair."""
        key = (alpha, beta)
        with self._lock:
            cached = self._matrices.get(key)
        if cached is not None:
            return cached
        rows = matrix_rows(self.algebra, alpha, beta, self.config.closure_cap)
        with self._lock:
            self._matrices[key] = rows
        return rows

    def require_congruence(self, p: Partition) -> None:
        """
        Check that ``p`` is a congruence of A.

        :raises NotACongruenceError: if ``p`` has the wrong size or is not compatible
            with every operation.
        """
        with self._lock:
            if p in self._congruences:
                return
        if p.size != self.size or not is_congruence(self.algebra, p):
            raise NotACongruenceError(
                f"{p.to_text()} is not a congruence of {self.algebra.name}"
            )
        with self._lock:
            self._congruences.add(p)

    def terms(self, family: TermFamily) -> TermSearchResult:
        """The outcome of the search for ``family`` terms."""
        with self._lock:
            cached = self._terms.get(family)
        if cached is not None:
            return cached
        result = find_terms(self.algebra, family, self.config)
        with self._lock:
            self._terms[family] = result
        return result

    def commutator(
        self,
        alpha: Partition,
        beta: Partition,
        method: CommutatorMethod = CommutatorMethod.TermCondition,
    ) -> Partition:
        """
        The commutator [alpha, beta].

        :param method: ``tc`` works for every algebra; ``day`` and ``delta`` need Day
            terms.

        :raises NotACongruenceError: if ``alpha`` or ``beta`` is not a congruence of A.
        :raises NotModularError: if ``day`` or ``delta`` is asked for without Day terms.
        """
        method = CommutatorMethod(method)
        self.require_congruence(alpha)
        self.require_congruence(beta)
        if method == CommutatorMethod.TermCondition:
            return commutator_tc(
                self.algebra,
                alpha,
                beta,
                self.config.closure_cap,
                quads=self.matrices(alpha, beta),
            )
        day = self.terms(TermFamily.Day)
        if method == CommutatorMethod.Day:
            if day.chain is None:
                raise NotModularError(
                    f"no Day terms for {self.algebra.name}: {day.reason}"
                )
            return commutator_day(
                self.algebra, day.chain, alpha, beta, self.config.closure_cap
            )
        return commutator_delta(
            self.algebra,
            alpha,
            beta,
            congruence_modular=day.found,
            cap=self.config.closure_cap,
        )

    def commutator_table(
        self, method: CommutatorMethod = CommutatorMethod.TermCondition
    ) -> list[list[Partition]]:
        """``table[i][j]`` is the commutator of the i-th and j-th congruence."""
        lattice = self.congruences()
        pairs = [(a, b) for a in lattice.partitions for b in lattice.partitions]
        values = parallel_map(
            lambda ab: self.commutator(ab[0], ab[1], method),
            pairs,
            self.config.num_jobs,
        )
        m = len(lattice)
        return [values[i * m : (i + 1) * m] for i in range(m)]

    def center(self) -> Partition:
        """The center of A."""
        return center(self.algebra, self.config.closure_cap, self.config.num_jobs)

    def abelian(self) -> AbelianAnalysis:
        """Whether A is Abelian, with its largest Abelian quotient."""
        return abelian_analysis(self.algebra, self.config.closure_cap)

    def solvability(
        self, alpha: Optional[Partition] = None, max_n: Optional[int] = None
    ) -> SolvabilityReport:
        """
        The derived series of ``alpha`` (1_A by default).

        :raises NotACongruenceError: if ``alpha`` is not a congruence of A.
        """
        alpha = alpha or Partition.full(self.size)
        self.require_congruence(alpha)
        steps = max_n if max_n is not None else len(self.congruences())
        return iterated_commutator(self.algebra, alpha, steps, self.config.closure_cap)

    def difference_term(self) -> Optional[Term]:
        """The difference term built from the Day terms, if A has Day terms."""
        day = self.terms(TermFamily.Day)
        if day.chain is None:
            return None
        return difference_term(self.algebra, day.chain)

    def affine(self, zero: Optional[int] = None) -> AffineRepresentation:
        """
        The affine module structure of A.

        :raises NotAbelianError: if A is not Abelian.
        :raises NotAffineError: if A has no Mal'tsev polynomial.
        """
        return module_reconstruct(self.algebra, zero=zero, config=self.config)

    def report(self) -> AlgebraReport:
        """Compute everything the report document holds."""
        timing: dict[str, float] = {}

        def timed(name: str, start: float) -> None:
            timing[name] = round(time.perf_counter() - start, 6)

        start = time.perf_counter()
        lattice = self.congruences()
        properties = self.lattice_properties()
        timed("congruences", start)

        def names(triple: Optional[tuple[int, int, int]]) -> Optional[list[str]]:
            return None if triple is None else [lattice[i].to_text() for i in triple]

        start = time.perf_counter()
        table = self.commutator_table()
        timed("commutators", start)

        start = time.perf_counter()
        zeta = self.center()
        abelian = table[-1][-1].is_discrete
        solvability = self.solvability()
        timed("center", start)

        start = time.perf_counter()
        terms = {
            family.value: self._term_report(self.terms(family)) for family in TermFamily
        }
        difference = self.difference_term()
        timed("terms", start)

        affine: Optional[AffineReport] = None
        affine_error: Optional[str] = None
        if abelian:
            start = time.perf_counter()
            try:
                affine = self.affine_report(self.affine())
            except (NotAbelianError, NotAffineError, CapExceededError) as e:
                affine_error = e.message
            timed("affine", start)

        return AlgebraReport(
            algebra=AlgebraSummary(
                name=self.algebra.name,
                size=self.size,
                signature=[(op.symbol, op.arity) for op in self.algebra.operations],
            ),
            congruence_count=len(lattice),
            congruences=[p.to_text() for p in lattice.partitions],
            lattice=LatticeReport(
                modular=properties.modular,
                distributive=properties.distributive,
                m3_01=names(properties.m3_01),
                pentagon=names(properties.pentagon),
                nondistributive=names(properties.nondistributive),
            ),
            commutators=[[p.to_text() for p in row] for row in table],
            center=zeta.to_text(),
            abelian=abelian,
            solvability_degree=solvability.degree,
            terms=terms,
            difference_term=difference.to_text() if difference is not None else None,
            affine=affine,
            affine_error=affine_error,
            caps=CapsReport(
                closure_cap=self.config.closure_cap,
                free_algebra_cap_3=self.config.free_algebra_cap_3,
                free_algebra_cap_4=self.config.free_algebra_cap_4,
                congruence_cap=self.config.congruence_cap,
            ),
            timing=timing if self.config.include_timing else None,
        )

    @staticmethod
    def _term_report(result: TermSearchResult) -> TermOutcomeReport:
        return TermOutcomeReport(
            family=result.family.value,
            outcome=result.outcome.value,
            length=result.chain.length if result.chain is not None else None,
            terms=result.chain.to_text() if result.chain is not None else [],
            reason=result.reason,
        )

    @staticmethod
    def affine_report(representation: AffineRepresentation) -> AffineReport:
        """The JSON-ready form of an affine module structure."""
        return AffineReport(
            zero=representation.zero,
            plus=[list(row) for row in representation.plus],
            neg=list(representation.neg),
            ring_size=representation.ring_size,
            ring=[list(row) for row in representation.ring],
            ring_terms=[t.to_text() for t in representation.ring_terms],
            ring_add=[list(row) for row in representation.ring_add],
            ring_mul=[list(row) for row in representation.ring_mul],
            action=[list(row) for row in representation.action],
            decompositions=[
                DecompositionReport(
                    symbol=d.symbol,
                    coefficients=list(d.coefficients),
                    constant=d.constant,
                )
                for d in representation.decompositions
            ],
        )
