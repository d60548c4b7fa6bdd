# Python imports
import itertools
import logging
import math
from collections.abc import Iterator, Sequence
from typing import Optional, Union

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.constants import (
    CLOSURE_BLOCK_ENTRIES,
    DENSE_CODE_LIMIT,
    MAX_INT_CODE_BITS,
)
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.terms import Application, Term

logger = logging.getLogger(__name__)

GENERATOR = -1

Rows = Union[np.ndarray, Sequence[Sequence[int]]]


class PowerClosure:
    """
    The subuniverse of A^k generated by a set of k-tuples.

    Elements are stored as the rows of a numpy array in breadth-first, first-seen order.
    Every element records how it was first obtained: either as generator ``j`` or as
    the operation ``op`` applied to earlier elements, which is what term extraction
    replays.

    The closure is computed semi-naively: in every round each operation is applied only
    to argument tuples containing at least one element found in the previous round.
    Rounds can be consumed incrementally through ``batches`` so that searches may stop
    as soon as a witness shows up; ``run`` finishes whatever is left.
    """

    def __init__(
        self,
        algebra: FiniteAlgebra,
        k: int,
        generators: Rows,
        cap: int,
        *,
        include_constants: bool = True,
    ):
        """
        Initialize the closure with its generators; no operation is applied yet.

        :param algebra: the algebra whose operations act coordinatewise.
        :param k: the exponent of the power.
        :param generators: the generating k-tuples.
        :param cap: the largest number of elements to generate.
        :param include_constants: whether nullary operations contribute elements.
        """
        self.algebra = algebra
        self.k = k
        self.cap = cap
        self.include_constants = include_constants
        self.incomplete = False
        self.complete = False
        self.rounds = 0

        n = algebra.size
        self._dtype = np.uint8 if n <= 256 else np.int64
        self._buf = np.empty((16, k), dtype=self._dtype)
        self._count = 0
        self._ops: list[int] = []
        self._parents: list[tuple[int, ...]] = []
        self._lookup: dict[Union[int, bytes], int] = {}

        bits = k * math.log2(n) if n > 1 else 0.0
        self._int_codes = bits <= MAX_INT_CODE_BITS
        self._seen: Optional[np.ndarray] = None
        self._sorted_codes = np.empty(0, dtype=np.int64)
        if self._int_codes:
            self._powers = np.array(
                [n ** (k - 1 - i) for i in range(k)], dtype=np.int64
            )
            if n**k <= DENSE_CODE_LIMIT:
                self._seen = np.zeros(n**k, dtype=bool)

        gens = np.asarray(generators, dtype=np.int64).reshape(-1, k)
        if gens.size and (gens.min() < 0 or gens.max() >= n):
            raise ValueError(f"Generator entries must lie in [0, {n})")
        self.num_generators = len(gens)
        self._admit(
            gens.astype(self._dtype),
            GENERATOR,
            np.arange(len(gens), dtype=np.int64).reshape(-1, 1),
        )
        self._stages = self._expand()

    def __len__(self) -> int:  # noqa: D105
        return self._count

    @property
    def rows(self) -> np.ndarray:
        """The elements generated so far, one per row."""
        return self._buf[: self._count]

    def row(self, i: int) -> tuple[int, ...]:
        """Return element ``i`` as a tuple."""
        return tuple(int(v) for v in self._buf[i])

    def provenance(self, i: int) -> tuple[int, tuple[int, ...]]:
        """
        Return ``(op, parents)`` for row ``i``.

        ``op`` is ``-1`` for generators, whose ``parents`` is ``(j,)``.
        """
        return self._ops[i], self._parents[i]

    def index_of(self, row: Sequence[int]) -> Optional[int]:
        """Return the position of ``row`` among the generated elements, if present."""
        arr = np.asarray(row, dtype=np.int64).reshape(1, self.k)
        return self._lookup.get(self._keys(arr.astype(self._dtype))[0])

    def __contains__(self, row: Sequence[int]) -> bool:  # noqa: D105
        return self.index_of(row) is not None

    def batches(self) -> Iterator[tuple[int, int]]:
        """
        Advance the closure, yielding the index range of each batch of new elements.

        Leaving the loop early suspends the closure; a later ``batches`` or ``run``
        resumes it where it stopped.
        """
        return self._stages

    def run(self) -> "PowerClosure":
        """Compute the closure to completion or to the cap."""
        for _ in self._stages:
            pass
        return self

    def term(self, i: int, leaves: Sequence[Term]) -> Term:
        """
        Extract the term recorded for element ``i``.

        :param i: the element position.
        :param leaves: the term standing for each generator.

        :returns: a term that evaluates coordinatewise to element ``i`` when its leaves
            are read as the generators.
        """
        memo: dict[int, Term] = {}
        symbols = self.algebra.symbols

        def build(j: int) -> Term:
            if j in memo:
                return memo[j]
            op, parents = self._ops[j], self._parents[j]
            if op == GENERATOR:
                result = leaves[parents[0]]
            else:
                result = Application(symbols[op], tuple(build(p) for p in parents))
            memo[j] = result
            return result

        return build(i)

    def _keys(self, rows: np.ndarray) -> list[Union[int, bytes]]:
        if self._int_codes:
            return (rows.astype(np.int64) @ self._powers).tolist()
        contiguous = np.ascontiguousarray(rows)
        return [r.tobytes() for r in contiguous]

    def _admit(self, rows: np.ndarray, op: int, parents: np.ndarray) -> int:
        if len(rows) == 0 or self.incomplete:
            return 0

        if self._int_codes:
            codes = rows.astype(np.int64) @ self._powers
            _, first = np.unique(codes, return_index=True)
            first.sort()
            codes, rows, parents = codes[first], rows[first], parents[first]
            if self._seen is not None:
                fresh = ~self._seen[codes]
            else:
                fresh = ~np.isin(codes, self._sorted_codes, assume_unique=True)
            codes, rows, parents = codes[fresh], rows[fresh], parents[fresh]
            keys: list[Union[int, bytes]] = codes.tolist()
        else:
            contiguous = np.ascontiguousarray(rows)
            void = contiguous.view(
                np.dtype((np.void, contiguous.dtype.itemsize * self.k))
            ).ravel()
            _, first = np.unique(void, return_index=True)
            first.sort()
            keep: list[int] = []
            keys = []
            batch_keys: set[bytes] = set()
            for i in first.tolist():
                key = contiguous[i].tobytes()
                if key not in self._lookup and key not in batch_keys:
                    batch_keys.add(key)
                    keep.append(i)
                    keys.append(key)
            rows, parents = contiguous[keep], parents[keep]
            codes = None

        remaining = self.cap - self._count
        if len(rows) > remaining:
            rows, parents = rows[:remaining], parents[:remaining]
            keys = keys[:remaining]
            if codes is not None:
                codes = codes[:remaining]
            self.incomplete = True
            logger.warning(
                f"Closure in {self.algebra.name}^{self.k} reached its cap of "
                f"{self.cap} elements; the result is incomplete"
            )
        if len(rows) == 0:
            return 0

        if codes is not None:
            if self._seen is not None:
                self._seen[codes] = True
            else:
                self._sorted_codes = np.union1d(self._sorted_codes, codes)

        start = self._count
        end = start + len(rows)
        if end > len(self._buf):
            grown = np.empty((max(end, 2 * len(self._buf)), self.k), dtype=self._dtype)
            grown[:start] = self._buf[:start]
            self._buf = grown
        self._buf[start:end] = rows
        self._count = end
        self._ops.extend([op] * len(rows))
        self._parents.extend(tuple(p) for p in parents.tolist())
        self._lookup.update(zip(keys, range(start, end)))
        return len(rows)

    def _expand(self) -> Iterator[tuple[int, int]]:
        arities = self.algebra.arities
        if self.num_generators:
            yield (0, self._count)
        if self.include_constants:
            for op, arity in enumerate(arities):
                if arity != 0:
                    continue
                start = self._count
                value = self.algebra.operations[op].table[0]
                row = np.full((1, self.k), value, dtype=self._dtype)
                if self._admit(row, op, np.empty((1, 0), dtype=np.int64)):
                    yield (start, self._count)

        lo = 0
        while not self.incomplete:
            hi = self._count
            if lo == hi:
                break
            for op, arity in enumerate(arities):
                for slot in range(arity):
                    for rows, parents in self._candidates(op, arity, slot, lo, hi):
                        start = self._count
                        if self._admit(rows, op, parents):
                            yield (start, self._count)
                        if self.incomplete:
                            return
            lo = hi
            self.rounds += 1
            logger.debug(
                f"Closure in {self.algebra.name}^{self.k}: round {self.rounds} "
                f"ends with {self._count} elements"
            )
        self.complete = not self.incomplete

    def _candidates(
        self, op: int, arity: int, slot: int, lo: int, hi: int
    ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
        if slot > 0 and lo == 0:
            return
        table = self.algebra.arrays[op]
        buf = self._buf
        k = self.k
        ranges = [
            range(0, lo) if i < slot else range(lo, hi) if i == slot else range(0, hi)
            for i in range(arity)
        ]

        if arity == 1:
            step = max(1, CLOSURE_BLOCK_ENTRIES // max(1, k))
            for start in range(lo, hi, step):
                stop = min(hi, start + step)
                yield (
                    table[buf[start:stop]].astype(self._dtype),
                    np.arange(start, stop, dtype=np.int64).reshape(-1, 1),
                )
            return

        first, second = ranges[-2], ranges[-1]
        chunk_b = min(len(second), max(1, CLOSURE_BLOCK_ENTRIES // max(1, k)))
        chunk_a = max(1, CLOSURE_BLOCK_ENTRIES // max(1, chunk_b * k))
        for prefix in itertools.product(*ranges[:-2]):
            fixed = tuple(buf[p] for p in prefix)
            for a0 in range(first.start, first.stop, chunk_a):
                a1 = min(first.stop, a0 + chunk_a)
                for b0 in range(second.start, second.stop, chunk_b):
                    b1 = min(second.stop, b0 + chunk_b)
                    index = fixed + (buf[a0:a1, None, :], buf[None, b0:b1, :])
                    values = table[index].reshape(-1, k).astype(self._dtype)
                    ia, ib = np.meshgrid(
                        np.arange(a0, a1, dtype=np.int64),
                        np.arange(b0, b1, dtype=np.int64),
                        indexing="ij",
                    )
                    parents = np.empty((values.shape[0], arity), dtype=np.int64)
                    if prefix:
                        parents[:, : arity - 2] = np.asarray(prefix, dtype=np.int64)
                    parents[:, arity - 2] = ia.reshape(-1)
                    parents[:, arity - 1] = ib.reshape(-1)
                    yield values, parents
