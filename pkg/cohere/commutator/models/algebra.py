# Python imports
from collections.abc import Sequence
from typing import Any, Optional, Union

# 3rd party imports
import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveInt, PrivateAttr

# Local imports
from cohere.commutator.models import ValidatedModel


class OperationDocument(ValidatedModel):
    """One operation as it appears in an algebra document."""

    symbol: str
    arity: int
    table: list[int]


class AlgebraDocument(ValidatedModel):
    """
    The algebra file schema.

    Documents are only checked for shape here; the algebra invariants (entry ranges,
    table lengths, symbol spelling) are checked by ``validate_algebra``.
    """

    name: str = "A"
    size: int
    operations: list[OperationDocument] = []


class OperationTable(BaseModel):
    """
    A fundamental operation of a finite algebra as a flat row-major table.

    The entry for the argument tuple ``(a_1, ..., a_k)`` lives at index
    ``sum(a_i * n ** (k - i))``.
    """

    model_config = ConfigDict(frozen=True)

    symbol: str
    arity: NonNegativeInt
    table: tuple[int, ...]


class FiniteAlgebra(BaseModel):
    """
    A finite algebra on the universe ``{0, ..., size - 1}``.

    Instances are immutable; the numpy views of the tables are built on first use and
    shared by every computation on the algebra.
    """

    model_config = ConfigDict(frozen=True)

    name: str
    size: PositiveInt
    operations: tuple[OperationTable, ...] = ()

    _arrays: Optional[tuple[np.ndarray, ...]] = PrivateAttr(default=None)
    _symbols: Optional[dict[str, int]] = PrivateAttr(default=None)

    @property
    def arrays(self) -> tuple[np.ndarray, ...]:
        """The operation tables as numpy arrays of shape ``(n,) * arity``."""
        if self._arrays is None:
            n = self.size
            arrays: list[np.ndarray] = []
            for op in self.operations:
                arr = np.asarray(op.table, dtype=np.intp).reshape((n,) * op.arity)
                arr.setflags(write=False)
                arrays.append(arr)
            self._arrays = tuple(arrays)
        return self._arrays

    @property
    def flat_tables(self) -> tuple[np.ndarray, ...]:
        """The operation tables as flat numpy arrays."""
        return tuple(arr.reshape(-1) for arr in self.arrays)

    @property
    def symbols(self) -> tuple[str, ...]:
        """The operation symbols in signature order."""
        return tuple(op.symbol for op in self.operations)

    @property
    def arities(self) -> tuple[int, ...]:
        """The operation arities in signature order."""
        return tuple(op.arity for op in self.operations)

    @property
    def elements(self) -> range:
        """The universe of the algebra."""
        return range(self.size)

    def operation_index(self, symbol: str) -> Optional[int]:
        """Return the position of the operation called ``symbol``, if any."""
        if self._symbols is None:
            self._symbols = {op.symbol: i for i, op in enumerate(self.operations)}
        return self._symbols.get(symbol)

    def operation(self, symbol: str) -> Optional[OperationTable]:
        """Return the operation called ``symbol``, if any."""
        index = self.operation_index(symbol)
        return None if index is None else self.operations[index]

    def apply(self, op: Union[int, str], args: Sequence[int]) -> int:
        """
        Apply a fundamental operation to a tuple of elements.

        :param op: the operation position or symbol.
        :param args: the arguments, one per arity slot.

        :returns: the value of the operation.
        """
        index = self.operation_index(op) if isinstance(op, str) else op
        if index is None:
            raise KeyError(f"{self.name} has no operation {op}")
        return int(self.arrays[index][tuple(args)])

    def describe(self) -> dict[str, Any]:
        """Return a short summary of the algebra for logs and reports."""
        return {
            "name": self.name,
            "size": self.size,
            "signature": [[op.symbol, op.arity] for op in self.operations],
        }

    def __str__(self) -> str:  # noqa: D105
        signature = ", ".join(f"{op.symbol}/{op.arity}" for op in self.operations)
        return f"{self.name}(n={self.size}; {signature})"
