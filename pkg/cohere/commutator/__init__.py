# Python imports
from importlib import metadata

# Local imports
from cohere.commutator.clients import AlgebraCalculator
from cohere.commutator.corpus import builtin, builtin_names
from cohere.commutator.formats import (
    parse_algebra,
    parse_algebra_text,
    parse_partition,
    serialize_algebra,
)
from cohere.commutator.models import (
    CommutatorMethod,
    ComputationConfig,
    FiniteAlgebra,
    Partition,
    SearchOutcome,
    TermFamily,
    ValidatedModel,
)

__version__ = metadata.version("commutator-sdk")

__all__ = [
    "AlgebraCalculator",
    "CommutatorMethod",
    "ComputationConfig",
    "FiniteAlgebra",
    "Partition",
    "SearchOutcome",
    "TermFamily",
    "ValidatedModel",
    "builtin",
    "builtin_names",
    "parse_algebra",
    "parse_algebra_text",
    "parse_partition",
    "serialize_algebra",
]
