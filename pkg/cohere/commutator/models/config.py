# Python imports
from enum import Enum
from os import getenv
from typing import Any

# 3rd party imports
from pydantic import Field, PositiveInt

# Local imports
from cohere.commutator.constants import (
    DEFAULT_CLOSURE_CAP,
    DEFAULT_CONGRUENCE_CAP,
    DEFAULT_FREE_ALGEBRA_CAP_3,
    DEFAULT_FREE_ALGEBRA_CAP_4,
    DEFAULT_NUM_JOBS,
    DEFAULT_SQUARE_OBSTRUCTION_LIMIT,
    DEFAULT_ZERO_ELEMENT,
    NUM_JOBS_ENV_VAR,
)
from cohere.commutator.models import ValidatedModel


class CommutatorMethod(str, Enum):
    """Algorithm used to compute a commutator."""

    TermCondition = "tc"
    Day = "day"
    Delta = "delta"

    @classmethod
    def _missing_(cls, value: Any):
        return cls.TermCondition


def _default_num_jobs() -> int:
    value = getenv(NUM_JOBS_ENV_VAR)
    if value and value.isdigit() and int(value) > 0:
        return int(value)
    return DEFAULT_NUM_JOBS


class ComputationConfig(ValidatedModel):
    """
    Limits and defaults for computations on one algebra.

    Attributes:
        closure_cap: largest generated set of tuples (M(alpha, beta), subalgebras,
            polynomial clones) before a closure is reported incomplete.
        free_algebra_cap_3: cap for the free algebra on three generators.
        free_algebra_cap_4: cap for the free algebra on four generators.
        congruence_cap: largest number of congruences enumerated by ``con_all``.
        square_obstruction_limit: largest ``|A|^2`` for which Con(A^2) is inspected to
            prove that a term family does not exist.
        num_jobs: number of threads used for tables of independent computations.
        zero: element used as the zero of reconstructed groups.
        include_timing: whether reports carry wall-clock timings.

    """

    closure_cap: PositiveInt = DEFAULT_CLOSURE_CAP
    free_algebra_cap_3: PositiveInt = DEFAULT_FREE_ALGEBRA_CAP_3
    free_algebra_cap_4: PositiveInt = DEFAULT_FREE_ALGEBRA_CAP_4
    congruence_cap: PositiveInt = DEFAULT_CONGRUENCE_CAP
    square_obstruction_limit: int = DEFAULT_SQUARE_OBSTRUCTION_LIMIT
    num_jobs: PositiveInt = Field(default_factory=_default_num_jobs)
    zero: int = DEFAULT_ZERO_ELEMENT
    include_timing: bool = False

    def with_cap(self, cap: int) -> "ComputationConfig":
        """Return a copy in which every cap is ``cap``."""
        return self.model_copy(
            update={
                "closure_cap": cap,
                "free_algebra_cap_3": cap,
                "free_algebra_cap_4": cap,
                "congruence_cap": cap,
            }
        )

    def free_algebra_cap(self, k: int) -> int:
        """Cap for the free algebra on ``k`` generators."""
        return self.free_algebra_cap_4 if k >= 4 else self.free_algebra_cap_3
