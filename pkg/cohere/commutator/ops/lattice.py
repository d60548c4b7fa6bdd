# Python imports
import logging
from collections.abc import Iterable
from typing import Optional

# 3rd party imports
import numpy as np

# Local imports
from cohere.commutator.constants import DEFAULT_CONGRUENCE_CAP
from cohere.commutator.exceptions import CapExceededError
from cohere.commutator.models.algebra import FiniteAlgebra
from cohere.commutator.models.lattice import CongruenceLattice, LatticeProperties
from cohere.commutator.models.partitions import Partition
from cohere.commutator.ops.congruence import cg, join

logger = logging.getLogger(__name__)


def principal_congruences(algebra: FiniteAlgebra) -> list[Partition]:
    """The distinct principal congruences Cg(a, b), ``a < b``, in order of discovery."""
    found: dict[Partition, None] = {}
    for a in range(algebra.size):
        for b in range(a + 1, algebra.size):
            found.setdefault(cg(algebra, [(a, b)]), None)
    return list(found)


def build_lattice(
    name: str, size: int, partitions: Iterable[Partition]
) -> CongruenceLattice:
    """
    Sort a family of partitions closed under meet and join and tabulate its order.

    :param name: the name of the algebra the partitions belong to.
    :param size: the size of the underlying set.
    :param partitions: the congruences, in any order and possibly repeated.
    """
    ordered = tuple(sorted(set(partitions), key=Partition.sort_key))
    m = len(ordered)
    ids = np.array([p.ids for p in ordered], dtype=np.intp).reshape(m, size)
    leq = np.zeros((m, m), dtype=bool)
    for i in range(m):
        leq[i] = np.all(ids[:, ids[i]] == ids, axis=1)

    meet_table = np.zeros((m, m), dtype=np.intp)
    join_table = np.zeros((m, m), dtype=np.intp)
    for i in range(m):
        lower = leq[:, i][None, :] & leq.T
        upper = leq[i][None, :] & leq
        # finest first: the join is the first upper bound, the meet the last lower
        join_table[i] = np.argmax(upper, axis=1)
        meet_table[i] = m - 1 - np.argmax(lower[:, ::-1], axis=1)
    return CongruenceLattice(
        algebra_name=name,
        size=size,
        partitions=ordered,
        leq=leq,
        meet=meet_table,
        join=join_table,
    )


def con_all(
    algebra: FiniteAlgebra, cap: int = DEFAULT_CONGRUENCE_CAP
) -> CongruenceLattice:
    """
    Compute every congruence of A.

    Principal congruences are joined with the congruences found so far until nothing
    new appears; every congruence is a join of principal ones.

    :raises CapExceededError: if more than ``cap`` congruences exist.
    """
    principals = principal_congruences(algebra)
    found: dict[Partition, None] = {Partition.discrete(algebra.size): None}
    frontier: list[Partition] = []
    for p in principals:
        if p not in found:
            found[p] = None
            frontier.append(p)
    while frontier:
        discovered: list[Partition] = []
        for current in frontier:
            for p in principals:
                joined = join(current, p)
                if joined not in found:
                    found[joined] = None
                    discovered.append(joined)
                    if len(found) > cap:
                        logger.warning(
                            f"Con({algebra.name}) has more than {cap} congruences"
                        )
                        raise CapExceededError(
                            f"Con({algebra.name}) has more than {cap} congruences", cap
                        )
        frontier = discovered
    lattice = build_lattice(algebra.name, algebra.size, found)
    logger.info(f"Con({algebra.name}) has {len(lattice)} congruences")
    return lattice


def _first_violation(
    lhs: np.ndarray, rhs: np.ndarray, mask: np.ndarray
) -> Optional[tuple[int, int]]:
    bad = np.argwhere(mask & (lhs != rhs))
    if len(bad) == 0:
        return None
    return int(bad[0][0]), int(bad[0][1])


def lattice_properties(lattice: CongruenceLattice) -> LatticeProperties:
    """
    Decide modularity and distributivity and look for an M3 (0,1)-sublattice.

    All triples are inspected, so every witness is the first in index order.
    """
    m = len(lattice)
    meet_t, join_t, leq = lattice.meet, lattice.join, lattice.leq
    everything = np.ones((m, m), dtype=bool)

    pentagon: Optional[tuple[int, int, int]] = None
    nondistributive: Optional[tuple[int, int, int]] = None
    for theta in range(m):
        if pentagon is None:
            # (theta v phi) ^ psi  vs  theta v (phi ^ psi), for theta <= psi
            lhs = meet_t[join_t[theta][:, None], np.arange(m)[None, :]]
            rhs = join_t[theta][meet_t]
            mask = np.broadcast_to(leq[theta][None, :], (m, m))
            hit = _first_violation(lhs, rhs, mask)
            if hit is not None:
                pentagon = (theta, hit[0], hit[1])
        if nondistributive is None:
            # theta ^ (phi v psi)  vs  (theta ^ phi) v (theta ^ psi)
            lhs = meet_t[theta][join_t]
            rhs = join_t[meet_t[theta][:, None], meet_t[theta][None, :]]
            hit = _first_violation(lhs, rhs, everything)
            if hit is not None:
                nondistributive = (theta, hit[0], hit[1])
        if pentagon is not None and nondistributive is not None:
            break

    return LatticeProperties(
        modular=pentagon is None,
        distributive=nondistributive is None,
        m3_01=find_m3_01(lattice),
        pentagon=pentagon,
        nondistributive=nondistributive,
    )


def find_m3_01(lattice: CongruenceLattice) -> Optional[tuple[int, int, int]]:
    """Return three pairwise complementary proper congruences, if there are any."""
    bottom, top = lattice.bottom, lattice.top
    complementary = (lattice.meet == bottom) & (lattice.join == top)
    middle = [i for i in range(len(lattice)) if i not in (bottom, top)]
    for x, i in enumerate(middle):
        for y, j in enumerate(middle[x + 1 :], start=x + 1):
            if not complementary[i, j]:
                continue
            for k in middle[y + 1 :]:
                if complementary[i, k] and complementary[j, k]:
                    return i, j, k
    return None
