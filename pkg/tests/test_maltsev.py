from collections import deque

import numpy as np
import pytest
from conftest import GROUPS, LATTICES, RINGS

from cohere.commutator.models import ComputationConfig, SearchOutcome, TermFamily
from cohere.commutator.models.terms import TermChain, Variable, parse_term
from cohere.commutator.ops.maltsev import (
    chain_violations,
    day_terms_from_gumm,
    day_terms_from_maltsev,
    find_day_terms,
    find_gumm_terms,
    find_jonsson_terms,
    find_maltsev_polynomial,
    find_maltsev_term,
    find_terms,
    free_algebra,
    gumm_terms_from_jonsson,
    gumm_terms_from_maltsev,
    maltsev_from_day,
    verify_chain,
)

X, Y, Z, U = (Variable(i) for i in range(4))


@pytest.mark.parametrize("name", ["Z2", "Z4", "S3", "zeroring2"])
def test_maltsev_term_found(corpus, name):
    algebra = corpus[name]
    result = find_maltsev_term(algebra)
    assert result.outcome == SearchOutcome.Found
    assert verify_chain(algebra, result.chain)
    assert result.chain.length == 1


@pytest.mark.parametrize("name", ["set2", "semilattice2", "lattice2", "chain3"])
def test_maltsev_term_absent(corpus, name):
    result = find_maltsev_term(corpus[name])
    assert result.outcome == SearchOutcome.NoTerms
    assert result.chain is None
    assert result.reason


def test_chain3_fails_by_non_permuting_congruences(corpus):
    result = find_maltsev_term(corpus["chain3"])
    assert "do not permute" in result.reason
    assert result.elements_generated == 0


@pytest.mark.parametrize("name", LATTICES)
def test_jonsson_terms_found_for_lattices(corpus, name):
    algebra = corpus[name]
    result = find_jonsson_terms(algebra)
    assert result.found
    assert chain_violations(algebra, result.chain) == []
    assert result.chain.length >= 2


def test_lattice2_jonsson_chain_is_as_short_as_the_majority_term(corpus):
    assert find_jonsson_terms(corpus["lattice2"]).chain.length == 2


def shortest_jonsson_length(algebra) -> int:
    """Breadth-first distance from x to z in the closed free algebra on 3 generators."""
    free = free_algebra(algebra, 3)
    assert free.complete
    n = algebra.size
    ar = np.arange(n)
    cubes = free.tables.reshape(-1, n, n, n)
    nodes = [i for i, t in enumerate(cubes) if np.all(t[ar, :, ar] == ar[:, None])]
    keys = [
        {i: cubes[i][ar, ar, :].tobytes() for i in nodes},
        {i: cubes[i][:, ar, ar].tobytes() for i in nodes},
    ]
    start, goal = free.projection(0), free.projection(2)
    distance = {(start, 0): 0}
    queue = deque([(start, 0)])
    while queue:
        element, parity = queue.popleft()
        if element == goal:
            return distance[(element, parity)]
        for other in nodes:
            state = (other, 1 - parity)
            if state in distance or keys[parity][other] != keys[parity][element]:
                continue
            distance[state] = distance[(element, parity)] + 1
            queue.append(state)
    raise AssertionError("no Jónsson chain in the free algebra")


@pytest.mark.parametrize("name", ["lattice2", "N5lat", "M3lat"])
def test_jonsson_chain_is_shortest_in_the_free_algebra(corpus, name):
    algebra = corpus[name]
    result = find_jonsson_terms(algebra)
    assert chain_violations(algebra, result.chain) == []
    assert result.chain.length == shortest_jonsson_length(algebra)


def test_z2_has_no_jonsson_terms(corpus):
    result = find_jonsson_terms(corpus["Z2"])
    assert result.outcome == SearchOutcome.NoTerms
    assert result.elements_generated == 8


@pytest.mark.parametrize("name", GROUPS + RINGS + LATTICES)
def test_day_and_gumm_terms_found(corpus, name):
    algebra = corpus[name]
    for search in (find_day_terms, find_gumm_terms):
        result = search(algebra)
        assert result.found, result.reason
        assert chain_violations(algebra, result.chain) == []


@pytest.mark.parametrize("name", ["set2", "semilattice2"])
def test_day_and_gumm_terms_absent(corpus, name):
    algebra = corpus[name]
    assert find_gumm_terms(algebra).outcome == SearchOutcome.NoTerms
    day = find_day_terms(algebra)
    assert day.outcome == SearchOutcome.NoTerms
    assert "no Gumm terms" in day.reason


def test_day_terms_of_lattices_come_from_gumm_terms(corpus):
    result = find_day_terms(corpus["lattice2"])
    assert result.reason.startswith("built from Gumm terms")
    assert result.notes


def test_find_terms_dispatches_on_the_family(corpus):
    z4 = corpus["Z4"]
    for family in TermFamily:
        assert find_terms(z4, family).family == family
    assert find_terms(z4, TermFamily.Jonsson).outcome == SearchOutcome.NoTerms


def test_maltsev_from_day_needs_length_two(z4):
    p = find_maltsev_term(z4).chain.terms[0]
    day = day_terms_from_maltsev(p)
    assert verify_chain(z4, day)
    recovered = TermChain(TermFamily.Maltsev, (maltsev_from_day(day),))
    assert verify_chain(z4, recovered)

    with pytest.raises(ValueError):
        maltsev_from_day(TermChain(TermFamily.Day, (X, X, X, U)))
    with pytest.raises(ValueError):
        maltsev_from_day(TermChain(TermFamily.Jonsson, (X, Y, Z)))


def test_gumm_and_day_terms_from_jonsson_terms(corpus):
    lattice = corpus["lattice2"]
    jonsson = find_jonsson_terms(lattice).chain
    gumm = gumm_terms_from_jonsson(jonsson)
    assert gumm.p == X
    assert verify_chain(lattice, gumm)
    day = day_terms_from_gumm(gumm)
    assert day.terms[-1] == U
    assert verify_chain(lattice, day)

    with pytest.raises(ValueError):
        gumm_terms_from_jonsson(TermChain(TermFamily.Day, (X, U)))
    with pytest.raises(ValueError):
        day_terms_from_gumm(jonsson)


def test_chain_violations_name_the_broken_identity(corpus):
    z2 = corpus["Z2"]
    assert chain_violations(z2, TermChain(TermFamily.Maltsev, (X,))) == [
        "p(x,x,z) = z"
    ]
    assert chain_violations(z2, TermChain(TermFamily.Maltsev, ())) == [
        "a Mal'tsev chain holds one term, got 0"
    ]
    lattice = corpus["lattice2"]
    assert chain_violations(lattice, TermChain(TermFamily.Jonsson, (X, Z))) == [
        "d_0(x,x,z) = d_1(x,x,z)"
    ]
    assert "a Gumm chain needs its term p" in chain_violations(
        lattice, TermChain(TermFamily.Gumm, (Z,))
    )


def test_z4_maltsev_term_as_text(z4):
    chain = TermChain(TermFamily.Maltsev, (parse_term("+(+(x0,-(x1)),x2)"),))
    assert verify_chain(z4, chain)
    assert chain.to_text() == ["+(+(x0,-(x1)),x2)"]


def test_free_algebra_sizes(corpus):
    assert len(free_algebra(corpus["Z2"], 3)) == 8
    assert len(free_algebra(corpus["set2"], 3)) == 3
    assert len(free_algebra(corpus["semilattice2"], 3)) == 7
    free = free_algebra(corpus["lattice2"], 3)
    assert len(free) == 18
    assert free.complete
    assert free.term(free.projection(1)) == Y
    with pytest.raises(ValueError):
        free_algebra(corpus["Z2"], 0)


def test_capped_search_falls_back_to_the_square(corpus):
    result = find_jonsson_terms(corpus["Z2"], cap=4)
    assert result.outcome == SearchOutcome.NoTerms
    assert "not distributive" in result.reason


def test_capped_search_is_undecided_without_an_obstruction(s3):
    result = find_maltsev_term(s3, cap=3)
    assert result.outcome == SearchOutcome.Undecided
    assert "cap of 3" in result.reason
    # the square is too large to inspect
    config = ComputationConfig(square_obstruction_limit=0)
    assert find_maltsev_term(s3, cap=3, config=config).outcome == (
        SearchOutcome.Undecided
    )


def test_maltsev_polynomial(corpus):
    z4 = corpus["Z4"]
    assert find_maltsev_polynomial(z4).found
    assert find_maltsev_polynomial(corpus["set2"]).outcome == SearchOutcome.NoTerms


def test_gumm_terms_from_a_maltsev_term(z4):
    p = parse_term("+(+(x0,-(x1)),x2)")
    chain = gumm_terms_from_maltsev(p)
    assert chain.family is TermFamily.Gumm
    assert verify_chain(z4, chain)
