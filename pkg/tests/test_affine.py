import itertools

import numpy as np
import pytest
from conftest import GROUPS, LATTICES, RINGS

from cohere.commutator.exceptions import (
    NotAbelianError,
    NotAffineError,
    TernaryGroupError,
)
from cohere.commutator.models import Partition, TermFamily
from cohere.commutator.models.terms import TermChain, Variable, parse_term
from cohere.commutator.ops.affine import (
    commutator_day,
    coset_groups,
    difference_term,
    difference_term_commutes,
    module_reconstruct,
    ternary_group,
    ternary_witness,
    verify_difference_term,
)
from cohere.commutator.ops.commutator import commutator_delta, commutator_tc
from cohere.commutator.ops.congruence import permutes
from cohere.commutator.ops.lattice import con_all
from cohere.commutator.ops.maltsev import find_day_terms
from cohere.commutator.ops.terms import term_table

WITH_DAY_TERMS = GROUPS + RINGS + LATTICES
AFFINE = ["Z2", "Z4", "V4", "zeroring2", "zeroring4"]
X_MINUS_Y_PLUS_Z = parse_term("+(+(x0,-(x1)),x2)")


@pytest.fixture(scope="module")
def day_chains(corpus):
    return {name: find_day_terms(corpus[name]).chain for name in WITH_DAY_TERMS}


@pytest.mark.parametrize("name", WITH_DAY_TERMS)
def test_three_commutators_agree(corpus, day_chains, name):
    algebra = corpus[name]
    chain = day_chains[name]
    congruences = con_all(algebra).partitions
    for alpha, beta in itertools.product(congruences, repeat=2):
        expected = commutator_tc(algebra, alpha, beta)
        assert commutator_day(algebra, chain, alpha, beta) == expected
        assert (
            commutator_delta(algebra, alpha, beta, congruence_modular=True)
            == expected
        )


def test_commutator_day_needs_day_terms(z4):
    chain = TermChain(TermFamily.Maltsev, (X_MINUS_Y_PLUS_Z,))
    full = Partition.full(4)
    with pytest.raises(ValueError):
        commutator_day(z4, chain, full, full)
    with pytest.raises(ValueError):
        difference_term(z4, chain)


@pytest.mark.parametrize("name", WITH_DAY_TERMS)
def test_difference_term_passes_its_laws(corpus, day_chains, name):
    algebra = corpus[name]
    d = difference_term(algebra, day_chains[name])
    report = verify_difference_term(algebra, d)
    assert report.holds
    assert set(report.per_congruence) == {
        p.to_text() for p in con_all(algebra).partitions
    }


@pytest.mark.parametrize("name", ["Z2", "Z4"])
def test_difference_term_of_cyclic_groups_is_x_minus_y_plus_z(
    corpus, day_chains, name
):
    algebra = corpus[name]
    d = difference_term(algebra, day_chains[name])
    assert np.array_equal(
        term_table(algebra, d, 3), term_table(algebra, X_MINUS_Y_PLUS_Z, 3)
    )


@pytest.mark.parametrize("name", WITH_DAY_TERMS)
def test_abelian_congruences_permute_with_everything(corpus, name):
    algebra = corpus[name]
    congruences = con_all(algebra).partitions
    for alpha in congruences:
        if not commutator_tc(algebra, alpha, alpha).is_discrete:
            continue
        for beta in congruences:
            assert permutes(algebra, alpha, beta)[0]


@pytest.mark.parametrize("name", AFFINE)
def test_module_reconstruct(corpus, name):
    algebra = corpus[name]
    representation = module_reconstruct(algebra)
    n = algebra.size
    plus = np.asarray(representation.plus)
    for op, decomposition in zip(algebra.operations, representation.decompositions):
        assert decomposition.symbol == op.symbol
        assert len(decomposition.coefficients) == op.arity
        table = np.asarray(op.table).reshape((n,) * op.arity)
        for args in itertools.product(range(n), repeat=op.arity):
            value = decomposition.constant
            for coefficient, a in zip(decomposition.coefficients, args):
                value = plus[value, representation.action[coefficient][a]]
            assert value == table[args]
    assert representation.ring[representation.ring_one] == tuple(range(n))
    assert representation.ring[representation.ring_zero] == (0,) * n


@pytest.mark.parametrize(
    "name, ring_size",
    [("Z2", 2), ("Z4", 4), ("V4", 2), ("zeroring2", 2), ("zeroring4", 4)],
)
def test_ring_sizes(corpus, name, ring_size):
    assert module_reconstruct(corpus[name]).ring_size == ring_size


def test_z4_module_structure(z4):
    representation = module_reconstruct(z4)
    assert representation.plus == tuple(
        tuple((a + b) % 4 for b in range(4)) for a in range(4)
    )
    assert representation.neg == (0, 3, 2, 1)
    assert set(representation.ring) == {
        tuple((a * x) % 4 for x in range(4)) for a in range(4)
    }
    add, neg, _ = representation.decompositions
    assert add.coefficients == (representation.ring_one, representation.ring_one)
    assert representation.ring[neg.coefficients[0]] == (0, 3, 2, 1)


def test_zero_ring_multiplication_is_the_zero_map(corpus):
    representation = module_reconstruct(corpus["zeroring4"])
    multiply = representation.decompositions[-1]
    assert multiply.symbol == "*"
    assert multiply.coefficients == (representation.ring_zero,) * 2


def test_module_reconstruct_with_another_zero(z4):
    representation = module_reconstruct(z4, zero=1)
    assert representation.zero == 1
    assert representation.plus[1] == (0, 1, 2, 3)
    assert representation.ring_size == 4


def test_module_reconstruct_errors(corpus, s3):
    with pytest.raises(NotAbelianError):
        module_reconstruct(s3)
    with pytest.raises(NotAffineError):
        module_reconstruct(corpus["set2"])


@pytest.mark.parametrize("name", AFFINE)
def test_ternary_group_on_the_difference_term(corpus, day_chains, name):
    algebra = corpus[name]
    d = difference_term(algebra, day_chains[name])
    group = ternary_group(algebra, term_table(algebra, d, 3))
    assert group.witness.holds
    assert group.zero == 0


def test_ternary_group_errors(z4, s3):
    with pytest.raises(TernaryGroupError):
        ternary_group(z4, [0] * 10)
    with pytest.raises(TernaryGroupError):
        ternary_group(z4, term_table(z4, X_MINUS_Y_PLUS_Z, 3), zero=4)
    with pytest.raises(TernaryGroupError, match=r"t\(0,0,1\) = 0, expected 1"):
        ternary_group(z4, term_table(z4, Variable(0), 3))
    # x y^-1 z is Mal'tsev on S3 but does not commute with itself
    with pytest.raises(TernaryGroupError, match="does not commute"):
        ternary_group(s3, term_table(s3, parse_term("*(*(x0,inv(x1)),x2)"), 3))


def test_ternary_witness_on_positions():
    witness = ternary_witness((5, 7), [0, 1, 1, 0, 1, 0, 0, 1])
    assert witness.elements == (5, 7)
    assert witness.maltsev
    assert witness.self_commuting


def test_coset_groups_of_abelian_congruences(z4, s3, day_chains):
    halves = Partition.from_blocks(4, [[0, 2], [1, 3]])
    report = coset_groups(z4, halves, X_MINUS_Y_PLUS_Z)
    assert report.holds
    assert [w.elements for w in report.cosets] == [(0, 2), (1, 3)]

    d = difference_term(s3, day_chains["S3"])
    alternating = Partition.from_blocks(6, [[0, 3, 4], [1, 2, 5]])
    assert coset_groups(s3, alternating, d).holds
    with pytest.raises(NotAbelianError):
        coset_groups(s3, Partition.full(6), d)


def test_difference_term_commutes_exactly_for_vanishing_commutators(
    corpus, day_chains
):
    for name in ("Z4", "S3", "lattice2"):
        algebra = corpus[name]
        d = difference_term(algebra, day_chains[name])
        congruences = con_all(algebra).partitions
        for alpha, beta in itertools.product(congruences, repeat=2):
            if not beta.leq(alpha):
                continue
            report = difference_term_commutes(algebra, d, alpha, beta)
            vanishes = commutator_tc(algebra, alpha, beta).is_discrete
            assert report.holds == vanishes, (name, alpha.to_text(), beta.to_text())
            if vanishes:
                assert report.preserves_pairs


def test_difference_term_commutes_needs_beta_below_alpha(s3):
    with pytest.raises(ValueError):
        difference_term_commutes(
            s3, X_MINUS_Y_PLUS_Z, Partition.discrete(6), Partition.full(6)
        )
