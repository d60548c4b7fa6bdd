import re

import pytest
from conftest import GROUPS, LATTICES, brute_force_congruences

from cohere.commutator.exceptions import CapExceededError
from cohere.commutator.formats import emit_dot
from cohere.commutator.models import Partition
from cohere.commutator.ops.congruence import join, meet
from cohere.commutator.ops.lattice import (
    con_all,
    find_m3_01,
    lattice_properties,
    principal_congruences,
)


def test_con_all_agrees_with_brute_force(corpus):
    for name, algebra in corpus.items():
        if algebra.size > 6:
            continue
        lattice = con_all(algebra)
        assert set(lattice.partitions) == brute_force_congruences(algebra), name


def test_lattice_is_sorted_finest_first(z4):
    lattice = con_all(z4)
    assert len(lattice) == 3
    assert lattice[lattice.bottom].is_discrete
    assert lattice[lattice.top].is_full
    assert lattice.bottom == 0
    assert lattice.top == 2
    assert lattice.covers() == [(0, 1), (1, 2)]
    assert Partition.from_blocks(4, [[0, 2], [1, 3]]) in lattice


def test_lattice_tables_match_partition_operations(corpus):
    lattice = con_all(corpus["V4"])
    for i, p in enumerate(lattice.partitions):
        for j, q in enumerate(lattice.partitions):
            assert lattice[lattice.meet[i, j]] == meet(p, q)
            assert lattice[lattice.join[i, j]] == join(p, q)
            assert bool(lattice.leq[i, j]) == p.leq(q)


def test_principal_congruences_of_z4(z4):
    assert principal_congruences(z4) == [
        Partition.full(4),
        Partition.from_blocks(4, [[0, 2], [1, 3]]),
    ]


def test_con_all_respects_the_cap(corpus):
    with pytest.raises(CapExceededError) as e:
        con_all(corpus["set4"], cap=5)
    assert e.value.cap == 5


@pytest.mark.parametrize("name", LATTICES)
def test_lattices_have_distributive_congruence_lattices(corpus, name):
    properties = lattice_properties(con_all(corpus[name]))
    assert properties.distributive
    assert properties.modular
    assert properties.nondistributive is None


@pytest.mark.parametrize("name", GROUPS)
def test_groups_have_modular_congruence_lattices(corpus, name):
    properties = lattice_properties(con_all(corpus[name]))
    assert properties.modular
    assert properties.pentagon is None


def test_klein_group_has_m3(corpus):
    lattice = con_all(corpus["V4"])
    properties = lattice_properties(lattice)
    assert properties.modular
    assert not properties.distributive
    assert properties.has_m3
    atoms = {lattice[i] for i in properties.m3_01}
    assert all(p.num_blocks == 2 for p in atoms)
    assert len(atoms) == 3


def test_cyclic_and_symmetric_groups_are_distributive(corpus):
    for name in ("Z4", "S3"):
        properties = lattice_properties(con_all(corpus[name]))
        assert properties.distributive
        assert not properties.has_m3


def test_bare_set_of_four_is_not_modular(corpus):
    lattice = con_all(corpus["set4"])
    assert len(lattice) == 15
    properties = lattice_properties(lattice)
    assert not properties.modular
    assert not properties.distributive
    assert find_m3_01(lattice) is not None

    theta, phi, psi = (lattice[i] for i in properties.pentagon)
    assert theta.leq(psi)
    assert meet(join(theta, phi), psi) != join(theta, meet(phi, psi))


@pytest.mark.parametrize("name, nodes, edges", [("Z4", 3, 2), ("V4", 5, 6)])
def test_emit_dot_draws_the_hasse_diagram(corpus, name, nodes, edges):
    source = emit_dot(con_all(corpus[name]))
    assert len(re.findall(r"^\s*c\d+ \[label=", source, flags=re.MULTILINE)) == nodes
    assert source.count("->") == edges
    assert "0,1,2,3" in source
