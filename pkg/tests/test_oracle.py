import pytest

from toposites import fixtures
from toposites.oracle import (
    KINDS,
    ObjectProperty,
    oracle_invariant,
    oracle_object_property,
    recheck_oracle,
)
from toposites.sieve import generate, maximal
from toposites.topology import trivial_topology


def site(make):
    C = make()
    return C, trivial_topology(C)


def test_subterminal():
    C, J = site(fixtures.arrow)
    assert oracle_object_property(J, maximal(C, "b"), "subterminal")
    assert oracle_object_property(J, "b", "subterminal")
    C, J = site(fixtures.pair)
    assert not oracle_object_property(J, maximal(C, "b"), "subterminal")


def test_atom():
    C, J = site(fixtures.arrow)
    assert oracle_object_property(J, generate(C, "b", ["u"]), "atom")
    assert not oracle_object_property(J, "b", "atom")
    C, J = site(fixtures.z2)
    assert oracle_object_property(J, "*", "atom")


def test_indecomposable_span():
    C, J = site(fixtures.span)
    assert not oracle_object_property(J, generate(C, "t", ["p", "q"]), "indecomposable")
    assert oracle_object_property(J, "t", "indecomposable")


def test_representables_irreducible():
    for make in fixtures.NAMED.values():
        C, J = site(make)
        for c in C.objects:
            assert oracle_object_property(J, c, "irreducible")


def test_well_supported_property():
    C, J = site(fixtures.arrow)
    # y(b) is inhabited everywhere, y(a) is empty at b
    assert oracle_object_property(J, "b", "well-supported")
    assert not oracle_object_property(J, "a", "well-supported")
    C, J = site(fixtures.z2)
    assert oracle_object_property(J, "*", "well-supported")


def test_subject_must_be_closed(arrow, Jb):
    with pytest.raises(ValueError):
        oracle_object_property(Jb, generate(arrow, "b", ["u"]), "atom")


def test_unknown_kind():
    C, J = site(fixtures.one)
    with pytest.raises(ValueError):
        oracle_object_property(J, "*", "compact")
    with pytest.raises(ValueError):
        ObjectProperty("compact", maximal(C, "*"))
    assert len(KINDS) == 5


def test_invariants():
    C, J = site(fixtures.arrow)
    assert oracle_invariant(C, J, "localic").value
    C, J = site(fixtures.pair)
    v = oracle_invariant(C, J, "localic")
    assert not v.value and v.witness["object"] == "b"
    assert sorted(map(sorted, v.witness["subobjects"])) == [[], ["f"], ["g"]]
    C, J = site(fixtures.z2)
    assert oracle_invariant(C, J, "atomic").value


@pytest.mark.parametrize("name", ["localic", "atomic", "locally_connected",
                                  "presheaf_type", "well_supported"])
def test_oracle_witnesses_recheck(name, arrow, Jb):
    for C, J in [site(fixtures.pair), site(fixtures.span), site(fixtures.d2), (arrow, Jb)]:
        assert recheck_oracle(C, J, name, oracle_invariant(C, J, name))


def test_oracle_unknown_invariant():
    C, J = site(fixtures.one)
    with pytest.raises(ValueError):
        oracle_invariant(C, J, "coherent")
