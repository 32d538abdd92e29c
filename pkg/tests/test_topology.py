import pytest

from toposites import fixtures
from toposites.sieve import all_sieves, empty_sieve, generate, maximal
from toposites.topology import (
    TopologyError,
    closure,
    is_closed,
    is_dense_in,
    j_ideals,
    saturate,
    trivial_topology,
    validate_topology,
    zero_ideal,
)


def ideals(C, J):
    return [set(I.members) for I in j_ideals(C, J)]


def test_trivial_on_pair_valid():
    C = fixtures.pair()
    J = validate_topology(C, {"a": [["id_a"]], "b": [["id_b", "f", "g"]]})
    assert J == trivial_topology(C)


def test_jb_valid(arrow, Jb):
    J = validate_topology(arrow, {"a": [["id_a"]], "b": [["id_b", "u"], ["u"]]})
    assert J == Jb
    assert J.size() == 3


def test_maximality_violation(arrow):
    with pytest.raises(TopologyError) as exc:
        validate_topology(arrow, {"a": [["id_a"]], "b": [["u"]]})
    assert ("b",) in [v.witness for v in exc.value.violations if v.law == "maximality"]


def test_stability_violation():
    # {f} covering b must pull back along g to the empty sieve covering a
    C = fixtures.pair()
    with pytest.raises(TopologyError) as exc:
        validate_topology(C, {"a": [["id_a"]], "b": [["id_b", "f", "g"], ["f"]]})
    assert any(v.law == "stability" for v in exc.value.violations)


def test_unknown_object_rejected(arrow):
    with pytest.raises(TopologyError):
        validate_topology(arrow, {"a": [["id_a"]], "b": [["id_b", "u"]], "z": []})


def test_saturate_one():
    C = fixtures.one()
    assert saturate(C, {}).size() == 1
    J = saturate(C, {"*": [[]]})
    assert J.covers_empty("*") and J.size() == 2


def test_saturate_arrow_gives_jb(arrow, Jb):
    assert set(Jb.covers["b"]) == {maximal(arrow, "b").bits, generate(arrow, "b", ["u"]).bits}
    assert Jb.covers["a"] == {maximal(arrow, "a").bits}


@pytest.mark.parametrize("make", list(fixtures.NAMED.values()))
def test_trivial_closure_is_identity(make):
    C = make()
    J = trivial_topology(C)
    for c in C.objects:
        for S in all_sieves(C, c):
            assert closure(J, S) == S


def test_closure_jb(arrow, Jb):
    assert closure(Jb, generate(arrow, "b", ["u"])) == maximal(arrow, "b")
    for c in arrow.objects:
        assert is_closed(Jb, maximal(arrow, c))


def test_density(arrow, Jb):
    U, M = generate(arrow, "b", ["u"]), maximal(arrow, "b")
    assert is_dense_in(Jb, U, M)
    assert is_dense_in(Jb, M, M)
    J = trivial_topology(arrow)
    assert not is_dense_in(J, U, M)
    assert is_dense_in(J, U, U)


def test_density_requires_subsieve(arrow):
    J = trivial_topology(arrow)
    with pytest.raises(ValueError):
        is_dense_in(J, maximal(arrow, "b"), generate(arrow, "b", ["u"]))


def test_j_ideals(arrow, Jb, one_degenerate):
    assert ideals(arrow, trivial_topology(arrow)) == [set(), {"a"}, {"a", "b"}]
    assert ideals(arrow, Jb) == [set(), {"a", "b"}]
    C, J = one_degenerate
    assert ideals(C, J) == [{"*"}]
    assert zero_ideal(J).members == {"*"}
    assert zero_ideal(Jb).members == frozenset()


def test_to_dict_round_trip(arrow, Jb):
    raw = Jb.to_dict()["covers"]
    assert validate_topology(arrow, raw) == Jb
    assert raw["b"] == [["u"], ["id_b", "u"]]


def test_empty_sieve_never_covers_trivially(arrow):
    J = trivial_topology(arrow)
    assert not J.is_covering(empty_sieve(arrow, "a"))
