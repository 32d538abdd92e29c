import pytest

from toposites import fixtures
from toposites.criteria import (
    CRITERIA,
    CriterionError,
    has_separating_well_supported,
    is_atom_sieve,
    is_atomic,
    is_indecomposable_sieve,
    is_irreducible_principal,
    is_l_closed,
    is_localic,
    is_locally_connected,
    is_presheaf_type,
    localic_geometric_shortcut,
    overline,
    recheck,
)
from toposites.sieve import all_sieves, empty_sieve, generate, maximal
from toposites.topology import saturate, trivial_topology
from toposites.workbench.enumerate import enumerate_categories, enumerate_topologies


def site(make):
    C = make()
    return C, trivial_topology(C)


@pytest.mark.parametrize("make, expected", [
    (fixtures.arrow, True),
    (fixtures.pair, False),
    (fixtures.z2, False),
    (fixtures.one, True),
    (fixtures.d2, True),
    (fixtures.span, True),
])
def test_localic_trivial(make, expected):
    C, J = site(make)
    v = is_localic(C, J)
    assert v.value is expected
    assert recheck("localic", C, J, v)


@pytest.mark.parametrize("make, expected", [
    (fixtures.one, True),
    (fixtures.z2, False),
    (fixtures.arrow, True),
])
def test_localic_geometric_shortcut(make, expected):
    assert localic_geometric_shortcut(make(), {}).value is expected


def test_localic_geometric_shortcut_needs_coverage():
    with pytest.raises(CriterionError):
        localic_geometric_shortcut(fixtures.one(), None)


def test_atom_sieves_on_arrow():
    C, J = site(fixtures.arrow)
    assert is_atom_sieve(generate(C, "b", ["u"]), J)
    assert not is_atom_sieve(maximal(C, "b"), J)
    assert not is_atom_sieve(empty_sieve(C, "b"), J)


def test_atom_sieve_z2():
    C, J = site(fixtures.z2)
    assert is_atom_sieve(maximal(C, "*"), J)


@pytest.mark.parametrize("make, expected", [
    (fixtures.z2, True),
    (fixtures.arrow, False),
    (fixtures.one, True),
])
def test_atomic_trivial(make, expected):
    C, J = site(make)
    assert is_atomic(C, J).value is expected
    assert is_atomic(C, J, method="full").value is expected


def test_indecomposable_sieves():
    C, J = site(fixtures.span)
    assert not is_indecomposable_sieve(generate(C, "t", ["p", "q"]), J)
    for c in C.objects:
        assert is_indecomposable_sieve(maximal(C, c), J)
        assert is_indecomposable_sieve(empty_sieve(C, c), J)


def test_locally_connected_examples(arrow, Jb):
    C, J = site(fixtures.pair)
    assert is_locally_connected(C, J).value
    assert is_locally_connected(arrow, Jb).value
    C, J = site(fixtures.span)
    v = is_locally_connected(C, J)
    assert v.value and recheck("locally_connected", C, J, v)


def test_overline(arrow, Jb):
    C, J = site(fixtures.pair)
    for c in C.objects:
        for S in all_sieves(C, c):
            assert overline(S, J) == S
            assert is_l_closed(S, J)
    assert overline(generate(arrow, "b", ["u"]), Jb) == maximal(arrow, "b")
    for c in arrow.objects:
        assert overline(maximal(arrow, c), Jb) == maximal(arrow, c)


def test_irreducible_principal(one_degenerate):
    C, J = site(fixtures.arrow)
    assert is_irreducible_principal("id_b", J)
    assert is_irreducible_principal("u", J)
    C, J = one_degenerate
    assert not is_irreducible_principal("id_*", J)


@pytest.mark.parametrize("make", list(fixtures.NAMED.values()))
def test_presheaf_type_trivial(make):
    C, J = site(make)
    v = is_presheaf_type(C, J)
    assert v.value and recheck("presheaf_type", C, J, v)


def test_presheaf_type_jb(arrow, Jb, one_degenerate):
    v = is_presheaf_type(arrow, Jb)
    assert v.value
    assert recheck("presheaf_type", arrow, Jb, v)
    # (id_a, u) is an admissible pair at b as well
    assert is_irreducible_principal("id_a", Jb)
    C, J = one_degenerate
    assert is_presheaf_type(C, J).value


@pytest.mark.parametrize("make, expected", [
    (fixtures.z2, True),
    (fixtures.d2, False),
    (fixtures.arrow, False),
    (fixtures.one, True),
    (fixtures.pair, False),
])
def test_well_supported_trivial(make, expected):
    C, J = site(make)
    v = has_separating_well_supported(C, J)
    assert v.value is expected
    assert recheck("well_supported", C, J, v)


def test_well_supported_jb(arrow, Jb):
    assert has_separating_well_supported(arrow, Jb).value


def test_everything_holds_on_degenerate_site(one_degenerate):
    C, J = one_degenerate
    for name, crit in CRITERIA.items():
        v = crit(C, J)
        assert v.value, name
        assert recheck(name, C, J, v)


def test_witnesses_recheck_small_corpus():
    for _, C in enumerate_categories(2, 4, include_named=True):
        for J in enumerate_topologies(C):
            for name, crit in CRITERIA.items():
                assert recheck(name, C, J, crit(C, J)), (C, J.to_dict(), name)


def test_geometric_well_supported_shortcut():
    C = fixtures.arrow()
    J = saturate(C, {"b": [["u"]]})
    v = has_separating_well_supported(C, J, geometric=True)
    assert v.value
