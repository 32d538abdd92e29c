import pytest

from toposites import fixtures
from toposites.fincat import Presheaf, representable
from toposites.sheaf import (
    a_J_of_sieve,
    ell,
    empty_presheaf,
    is_sheaf,
    is_subcanonical,
    is_zero_sieve,
    is_zero_sieve_direct,
    plus,
    plus_via_minimal_cover,
    presheaves_isomorphic,
    sheaf_failure,
    sheafify,
    sieve_on_sheaf_is_epimorphic,
    sieve_presheaf,
    subobjects_of_ell,
    subsheaves,
    unit_is_iso,
)
from toposites.sieve import all_sieves, empty_sieve, generate, maximal
from toposites.topology import closed_sieves, trivial_topology
from toposites.workbench.enumerate import enumerate_categories, enumerate_topologies


def terminal(C):
    return Presheaf(C, {c: (0,) for c in C.objects}, {(f, 0): 0 for f in C.arrows})


def small_sites():
    for _, C in enumerate_categories(2, 4, include_named=True):
        for J in enumerate_topologies(C):
            yield C, J


def test_representable_b_is_jb_sheaf(arrow, Jb):
    assert is_sheaf(representable(arrow, "b"), Jb)


def test_representable_a_fails_at_u(arrow, Jb):
    c, S = sheaf_failure(representable(arrow, "a"), Jb)
    assert c == "b" and S == generate(arrow, "b", ["u"])
    assert not is_subcanonical(Jb)


@pytest.mark.parametrize("make", list(fixtures.NAMED.values()))
def test_everything_is_a_trivial_sheaf(make):
    C = make()
    J = trivial_topology(C)
    for c in C.objects:
        assert is_sheaf(representable(C, c), J)
        for S in all_sieves(C, c):
            assert is_sheaf(sieve_presheaf(S), J)
    assert is_subcanonical(J)


def test_plus_of_sheaf_is_iso(arrow, Jb):
    P = representable(arrow, "b")
    stage = plus(P, Jb)
    assert stage.unit.is_bijective()
    assert presheaves_isomorphic(stage.result, P)


def test_plus_of_ya_at_b(arrow, Jb):
    stage = plus(representable(arrow, "a"), Jb)
    assert len(stage.result.value["b"]) == 1


def test_plus_on_degenerate_site(one_degenerate):
    C, J = one_degenerate
    for P in (terminal(C), representable(C, "*"), empty_presheaf(C)):
        assert len(plus(P, J).result.value["*"]) == 1


def test_ell_on_jb_is_terminal(arrow, Jb):
    for c in arrow.objects:
        assert presheaves_isomorphic(ell(Jb, c).underlying, terminal(arrow))


@pytest.mark.parametrize("make", list(fixtures.NAMED.values()))
def test_ell_is_yoneda_when_subcanonical(make):
    C = make()
    J = trivial_topology(C)
    for c in C.objects:
        assert presheaves_isomorphic(ell(J, c).underlying, representable(C, c))


def test_a_j_of_maximal_is_ell(arrow, Jb):
    for c in arrow.objects:
        F, mono = a_J_of_sieve(maximal(arrow, c), Jb)
        assert presheaves_isomorphic(F.underlying, ell(Jb, c).underlying)
        assert mono.is_injective() and mono.is_natural()


def test_subobjects_of_ell_pair():
    C = fixtures.pair()
    J = trivial_topology(C)
    got = {frozenset(S.members) for S in subobjects_of_ell(J, "b")}
    assert got == {frozenset(), frozenset("f"), frozenset("g"), frozenset("fg"),
                   frozenset({"f", "g", "id_b"})}
    assert len(subsheaves(ell(J, "b"), J)) == 5


def test_subobjects_of_ell_a_under_jb(arrow, Jb):
    subs = subobjects_of_ell(Jb, "a")
    assert subs == [empty_sieve(arrow, "a"), maximal(arrow, "a")]
    assert is_zero_sieve_direct(subs[0], Jb)


def test_zero_sieve_examples(arrow, one_degenerate):
    C, J = one_degenerate
    assert is_zero_sieve(maximal(C, "*"), J)
    T = trivial_topology(arrow)
    assert not is_zero_sieve(generate(arrow, "b", ["u"]), T)
    assert is_zero_sieve(empty_sieve(arrow, "b"), T)


def test_epimorphic_families(arrow, Jb):
    M = maximal(arrow, "b")
    assert sieve_on_sheaf_is_epimorphic(["u"], M, Jb)
    assert not sieve_on_sheaf_is_epimorphic(["u"], M, trivial_topology(arrow))
    assert sieve_on_sheaf_is_epimorphic(M.members, M, trivial_topology(arrow))


def test_epimorphic_requires_closed(arrow, Jb):
    with pytest.raises(ValueError):
        sieve_on_sheaf_is_epimorphic(["u"], generate(arrow, "b", ["u"]), Jb)


def test_plus_agrees_with_minimal_cover_route():
    # union-find colimit vs matching families over the least covering sieve
    for C, J in small_sites():
        for c in C.objects:
            for S in all_sieves(C, c):
                P = sieve_presheaf(S)
                assert presheaves_isomorphic(plus(P, J).result, plus_via_minimal_cover(P, J))


def test_sheafify_laws_small_corpus():
    for C, J in small_sites():
        for c in C.objects:
            for S in all_sieves(C, c):
                P = sieve_presheaf(S)
                F = sheafify(P, J)
                assert is_sheaf(F.underlying, J)
                assert unit_is_iso(F) == is_sheaf(P, J)
                G = sheafify(F.underlying, J)
                assert presheaves_isomorphic(F.underlying, G.underlying)
                assert is_zero_sieve(S, J) == is_zero_sieve_direct(S, J)
            assert len(subsheaves(ell(J, c), J)) == len(closed_sieves(J, c))


def test_subsheaves_match_brute_filter():
    # every subpresheaf tested directly, on sites where that is affordable
    from toposites.sheaf import restrict_presheaf, subpresheaves

    for C, J in small_sites():
        for c in C.objects:
            L = ell(J, c).underlying
            if sum(L.sizes()) > 8:
                continue
            brute = [Q for Q in subpresheaves(L) if is_sheaf(restrict_presheaf(L, Q), J)]
            assert len(brute) == len(subsheaves(L, J))
