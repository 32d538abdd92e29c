import pytest

from toposites import fixtures
from toposites.fincat import (
    CategoryError,
    FiniteCategory,
    PresheafError,
    is_preorder,
    representable,
    validate_category,
    validate_presheaf,
)


def _raw(C):
    return C.to_dict()


def test_arrow_valid():
    C = validate_category(_raw(fixtures.arrow()))
    assert C.objects == ("a", "b")
    assert C.hom("a", "b") == ("u",)
    assert C.compose("u", "id_a") == "u"


def test_z2_valid():
    C = fixtures.z2()
    assert C.compose("s", "s") == "e"
    assert validate_category(_raw(C)) == C


def test_idempotent_table_is_a_different_valid_monoid():
    # s.s = s is the two-element monoid with an idempotent, not a broken Z2
    M = fixtures.idempotent_monoid()
    assert M.compose("s", "s") == "s"
    assert M != fixtures.z2()


def test_identity_law_violation_reported():
    with pytest.raises(CategoryError) as exc:
        FiniteCategory(["*"], [("e", "*", "*"), ("s", "*", "*")], {"*": "e"},
                       {("e", "s"): "e", ("s", "s"): "e"})
    assert any("identity" in v.law for v in exc.value.violations)


def test_missing_identity():
    with pytest.raises(CategoryError) as exc:
        FiniteCategory(["a"], [("f", "a", "a")], {}, {("f", "f"): "f"})
    assert any("identity" in v.law for v in exc.value.violations)


def test_partial_composition_table():
    with pytest.raises(CategoryError) as exc:
        FiniteCategory(["*"], [("e", "*", "*"), ("s", "*", "*")], {"*": "e"}, {})
    laws = [v.law for v in exc.value.violations]
    assert "partial composition table" in laws
    assert exc.value.violations[0].witness == ("s", "s")


def test_associativity_failure_has_witness():
    # s.t = s, t.s = t on a 3-element monoid; then (s.t).s = s.s but s.(t.s) = s.t
    arrows = [("e", "*", "*"), ("s", "*", "*"), ("t", "*", "*")]
    comp = {("s", "s"): "e", ("t", "t"): "t", ("s", "t"): "s", ("t", "s"): "t"}
    with pytest.raises(CategoryError) as exc:
        FiniteCategory(["*"], arrows, {"*": "e"}, comp)
    assoc = [v for v in exc.value.violations if v.law.startswith("associativ")]
    assert assoc and len(assoc[0].witness) == 3


def test_malformed_description():
    with pytest.raises(CategoryError):
        validate_category({"objects": ["a"]})


@pytest.mark.parametrize("make, expected", [
    (fixtures.arrow, True),
    (fixtures.pair, False),
    (fixtures.z2, False),
    (fixtures.one, True),
    (fixtures.d2, True),
    (fixtures.span, True),
])
def test_is_preorder(make, expected):
    assert is_preorder(make()) is expected


def test_yoneda_on_arrow():
    y = representable(fixtures.arrow(), "b")
    assert set(y.value["a"]) == {"u"} and set(y.value["b"]) == {"id_b"}
    assert y("u", "id_b") == "u"


def test_yoneda_on_z2_is_right_multiplication():
    C = fixtures.z2()
    y = representable(C, "*")
    assert set(y.value["*"]) == {"e", "s"}
    for f in C.arrows:
        for x in C.arrows:
            assert y(f, x) == C.compose(x, f)


def test_presheaf_composition_violation_witness():
    C = fixtures.pair()
    ids = {("id_a", 0): 0, ("id_a", 1): 1, ("id_b", 0): 0}
    P = validate_presheaf(C, {"value": {"a": [0, 1], "b": [0]},
                              "action": {**ids, ("f", 0): 0, ("g", 0): 1}})
    assert P.sizes() == (2, 1)
    # id_a swapping the two elements breaks P(f . id_a) = P(id_a) P(f)
    bad = {**ids, ("id_a", 0): 1, ("id_a", 1): 0, ("f", 0): 0, ("g", 0): 1}
    with pytest.raises(PresheafError) as exc:
        validate_presheaf(C, {"value": {"a": [0, 1], "b": [0]}, "action": bad})
    functoriality = [v.witness for v in exc.value.violations if v.law == "functoriality"]
    assert ("f", "id_a", 0) in functoriality


def test_full_subcategory():
    C = fixtures.span()
    D = C.full_subcategory(["a", "t"])
    assert D.objects == ("a", "t")
    assert set(D.arrows) == {"id_a", "id_t", "p"}
