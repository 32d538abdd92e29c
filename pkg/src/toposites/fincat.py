"""Finite categories and finite-set-valued presheaves.

A :class:`FiniteCategory` is always valid once constructed: the constructor
checks the unit and associativity laws and raises :class:`CategoryError`
listing every violation it finds.  Objects and arrows are kept sorted by
identifier so that everything computed downstream is deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterable, Mapping


@dataclass(frozen=True)
class Violation:
    law: str
    witness: tuple

    def __str__(self):
        return f"{self.law}: {self.witness}"


class ValidationError(ValueError):
    """Raised when input data breaks a structural law.

    ``violations`` holds every :class:`Violation` that was found, not just
    the first one.
    """

    def __init__(self, message: str, violations: Iterable[Violation] = ()):
        self.violations = list(violations)
        detail = "".join(f"\n  {v}" for v in self.violations)
        super().__init__(message + detail)


class CategoryError(ValidationError):
    pass


class PresheafError(ValidationError):
    pass


class FiniteCategory:
    """A finite category given by an explicit composition table.

    ``compose`` maps ``(g, f)`` to ``g ∘ f`` for every pair with
    ``cod(f) == dom(g)``.  Entries where one side is an identity may be
    omitted; they are filled in from the unit law.
    """

    def __init__(
        self,
        objects: Iterable[str],
        arrows: Iterable[tuple[str, str, str]],
        identities: Mapping[str, str],
        compose: Mapping[tuple[str, str], str],
        name: str | None = None,
    ):
        self.name = name
        self.objects: tuple[str, ...] = tuple(sorted(objects))
        arrow_list = sorted(arrows)
        self.arrows: tuple[str, ...] = tuple(a for a, _, _ in arrow_list)
        self.dom: dict[str, str] = {a: d for a, d, _ in arrow_list}
        self.cod: dict[str, str] = {a: c for a, _, c in arrow_list}
        self.identity: dict[str, str] = dict(identities)
        violations = self._check_shape(arrow_list)
        if violations:
            raise CategoryError("invalid category description", violations)
        self._table = self._fill_table(compose, violations)
        violations += self._check_laws()
        if violations:
            raise CategoryError("invalid category description", violations)
        self._build_indexes()
        # per-instance memo for sieve-level computations (see sieve.py)
        self._cache: dict = {}

    # -- construction -----------------------------------------------------

    def _check_shape(self, arrow_list):
        out = []
        objs = set(self.objects)
        if len(objs) != len(self.objects):
            out.append(Violation("duplicate object", tuple(self.objects)))
        if len(set(self.arrows)) != len(self.arrows):
            out.append(Violation("duplicate arrow id", tuple(self.arrows)))
        for a, d, c in arrow_list:
            if d not in objs or c not in objs:
                out.append(Violation("arrow endpoint is not an object", (a, d, c)))
        for x in self.objects:
            i = self.identity.get(x)
            if i is None:
                out.append(Violation("missing identity", (x,)))
            elif i not in self.dom or self.dom[i] != x or self.cod[i] != x:
                out.append(Violation("identity is not an endo-arrow of its object", (x, i)))
        for x in self.identity:
            if x not in objs:
                out.append(Violation("identity declared for unknown object", (x,)))
        return out

    def _fill_table(self, compose, violations):
        table = {}
        ids = set(self.identity.values())
        for (g, f), h in compose.items():
            if g not in self.dom or f not in self.dom or h not in self.dom:
                violations.append(Violation("composition mentions unknown arrow", (g, f, h)))
                continue
            if self.cod[f] != self.dom[g]:
                violations.append(Violation("composition of non-composable pair", (g, f, h)))
                continue
            if self.dom[h] != self.dom[f] or self.cod[h] != self.cod[g]:
                violations.append(Violation("composite has wrong domain or codomain", (g, f, h)))
                continue
            table[g, f] = h
        for f in self.arrows:
            for g in self.arrows:
                if self.cod[f] != self.dom[g] or (g, f) in table:
                    continue
                if g in ids:
                    table[g, f] = f
                elif f in ids:
                    table[g, f] = g
                else:
                    violations.append(Violation("partial composition table", (g, f)))
        return table

    def _check_laws(self):
        out = []
        t = self._table
        for f in self.arrows:
            left = t.get((self.identity[self.cod[f]], f))
            right = t.get((f, self.identity[self.dom[f]]))
            if left != f:
                out.append(Violation("left identity law", (self.identity[self.cod[f]], f, left)))
            if right != f:
                out.append(Violation("right identity law", (f, self.identity[self.dom[f]], right)))
        for h, g, f in product(self.arrows, repeat=3):
            if self.cod[f] != self.dom[g] or self.cod[g] != self.dom[h]:
                continue
            gf, hg = t.get((g, f)), t.get((h, g))
            if gf is None or hg is None:
                continue
            a, b = t.get((h, gf)), t.get((hg, f))
            if a != b:
                out.append(Violation("associativity", (h, g, f)))
        return out

    def _build_indexes(self):
        self.index = {a: i for i, a in enumerate(self.arrows)}
        self.into: dict[str, tuple[str, ...]] = {
            c: tuple(a for a in self.arrows if self.cod[a] == c) for c in self.objects
        }
        self.out_of: dict[str, tuple[str, ...]] = {
            c: tuple(a for a in self.arrows if self.dom[a] == c) for c in self.objects
        }
        self._hom = {}
        for a in self.arrows:
            self._hom.setdefault((self.dom[a], self.cod[a]), []).append(a)

    # -- access -----------------------------------------------------------

    def compose(self, g: str, f: str) -> str:
        """Return ``g ∘ f``."""
        try:
            return self._table[g, f]
        except KeyError:
            raise ValueError(f"arrows {g!r} and {f!r} are not composable") from None

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return tuple(self._hom.get((a, b), ()))

    @property
    def composition(self) -> dict[tuple[str, str], str]:
        return dict(self._table)

    def is_identity(self, f: str) -> bool:
        return self.identity[self.dom[f]] == f

    def full_subcategory(self, objects: Iterable[str]) -> FiniteCategory:
        keep = set(objects)
        unknown = keep - set(self.objects)
        if unknown:
            raise ValueError(f"unknown objects {sorted(unknown)}")
        arrows = [(a, self.dom[a], self.cod[a]) for a in self.arrows
                  if self.dom[a] in keep and self.cod[a] in keep]
        names = {a for a, _, _ in arrows}
        table = {k: v for k, v in self._table.items() if k[0] in names and k[1] in names}
        return FiniteCategory(keep, arrows, {x: self.identity[x] for x in keep}, table)

    def to_dict(self) -> dict:
        """Description in the site-file layout (without a topology section)."""
        return {
            "objects": list(self.objects),
            "arrows": [{"id": a, "dom": self.dom[a], "cod": self.cod[a]} for a in self.arrows],
            "identities": {x: self.identity[x] for x in self.objects},
            "compose": [{"g": g, "f": f, "result": self._table[g, f]}
                        for g in self.arrows for f in self.arrows if (g, f) in self._table],
        }

    def _key(self):
        return (self.objects, tuple((a, self.dom[a], self.cod[a]) for a in self.arrows),
                tuple(sorted(self.identity.items())), tuple(sorted(self._table.items())))

    def __eq__(self, other):
        if not isinstance(other, FiniteCategory):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<FiniteCategory{label}: {len(self.objects)} objects, {len(self.arrows)} arrows>"


def validate_category(raw: Mapping) -> FiniteCategory:
    """Build a category from its description.

    ``raw`` uses the site-file layout: ``objects``, ``arrows`` (dicts with
    ``id``, ``dom``, ``cod``), ``identities`` and ``compose`` (dicts with
    ``g``, ``f``, ``result``).  A :class:`FiniteCategory` passes through
    unchanged.
    """
    if isinstance(raw, FiniteCategory):
        return raw
    try:
        objects = list(raw["objects"])
        arrows = [(a["id"], a["dom"], a["cod"]) for a in raw["arrows"]]
        identities = dict(raw["identities"])
        compose = {}
        dupes = []
        for entry in raw.get("compose", ()):
            key = (entry["g"], entry["f"])
            if key in compose and compose[key] != entry["result"]:
                dupes.append(Violation("conflicting composition entries", key))
            compose[key] = entry["result"]
    except (KeyError, TypeError) as exc:
        raise CategoryError(f"malformed category description ({exc!r})") from None
    if dupes:
        raise CategoryError("invalid category description", dupes)
    return FiniteCategory(objects, arrows, identities, compose, name=raw.get("name"))


def is_preorder(C: FiniteCategory) -> bool:
    return all(len(C.hom(a, b)) <= 1 for a in C.objects for b in C.objects)


# -- presheaves ----------------------------------------------------------------


class Presheaf:
    """A functor ``C^op -> FinSet``.

    ``value[c]`` is the tuple of elements over ``c`` and ``action[f, x]`` is
    the restriction of ``x ∈ value[cod f]`` along ``f``.
    """

    def __init__(self, category: FiniteCategory, value: Mapping[str, Iterable[Hashable]],
                 action: Mapping[tuple[str, Hashable], Hashable]):
        self.category = category
        self.value: dict[str, tuple] = {c: tuple(value.get(c, ())) for c in category.objects}
        self.action: dict[tuple[str, Hashable], Hashable] = dict(action)

    def __call__(self, f: str, x):
        return self.action[f, x]

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(self.value[c]) for c in self.category.objects)

    def elements(self):
        for c in self.category.objects:
            for x in self.value[c]:
                yield c, x

    def __repr__(self):
        body = ", ".join(f"{c}:{len(v)}" for c, v in self.value.items())
        return f"<Presheaf {body}>"


def presheaf_violations(P: Presheaf) -> list[Violation]:
    C = P.category
    out = []
    members = {c: set(P.value[c]) for c in C.objects}
    for c in C.objects:
        if len(members[c]) != len(P.value[c]):
            out.append(Violation("duplicate element", (c,)))
    for f in C.arrows:
        for x in P.value[C.cod[f]]:
            y = P.action.get((f, x))
            if y is None and (f, x) not in P.action:
                out.append(Violation("action undefined", (f, x)))
            elif y not in members[C.dom[f]]:
                out.append(Violation("action leaves the value set", (f, x, y)))
    if out:
        return out
    for c in C.objects:
        for x in P.value[c]:
            if P.action[C.identity[c], x] != x:
                out.append(Violation("identity action", (C.identity[c], x)))
    for (g, f), gf in C.composition.items():
        for x in P.value[C.cod[g]]:
            if P.action[f, P.action[g, x]] != P.action[gf, x]:
                out.append(Violation("functoriality", (g, f, x)))
    return out


def validate_presheaf(C: FiniteCategory, raw) -> Presheaf:
    """Check functoriality of a presheaf.

    ``raw`` is either a :class:`Presheaf` or a mapping with ``value`` and
    ``action`` keys (``action`` keyed by ``(arrow, element)``).
    """
    if isinstance(raw, Presheaf):
        P = raw
    else:
        P = Presheaf(C, raw["value"], raw["action"])
    v = presheaf_violations(P)
    if v:
        raise PresheafError("invalid presheaf", v)
    return P


def representable(C: FiniteCategory, c: str) -> Presheaf:
    """The Yoneda presheaf ``C(-, c)``; elements are arrow ids."""
    value = {d: C.hom(d, c) for d in C.objects}
    action = {(f, x): C.compose(x, f) for x in C.into[c] for f in C.into[C.dom[x]]}
    return Presheaf(C, value, action)


@dataclass
class PresheafMap:
    """A natural transformation given by its components."""

    source: Presheaf
    target: Presheaf
    components: dict  # object -> {element: element}

    def __call__(self, c, x):
        return self.components[c][x]

    def is_natural(self) -> bool:
        C = self.source.category
        for f in C.arrows:
            for x in self.source.value[C.cod[f]]:
                lhs = self.components[C.dom[f]][self.source.action[f, x]]
                rhs = self.target.action[f, self.components[C.cod[f]][x]]
                if lhs != rhs:
                    return False
        return True

    def is_injective(self) -> bool:
        return all(len(set(m.values())) == len(m) for m in self.components.values())

    def is_bijective(self) -> bool:
        return self.is_injective() and all(
            len(self.components[c]) == len(self.target.value[c])
            for c in self.source.category.objects
        )

    def image(self) -> dict[str, frozenset]:
        return {c: frozenset(m.values()) for c, m in self.components.items()}

    def then(self, other: PresheafMap) -> PresheafMap:
        """``other ∘ self``."""
        comps = {c: {x: other.components[c][y] for x, y in m.items()}
                 for c, m in self.components.items()}
        return PresheafMap(self.source, other.target, comps)
