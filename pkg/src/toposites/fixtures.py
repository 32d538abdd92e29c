"""Small named categories used throughout the tests and the corpus."""
from __future__ import annotations

from .fincat import FiniteCategory


def _cat(name, objects, arrows, compose=None):
    identities = {x: f"id_{x}" for x in objects}
    arrows = [(f"id_{x}", x, x) for x in objects] + list(arrows)
    return FiniteCategory(objects, arrows, identities, compose or {}, name=name)


def one() -> FiniteCategory:
    """The terminal category: one object ``*`` and its identity."""
    return _cat("ONE", ["*"], [])


def arrow() -> FiniteCategory:
    """``a --u--> b``."""
    return _cat("ARROW", ["a", "b"], [("u", "a", "b")])


def pair() -> FiniteCategory:
    """Two parallel arrows ``f, g: a -> b``."""
    return _cat("PAIR", ["a", "b"], [("f", "a", "b"), ("g", "a", "b")])


def span() -> FiniteCategory:
    """``a --p--> t <--q-- b``."""
    return _cat("SPAN", ["a", "b", "t"], [("p", "a", "t"), ("q", "b", "t")])


def d2() -> FiniteCategory:
    """Discrete category on two objects."""
    return _cat("D2", ["a", "b"], [])


def z2() -> FiniteCategory:
    """The group of order two on one object; ``e`` is the identity."""
    return FiniteCategory(["*"], [("e", "*", "*"), ("s", "*", "*")], {"*": "e"},
                          {("s", "s"): "e"}, name="Z2")


def idempotent_monoid() -> FiniteCategory:
    """``{e, s}`` with ``s ∘ s = s``."""
    return FiniteCategory(["*"], [("e", "*", "*"), ("s", "*", "*")], {"*": "e"},
                          {("s", "s"): "s"}, name="IDEM")


def empty() -> FiniteCategory:
    return FiniteCategory([], [], {}, {}, name="EMPTY")


NAMED = {
    "ONE": one,
    "ARROW": arrow,
    "PAIR": pair,
    "SPAN": span,
    "D2": d2,
    "Z2": z2,
}
