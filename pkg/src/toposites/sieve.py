"""Sieves on the objects of a finite category.

A sieve is stored as a bit-set over the category's sorted arrow list, so
equality is canonical and union/intersection are single integer ops.  The
``*_bits`` helpers work on raw integers and are what the heavier modules
use in their inner loops; :class:`Sieve` wraps them for the public API.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .fincat import FiniteCategory


@dataclass(frozen=True)
class Sieve:
    codomain: str
    bits: int
    category: FiniteCategory = field(compare=False, repr=False)

    @property
    def members(self) -> tuple[str, ...]:
        return members_of(self.category, self.bits)

    def __contains__(self, f: str) -> bool:
        return bool(self.bits >> self.category.index[f] & 1)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return self.bits.bit_count()

    def __or__(self, other: Sieve) -> Sieve:
        return lattice_ops(self, other, "union")

    def __and__(self, other: Sieve) -> Sieve:
        return lattice_ops(self, other, "intersection")

    def __le__(self, other: Sieve) -> bool:
        return lattice_ops(self, other, "subset")

    def __repr__(self):
        return f"Sieve({self.codomain}: {{{', '.join(self.members)}}})"


class SieveError(ValueError):
    pass


# -- bit-level primitives ------------------------------------------------------


def members_of(C: FiniteCategory, bits: int) -> tuple[str, ...]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(C.arrows[i])
        bits >>= 1
        i += 1
    return tuple(out)


def bits_of(C: FiniteCategory, arrows: Iterable[str]) -> int:
    b = 0
    for a in arrows:
        b |= 1 << C.index[a]
    return b


def _tables(C: FiniteCategory):
    t = C._cache.get("sieve_tables")
    if t is None:
        idx = C.index
        # down[f]: bits of the principal sieve (f) = {f∘k}
        down = [0] * len(C.arrows)
        # pairs[h]: (bit of g, index of h∘g) for g into dom(h)
        pairs = [()] * len(C.arrows)
        for f in C.arrows:
            i = idx[f]
            b = 0
            for k in C.into[C.dom[f]]:
                b |= 1 << idx[C.compose(f, k)]
            down[i] = b
            pairs[i] = tuple((1 << idx[g], idx[C.compose(f, g)]) for g in C.into[C.dom[f]])
        into_mask = {c: bits_of(C, C.into[c]) for c in C.objects}
        t = C._cache["sieve_tables"] = (down, pairs, into_mask, {})
    return t


def maximal_bits(C: FiniteCategory, c: str) -> int:
    return _tables(C)[2][c]


def generate_bits(C: FiniteCategory, gens: int) -> int:
    down = _tables(C)[0]
    out = 0
    i = 0
    while gens:
        if gens & 1:
            out |= down[i]
        gens >>= 1
        i += 1
    return out


def pullback_bits(C: FiniteCategory, h: int, bits: int) -> int:
    """``h*(S)`` for the arrow with index ``h``."""
    _, pairs, _, memo = _tables(C)
    key = (h, bits)
    r = memo.get(key)
    if r is None:
        r = 0
        for gb, hg in pairs[h]:
            if bits >> hg & 1:
                r |= gb
        memo[key] = r
    return r


def sieve_bits_on(C: FiniteCategory, c: str) -> tuple[int, ...]:
    """All sieves on ``c``, ordered by (size, bits)."""
    key = ("sieves", c)
    got = C._cache.get(key)
    if got is None:
        down = _tables(C)[0]
        incoming = [C.index[f] for f in C.into[c]]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for s in frontier:
                for i in incoming:
                    if not s >> i & 1:
                        t = s | down[i]
                        if t not in seen:
                            seen.add(t)
                            nxt.append(t)
            frontier = nxt
        got = C._cache[key] = tuple(sorted(seen, key=lambda b: (b.bit_count(), b)))
    return got


# -- public API ----------------------------------------------------------------


def _sieve(C, c, bits):
    return Sieve(c, bits, C)


def make_sieve(C: FiniteCategory, c: str, members: Iterable[str]) -> Sieve:
    """Wrap an explicit member set, checking it really is a sieve on ``c``."""
    members = list(members)
    for f in members:
        if f not in C.index:
            raise SieveError(f"unknown arrow {f!r}")
        if C.cod[f] != c:
            raise SieveError(f"arrow {f!r} does not have codomain {c!r}")
    b = bits_of(C, members)
    if generate_bits(C, b) != b:
        raise SieveError(f"{sorted(members)} is not closed under precomposition")
    return _sieve(C, c, b)


def generate(C: FiniteCategory, c: str, generators: Iterable[str]) -> Sieve:
    """Smallest sieve on ``c`` containing ``generators``."""
    gens = list(generators)
    for f in gens:
        if C.cod[f] != c:
            raise SieveError(f"generator {f!r} has codomain {C.cod[f]!r}, expected {c!r}")
    return _sieve(C, c, generate_bits(C, bits_of(C, gens)))


def principal(C: FiniteCategory, f: str) -> Sieve:
    return generate(C, C.cod[f], [f])


def maximal(C: FiniteCategory, c: str) -> Sieve:
    return _sieve(C, c, maximal_bits(C, c))


def empty_sieve(C: FiniteCategory, c: str) -> Sieve:
    return _sieve(C, c, 0)


def pullback(h: str, S: Sieve) -> Sieve:
    """``h*(S) = {g | h ∘ g ∈ S}``, a sieve on ``dom(h)``."""
    C = S.category
    if C.cod[h] != S.codomain:
        raise SieveError(f"cannot pull back a sieve on {S.codomain!r} along {h!r}")
    return _sieve(C, C.dom[h], pullback_bits(C, C.index[h], S.bits))


def lattice_ops(S: Sieve, T: Sieve, mode: str):
    if S.codomain != T.codomain:
        raise SieveError(f"sieves on different objects {S.codomain!r}, {T.codomain!r}")
    if mode == "union":
        return _sieve(S.category, S.codomain, S.bits | T.bits)
    if mode == "intersection":
        return _sieve(S.category, S.codomain, S.bits & T.bits)
    if mode == "subset":
        return S.bits & ~T.bits == 0
    raise ValueError(f"unknown mode {mode!r}")


def all_sieves(C: FiniteCategory, c: str) -> list[Sieve]:
    return [_sieve(C, c, b) for b in sieve_bits_on(C, c)]


def subsieves(S: Sieve) -> list[Sieve]:
    C = S.category
    return [_sieve(C, S.codomain, b) for b in sieve_bits_on(C, S.codomain) if b & ~S.bits == 0]
