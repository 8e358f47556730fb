"""CE symbols ``R^a_m``, formal integer sums of them, and unordered configurations.

Text syntax is ``<family>^<super>_<degree>``, e.g. ``E^2_-1`` or ``Q^3_0``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Iterator, NamedTuple

FAMILIES = ("E", "H", "T", "Q")

CANONICAL_SUPERS = {
    "E": (0, 1, 2),
    "H": (1, 2),
    "T": (0, 1, 2, 3),
    "Q": (2, 3, 4),
}

# extended-only symbol -> canonical superscript it is the negative of
_IDENTIFIED = {("H", 0): 2, ("Q", 0): 4, ("Q", 1): 3}

EXTENDED_SUPERS = {
    f: tuple(sorted(set(CANONICAL_SUPERS[f]) | {a for (g, a) in _IDENTIFIED if g == f}))
    for f in FAMILIES
}

_SYMBOL_RE = re.compile(r"^\s*([EHTQ])\^(-?\d+)_(-?\d+)\s*$")


class AlphabetError(ValueError):
    """Superscript outside the (extended) alphabet of its family."""


@total_ordering
@dataclass(frozen=True, eq=True)
class Symbol:
    family: str
    sup: int
    degree: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise AlphabetError(f"unknown family {self.family!r}")
        if self.sup not in EXTENDED_SUPERS[self.family]:
            raise AlphabetError(f"{self.family}^{self.sup} is not in the extended alphabet")

    @property
    def is_canonical(self) -> bool:
        return self.sup in CANONICAL_SUPERS[self.family]

    def sort_key(self) -> tuple[int, int, int]:
        return (FAMILIES.index(self.family), self.sup, self.degree)

    def __lt__(self, other: "Symbol") -> bool:
        if not isinstance(other, Symbol):
            return NotImplemented
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return f"{self.family}^{self.sup}_{self.degree}"

    @classmethod
    def parse(cls, text: str) -> "Symbol":
        m = _SYMBOL_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse symbol {text!r}")
        return cls(m.group(1), int(m.group(2)), int(m.group(3)))


def sym(text: str) -> Symbol:
    """Shorthand for :meth:`Symbol.parse`."""
    return Symbol.parse(text)


class SignedSymbol(NamedTuple):
    sign: int
    symbol: Symbol


def canonicalize_symbol(s: Symbol) -> SignedSymbol:
    """Rewrite H^0, Q^0, Q^1 as -H^2, -Q^4, -Q^3; canonical symbols pass through."""
    target = _IDENTIFIED.get((s.family, s.sup))
    if target is None:
        return SignedSymbol(1, s)
    return SignedSymbol(-1, Symbol(s.family, target, s.degree))


class FormalSum:
    """Finite integer combination of canonical symbols; immutable and hashable."""

    __slots__ = ("_terms",)

    def __init__(self, terms: dict[Symbol, int] | None = None):
        terms = terms or {}
        for s, c in terms.items():
            if not s.is_canonical:
                raise AlphabetError(f"{s} is not canonical; use sum_normalize")
        self._terms = tuple(sorted((s, c) for s, c in terms.items() if c))

    @classmethod
    def of(cls, *pairs: tuple[int, Symbol | str]) -> "FormalSum":
        return sum_normalize(pairs)

    @property
    def terms(self) -> tuple[tuple[Symbol, int], ...]:
        return self._terms

    def as_dict(self) -> dict[Symbol, int]:
        return dict(self._terms)

    def symbols(self) -> list[Symbol]:
        return [s for s, _ in self._terms]

    def __getitem__(self, s: Symbol) -> int:
        return self.as_dict().get(s, 0)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __iter__(self) -> Iterator[tuple[Symbol, int]]:
        return iter(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormalSum):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __add__(self, other: "FormalSum") -> "FormalSum":
        d = self.as_dict()
        for s, c in other:
            d[s] = d.get(s, 0) + c
        return FormalSum(d)

    def __neg__(self) -> "FormalSum":
        return FormalSum({s: -c for s, c in self._terms})

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def __mul__(self, k: int) -> "FormalSum":
        return FormalSum({s: k * c for s, c in self._terms})

    __rmul__ = __mul__

    def map_coefficients(self, fn) -> "FormalSum":
        return FormalSum({s: fn(s, c) for s, c in self._terms})

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, (s, c) in enumerate(self._terms):
            mag = "" if abs(c) == 1 else str(abs(c))
            if i == 0:
                out.append(("-" if c < 0 else "") + mag + str(s))
            else:
                out.append(("- " if c < 0 else "+ ") + mag + str(s))
        return " ".join(out)

    def __repr__(self) -> str:
        return f"FormalSum({self})"

    def to_json(self) -> dict[str, int]:
        return {str(s): c for s, c in self._terms}


def sum_normalize(pairs: Iterable[tuple[int, Symbol | str]]) -> FormalSum:
    acc: dict[Symbol, int] = {}
    for coeff, s in pairs:
        if isinstance(s, str):
            s = Symbol.parse(s)
        sign, canon = canonicalize_symbol(s)
        acc[canon] = acc.get(canon, 0) + sign * coeff
    return FormalSum(acc)


@dataclass(frozen=True)
class Configuration:
    """Unordered n-tuple of canonical symbols, stored sorted."""

    symbols: tuple[Symbol, ...]

    @property
    def n(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return "[" + ", ".join(map(str, self.symbols)) + "]"

    def to_json(self) -> list[str]:
        return [str(s) for s in self.symbols]


def make_configuration(symbols: Iterable[Symbol | str]) -> Configuration:
    items = [Symbol.parse(s) if isinstance(s, str) else s for s in symbols]
    if not items:
        raise ValueError("a configuration needs at least one symbol")
    for s in items:
        if not s.is_canonical:
            raise AlphabetError(f"{s} is not canonical")
    return Configuration(tuple(sorted(items)))


@dataclass(frozen=True)
class DegreeWindow:
    """Truncation of the degree index: E/H/T in [-M, M], Q in [-M+1, M]."""

    M: int

    def __post_init__(self):
        if not isinstance(self.M, int) or self.M < 1:
            raise ValueError(f"window size must be a positive integer, got {self.M!r}")

    def degrees(self, family: str) -> range:
        lo = -self.M + 1 if family == "Q" else -self.M
        return range(lo, self.M + 1)

    def contains(self, s: Symbol) -> bool:
        return s.degree in self.degrees(s.family)


def enumerate_symbols(w: DegreeWindow) -> list[Symbol]:
    return [
        Symbol(f, a, m)
        for f in FAMILIES
        for a in CANONICAL_SUPERS[f]
        for m in w.degrees(f)
    ]


def enumerate_configurations(n: int, w: DegreeWindow) -> list[Configuration]:
    if n < 1:
        raise ValueError("configurations have at least one symbol")
    return [Configuration(c) for c in itertools.combinations_with_replacement(enumerate_symbols(w), n)]
