"""Relation families on CE symbols, the truncated universal group and membership checks.

A relation instance is a formal sum that every admissible function on
configurations must send to zero. Families are instantiated over the extended
superscript ranges and canonicalized, so the sign identifications
H^0 = -H^2, Q^0 = -Q^4, Q^1 = -Q^3 come for free.

Degrees are truncated to a :class:`~orderone.symbols.DegreeWindow`; an
instance is kept only if every symbol of its normalized sum is in the window.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Sequence

from .abelian import (
    GroupElement,
    GroupSpec,
    Homomorphism,
    IntMatrix,
    enumerate_homs,
    generates,
    presentation_quotient,
    row_spans_equal,
)
from .symbols import (
    Configuration,
    DegreeWindow,
    FormalSum,
    Symbol,
    enumerate_configurations,
    enumerate_symbols,
    make_configuration,
    sum_normalize,
)

S = Symbol

# tag -> (superscripts, formula(a, m) -> [(coeff, extended symbol)])
RAW_FAMILIES: dict[str, tuple[tuple[int | None, ...], Callable]] = {
    "EH": ((0, 1, 2), lambda a, m: [(1, S("E", a, m)), (-1, S("H", a, m))]),
    "TT": ((0, 1, 2, 3), lambda a, m: [(1, S("T", a, m)), (-1, S("T", 3 - a, m))]),
    "ET": (
        (0, 1, 2),
        lambda a, m: [(1, S("T", a, m)), (-1, S("T", a + 1, m)), (-1, S("E", a, m - 1)), (1, S("E", a, m))],
    ),
    "HT": (
        (0, 1, 2),
        lambda a, m: [(-1, S("T", a + 1, m)), (1, S("T", a, m)), (-1, S("H", a, m - 1)), (1, S("H", a, m))],
    ),
    "TQ": (
        (0, 1, 2, 3),
        lambda a, m: [(1, S("Q", a, m)), (-1, S("Q", a + 1, m)), (-1, S("T", a, m - 1)), (1, S("T", a, m))],
    ),
    "QQ": ((None,), lambda a, m: [(1, S("Q", 2, m)), (-1, S("Q", 2, m - 1))]),
    "TORSION-H1": ((None,), lambda a, m: [(2, S("H", 1, m))]),
    "TORSION-Q2": ((None,), lambda a, m: [(2, S("Q", 2, m))]),
}

# the six bullets of the simplified presentation, split into single relations
SIMPLIFIED_FAMILIES: dict[str, Callable[[int], list[tuple[int, Symbol]]]] = {
    "B1:E2=H2": lambda m: [(1, S("E", 2, m)), (-1, S("H", 2, m))],
    "B1:E0=-H2": lambda m: [(1, S("E", 0, m)), (1, S("H", 2, m))],
    "B1:E1=H1": lambda m: [(1, S("E", 1, m)), (-1, S("H", 1, m))],
    "B2:T0=T3": lambda m: [(1, S("T", 0, m)), (-1, S("T", 3, m))],
    "B2:T1=T2": lambda m: [(1, S("T", 1, m)), (-1, S("T", 2, m))],
    "B3:H1 const": lambda m: [(1, S("H", 1, m)), (-1, S("H", 1, m - 1))],
    "B3:2H1": lambda m: [(2, S("H", 1, m))],
    "B4:Q2 const": lambda m: [(1, S("Q", 2, m)), (-1, S("Q", 2, m - 1))],
    "B4:2Q2": lambda m: [(2, S("Q", 2, m))],
    "B5:H2 step": lambda m: [(1, S("H", 2, m)), (-1, S("H", 2, m - 1)), (-1, S("T", 3, m)), (1, S("T", 2, m))],
    "B6:Q4-Q3": lambda m: [(1, S("Q", 4, m)), (-1, S("Q", 3, m)), (-1, S("T", 3, m)), (1, S("T", 3, m - 1))],
    "B6:Q3-Q2": lambda m: [(1, S("Q", 3, m)), (-1, S("Q", 2, m)), (-1, S("T", 2, m)), (1, S("T", 2, m - 1))],
}


@dataclass(frozen=True)
class RelationInstance:
    sum: FormalSum
    family_tag: str
    parameters: tuple
    provenance: tuple[tuple[str, tuple], ...] = ()

    def __str__(self) -> str:
        return f"{self.family_tag}{self.parameters}: 0 = {self.sum}"

    def to_json(self) -> dict:
        return {
            "family": self.family_tag,
            "parameters": list(self.parameters),
            "sum": str(self.sum),
            "provenance": [[t, list(p)] for t, p in self.provenance],
        }


def instantiate(tag: str, a: int | None, m: int) -> FormalSum:
    """Normalized sum of family ``tag`` at superscript ``a`` and degree ``m``."""
    return sum_normalize(RAW_FAMILIES[tag][1](a, m))


def _collect(candidates: Iterable[tuple[str, tuple, FormalSum]], w: DegreeWindow) -> list[RelationInstance]:
    by_sum: dict[FormalSum, list[tuple[str, tuple]]] = {}
    for tag, params, total in candidates:
        if not total or not all(w.contains(s) for s in total.symbols()):
            continue
        by_sum.setdefault(total, []).append((tag, params))
    return [
        RelationInstance(total, prov[0][0], prov[0][1], tuple(prov))
        for total, prov in by_sum.items()
    ]


def _degree_scan(w: DegreeWindow) -> range:
    return range(-w.M - 1, w.M + 2)


def raw_relation_instances(w: DegreeWindow, families: Sequence[str] | None = None) -> list[RelationInstance]:
    """All in-window instances of the raw families, deduplicated by sum."""
    families = list(RAW_FAMILIES) if families is None else list(families)

    def gen():
        for tag in families:
            supers, _ = RAW_FAMILIES[tag]
            for a in supers:
                for m in _degree_scan(w):
                    params = (a, m) if a is not None else (m,)
                    yield tag, params, instantiate(tag, a, m)

    return _collect(gen(), w)


def simplified_relation_instances(w: DegreeWindow) -> list[RelationInstance]:
    def gen():
        for tag, formula in SIMPLIFIED_FAMILIES.items():
            for m in _degree_scan(w):
                yield tag, (m,), sum_normalize(formula(m))

    return _collect(gen(), w)


def relation_matrix(instances: Sequence[RelationInstance], symbols: Sequence[Symbol]) -> IntMatrix:
    index = {s: i for i, s in enumerate(symbols)}
    rows = []
    for inst in instances:
        row = [0] * len(symbols)
        for s, c in inst.sum:
            row[index[s]] = c
        rows.append(row)
    return IntMatrix(rows, ncols=len(symbols))


def spans_equivalent(w: DegreeWindow, drop_families: Sequence[str] = ()) -> bool:
    """Raw and simplified relation sets generate the same lattice.

    ``drop_families`` removes raw families first (used as a negative control).
    """
    symbols = enumerate_symbols(w)
    raw = raw_relation_instances(w, [f for f in RAW_FAMILIES if f not in drop_families])
    simp = simplified_relation_instances(w)
    return row_spans_equal(relation_matrix(raw, symbols), relation_matrix(simp, symbols))


# --- universal group ----------------------------------------------------------


def named_generator_symbols(w: DegreeWindow) -> dict[str, Symbol]:
    """Symbols whose images are the free generators t^a_m, h^2_0 and the order-two h^1_0, q^2_0."""
    out = {}
    for a in (2, 3):
        for m in w.degrees("T"):
            out[f"t^{a}_{m}"] = S("T", a, m)
    out["h^2_0"] = S("H", 2, 0)
    out["h^1_0"] = S("H", 1, 0)
    out["q^2_0"] = S("Q", 2, 0)
    return out


@dataclass
class UniversalGroupResult:
    window: DegreeWindow
    group: GroupSpec
    symbol_image: dict[Symbol, GroupElement]
    named_generators: dict[str, GroupElement]
    relations: list[RelationInstance]
    named_basis: bool
    """Whether the named generators realize Z^(free) + Z/2 + Z/2 with h^1_0, q^2_0 of order two."""

    def to_json(self) -> dict:
        return {
            "window": self.window.M,
            "group": self.group.to_json(),
            "generators": {k: list(v.coords) for k, v in self.named_generators.items()},
            "named_generators_form_basis": self.named_basis,
            "relation_count": len(self.relations),
        }


def universal_group(w: DegreeWindow, relations: Sequence[RelationInstance] | None = None) -> UniversalGroupResult:
    """Free abelian group on in-window symbols modulo the raw relations."""
    symbols = enumerate_symbols(w)
    rels = raw_relation_instances(w) if relations is None else list(relations)
    group, proj = presentation_quotient(len(symbols), relation_matrix(rels, symbols))
    image = dict(zip(symbols, proj))
    named = {k: image[s] for k, s in named_generator_symbols(w).items()}

    # Named generators are a basis iff they generate, there are exactly as many
    # as invariant factors, and the two torsion ones have order two (a
    # surjection between isomorphic f.g. abelian groups is an isomorphism).
    n_free = 2 * len(w.degrees("T")) + 1
    named_basis = (
        group.free_rank == n_free
        and group.torsion == (2, 2)
        and generates(named.values(), group)
        and not (2 * named["h^1_0"]) and not (2 * named["q^2_0"])
        and bool(named["h^1_0"]) and bool(named["q^2_0"])
    )
    return UniversalGroupResult(w, group, image, named, rels, named_basis)


# --- closed-form universal invariant --------------------------------------------

GENERATOR_TORSION = (S("H", 1, 0), S("Q", 2, 0))


def _h2_closed(m: int) -> FormalSum:
    if m >= 0:
        ks = range(1, m + 1)
        sign = 1
    else:
        ks = range(m + 1, 1)
        sign = -1
    pairs = [(1, S("H", 2, 0))]
    for k in ks:
        pairs += [(sign, S("T", 3, k)), (-sign, S("T", 2, k))]
    return sum_normalize(pairs)


def eval_gU_closed(s: Symbol, w: DegreeWindow) -> FormalSum:
    """g_U(s) as a combination of generator symbols T^2_k, T^3_k, H^2_0, H^1_0, Q^2_0.

    A generator symbol stands for its own image (t^a_k, h^2_0, ...). Uses
    only the closed formulas, never the relation matrix.
    """
    if not s.is_canonical or not w.contains(s):
        raise ValueError(f"{s} is not a canonical in-window symbol")
    f, a, m = s.family, s.sup, s.degree
    if f == "H":
        return FormalSum({S("H", 1, 0): 1}) if a == 1 else _h2_closed(m)
    if f == "E":
        if a == 1:
            return FormalSum({S("H", 1, 0): 1})
        h2 = _h2_closed(m)
        return -h2 if a == 0 else h2
    if f == "T":
        b = {0: 3, 1: 2}.get(a, a)
        return FormalSum({S("T", b, m): 1})
    # Q
    q = FormalSum({S("Q", 2, 0): 1})
    if a >= 3:
        q = q + FormalSum.of((1, S("T", 2, m)), (-1, S("T", 2, m - 1)))
    if a == 4:
        q = q + FormalSum.of((1, S("T", 3, m)), (-1, S("T", 3, m - 1)))
    return q


def reduce_generator_sum(x: FormalSum) -> FormalSum:
    """Reduce coefficients of the order-two generators modulo 2."""
    return x.map_coefficients(lambda s, c: c % 2 if s in GENERATOR_TORSION else c)


@dataclass
class CrosscheckReport:
    window: DegreeWindow
    symbols_checked: int
    relations_checked: int
    symbol_violations: list[dict] = field(default_factory=list)
    relation_violations: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> list[dict]:
        return self.symbol_violations + self.relation_violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "window": self.window.M,
            "symbols_checked": self.symbols_checked,
            "relations_checked": self.relations_checked,
            "violations": self.violations,
        }


def crosscheck_gU(
    w: DegreeWindow,
    evaluator: Callable[[Symbol, DegreeWindow], FormalSum] = eval_gU_closed,
    universal: UniversalGroupResult | None = None,
) -> CrosscheckReport:
    """Compare closed-form g_U with the quotient projection, and evaluate relations on it."""
    U = universal or universal_group(w)
    gen_image = {s: U.named_generators[k] for k, s in named_generator_symbols(w).items()}
    report = CrosscheckReport(w, 0, 0)
    for s in enumerate_symbols(w):
        report.symbols_checked += 1
        closed = evaluator(s, w)
        val = U.group.zero()
        for g, c in closed:
            val = val + c * gen_image[g]
        if val != U.symbol_image[s]:
            report.symbol_violations.append(
                {"kind": "symbol", "symbol": str(s), "closed_form": str(closed)}
            )
    for inst in raw_relation_instances(w):
        report.relations_checked += 1
        total = FormalSum()
        for s, c in inst.sum:
            total = total + c * evaluator(s, w)
        total = reduce_generator_sum(total)
        if total:
            report.relation_violations.append(
                {"kind": "relation", **inst.to_json(), "value": str(total)}
            )
    return report


# --- invariant tables and membership -------------------------------------------


@dataclass
class InvariantTable:
    """A function on in-window n-configurations with values in a finitely generated group."""

    n: int
    window: DegreeWindow
    group: GroupSpec
    values: dict[Configuration, GroupElement]

    def key(self) -> tuple:
        return tuple(sorted((c.symbols, v.coords) for c, v in self.values.items()))

    def to_json(self) -> dict:
        return {
            ",".join(map(str, c.symbols)): list(v.coords)
            for c, v in sorted(self.values.items(), key=lambda kv: kv[0].symbols)
        }


def delta1_tables(G: GroupSpec, w: DegreeWindow, universal: UniversalGroupResult | None = None) -> list[InvariantTable]:
    """phi o g_U on in-window single symbols, one table per phi in Hom(G_U, G)."""
    if not G.is_finite():
        raise ValueError(f"delta1_tables needs a finite coefficient group, got {G}")
    U = universal or universal_group(w)
    tables = []
    for phi in enumerate_homs(U.group, G):
        values = {Configuration((s,)): phi(img) for s, img in U.symbol_image.items()}
        tables.append(InvariantTable(1, w, G, values))
    return tables


def section_e_g(c: Configuration) -> int:
    """1 iff every symbol of ``c`` is a quadruple point."""
    return int(all(s.family == "Q" for s in c.symbols))


def section_e_table(n: int, w: DegreeWindow) -> InvariantTable:
    Z2 = GroupSpec(0, (2,))
    return InvariantTable(
        n, w, Z2, {c: Z2.element((section_e_g(c),)) for c in enumerate_configurations(n, w)}
    )


def indicator_table(n: int, w: DegreeWindow, support: Configuration, G: GroupSpec) -> InvariantTable:
    one = G.generator(0)
    return InvariantTable(
        n, w, G, {c: (one if c == support else G.zero()) for c in enumerate_configurations(n, w)}
    )


def contexts_for(n: int, w: DegreeWindow, sample: int | None = None, seed: int = 0) -> list[tuple[Symbol, ...]]:
    """In-window multisets of size n-1, optionally a seeded sample of them."""
    allc = list(itertools.combinations_with_replacement(enumerate_symbols(w), n - 1))
    if sample is not None and sample < len(allc):
        picked = sorted(random.Random(seed).sample(range(len(allc)), sample))
        return [allc[i] for i in picked]
    return allc


def deltaN_relation_instances(
    n: int,
    w: DegreeWindow,
    contexts: Sequence[tuple[Symbol, ...]] | None = None,
) -> Iterator[tuple[RelationInstance, tuple[Symbol, ...]]]:
    """Raw single-symbol relations lifted to n-configurations by every context."""
    if n < 1:
        raise ValueError("order must be at least 1")
    ctxs = contexts_for(n, w) if contexts is None else contexts
    raws = raw_relation_instances(w)
    for ctx in ctxs:
        for inst in raws:
            yield inst, tuple(ctx)


@dataclass
class MembershipReport:
    n: int
    window: DegreeWindow
    checked: int = 0
    contexts: int = 0
    violations: list[dict] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations and not self.missing

    def to_json(self, limit: int | None = 50) -> dict:
        return {
            "n": self.n,
            "window": self.window.M,
            "contexts": self.contexts,
            "instances_checked": self.checked,
            "violation_count": len(self.violations),
            "violations": self.violations[:limit] if limit is not None else self.violations,
            "missing": self.missing[:limit] if limit is not None else self.missing,
        }


def check_membership(
    f: InvariantTable,
    contexts: Sequence[tuple[Symbol, ...]] | None = None,
) -> MembershipReport:
    """Evaluate every lifted relation on ``f``; an empty violation list means f satisfies all of them."""
    ctxs = contexts_for(f.n, f.window) if contexts is None else list(contexts)
    report = MembershipReport(f.n, f.window, contexts=len(ctxs))
    G = f.group
    cache: dict[tuple[Symbol, ...], Configuration] = {}
    missing = set()
    for inst, ctx in deltaN_relation_instances(f.n, f.window, ctxs):
        report.checked += 1
        total = G.zero()
        absent = False
        for s, c in inst.sum:
            key = (s,) + ctx
            conf = cache.get(key)
            if conf is None:
                conf = cache[key] = make_configuration(key)
            val = f.values.get(conf)
            if val is None:
                absent = True
                missing.add(str(conf))
                continue
            total = total + c * val
        if absent:
            continue
        if total:
            report.violations.append(
                {**inst.to_json(), "context": [str(s) for s in ctx], "value": list(total.coords)}
            )
    report.missing = sorted(missing)
    return report
