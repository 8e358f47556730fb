"""Exact rational analysis of the quintuple-point (QQ) codimension-two stratum.

Five oriented planes through the origin with normals ``u_1..u_5`` are unfolded
by the 2-dimensional space ``U`` of offset vectors ``lam`` with
``sum(lam_k * u_k) == 0``. A small loop around the origin of ``U`` crosses ten
quadruple-point strata; reading off their types, degrees and co-orientations
yields a relation among Q symbols.

Points of ``U`` are handled in kernel coordinates ``(alpha, beta)`` with
``lam = alpha * b1 + beta * b2``. Cyclic order is taken in these coordinates,
which is a linear image of ``U`` and therefore preserves it up to a global
orientation flip. No floating point is used anywhere.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key
from itertools import combinations
from typing import Sequence

from .symbols import FormalSum, Symbol, sum_normalize

Vec = tuple[Fraction, ...]

MAX_ATTEMPTS = 10_000


class GeometryError(ValueError):
    pass


class GeneralPositionError(GeometryError):
    """Some three normals are linearly dependent."""


class DegenerateProjectionError(GeometryError):
    """A standard basis vector projects to zero in U."""


class DegenerateProfileError(GeometryError):
    """A coordinate other than the defining one vanishes on a half-line of l_k^perp."""


class UnboundedRegionError(GeometryError):
    """The four half-spaces do not cut out a bounded simplex."""


class LemmaPreconditionError(GeometryError):
    pass


class NonZeroSumError(LemmaPreconditionError):
    pass


class DependentTripleError(LemmaPreconditionError):
    pass


class NonPositiveOffsetError(LemmaPreconditionError):
    pass


class RejectionBudgetExceeded(GeometryError):
    pass


# --- small exact linear algebra ------------------------------------------------


def _vec(xs) -> Vec:
    return tuple(Fraction(x) for x in xs)


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((a * b for a, b in zip(u, v)), Fraction(0))


def det3(a: Sequence, b: Sequence, c: Sequence) -> Fraction:
    return (
        a[0] * (b[1] * c[2] - b[2] * c[1])
        - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
    )


def solve3(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> Vec:
    """Cramer's rule for x with rows[i] . x == rhs[i]."""
    d = det3(*rows)
    if d == 0:
        raise GeneralPositionError("singular 3x3 system")
    out = []
    for j in range(3):
        cols = [list(r) for r in rows]
        for i in range(3):
            cols[i][j] = rhs[i]
        out.append(det3(*cols) / d)
    return tuple(out)


def cross2(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    return a[0] * b[1] - a[1] * b[0]


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _half(v: Sequence[Fraction]) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2pi)
    return 0 if (v[1] > 0 or (v[1] == 0 and v[0] > 0)) else 1


def angle_cmp(a: Sequence[Fraction], b: Sequence[Fraction]) -> int:
    """Compare nonzero 2-vectors by counter-clockwise angle from the positive x-axis."""
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return ha - hb
    return -_sign(cross2(a, b))


def nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[Vec]:
    """Exact basis of {x : rows @ x == 0} via reduced row echelon form."""
    R = [list(map(Fraction, r)) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(R)) if R[i][c] != 0), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        pv = R[r][c]
        R[r] = [x / pv for x in R[r]]
        for i in range(len(R)):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                R[i] = [x - f * y for x, y in zip(R[i], R[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [Fraction(0)] * ncols
        x[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            x[pc] = -R[i][fc]
        basis.append(tuple(x))
    return basis


def _clear_denominators(v: Vec) -> Vec:
    from math import lcm

    L = lcm(*(x.denominator for x in v))
    return tuple(x * L for x in v)


# --- quintuples ----------------------------------------------------------------


@dataclass(frozen=True)
class PlaneQuintuple:
    """Five oriented planes through the origin, given by normals pointing to the preferred side.

    Normals need not be unit vectors: every side decision is invariant under
    positive rescaling of a single normal.
    """

    normals: tuple[Vec, ...]
    m: int = 0

    def __post_init__(self):
        normals = tuple(_vec(u) for u in self.normals)
        if len(normals) != 5 or any(len(u) != 3 for u in normals):
            raise ValueError("a quintuple needs five normals in 3-space")
        object.__setattr__(self, "normals", normals)

    def dependent_triples(self) -> list[tuple[int, int, int]]:
        return [t for t in combinations(range(5), 3) if det3(*(self.normals[i] for i in t)) == 0]

    def check_general_position(self):
        bad = self.dependent_triples()
        if bad:
            raise GeneralPositionError(f"dependent normal triples {bad}")

    def to_json(self) -> dict:
        return {"normals": [[str(x) for x in u] for u in self.normals], "m": self.m}

    @classmethod
    def from_json(cls, data: dict | str) -> "PlaneQuintuple":
        if isinstance(data, str):
            data = json.loads(data)
        try:
            normals = [[Fraction(str(x)) for x in u] for u in data["normals"]]
            m = int(data.get("m", 0))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed quintuple: {exc}") from exc
        return cls(tuple(map(tuple, normals)), m)

    def relabeled(self, perm: Sequence[int]) -> "PlaneQuintuple":
        return PlaneQuintuple(tuple(self.normals[i] for i in perm), self.m)


@dataclass(frozen=True)
class KernelBasis:
    b1: Vec
    b2: Vec

    def point(self, coords: Sequence[Fraction]) -> Vec:
        a, b = coords
        return tuple(a * x + b * y for x, y in zip(self.b1, self.b2))

    def functional(self, k: int) -> tuple[Fraction, Fraction]:
        """Coefficients of lam_k as a linear form in kernel coordinates."""
        return (self.b1[k], self.b2[k])

    def gram(self) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        g12 = dot(self.b1, self.b2)
        return ((dot(self.b1, self.b1), g12), (g12, dot(self.b2, self.b2)))


def left_kernel_U(q: PlaneQuintuple) -> KernelBasis:
    q.check_general_position()
    cols = [[u[j] for u in q.normals] for j in range(3)]
    basis = nullspace(cols, 5)
    if len(basis) != 2:
        raise GeneralPositionError("normals do not span 3-space")
    b1, b2 = (_clear_denominators(b) for b in basis)
    return KernelBasis(b1, b2)


def projection_direction(B: KernelBasis, k: int) -> tuple[Fraction, Fraction]:
    """Kernel coordinates of the orthogonal projection of e_k onto U (spans l_k)."""
    (g11, g12), (_, g22) = B.gram()
    f1, f2 = B.functional(k)
    if f1 == 0 and f2 == 0:
        raise DegenerateProjectionError(f"e_{k + 1} is orthogonal to U")
    det = g11 * g22 - g12 * g12
    return ((g22 * f1 - g12 * f2) / det, (-g12 * f1 + g11 * f2) / det)


def perp_direction(B: KernelBasis, k: int) -> tuple[Fraction, Fraction]:
    """A direction of l_k^perp = {lam in U : lam_k == 0}."""
    f1, f2 = B.functional(k)
    if f1 == 0 and f2 == 0:
        raise DegenerateProjectionError(f"e_{k + 1} is orthogonal to U")
    return (f2, -f1)


def positive_count(lam: Sequence[Fraction], skip: int) -> int:
    """Number of j != skip with lam_j > 0; raises if some such lam_j vanishes."""
    p = 0
    for j, x in enumerate(lam):
        if j == skip:
            continue
        if x == 0:
            raise DegenerateProfileError(f"lam_{j + 1} vanishes on l_{skip + 1}^perp")
        p += x > 0
    return p


@dataclass(frozen=True)
class PerpHalfline:
    """Half of l_k^perp with its count p of positive lam_j (j != k) and arrow sense.

    ``arrow`` is 'ccw' when the side where lam_k > 0 lies counter-clockwise
    of the half-line, 'cw' otherwise.
    """

    line: int
    direction: tuple[Fraction, Fraction]
    count: int
    arrow: str

    def to_json(self) -> dict:
        return {
            "line": self.line + 1,
            "direction": [str(x) for x in self.direction],
            "count": self.count,
            "arrow": self.arrow,
        }


def halfline_profiles(q: PlaneQuintuple, B: KernelBasis | None = None) -> list[PerpHalfline]:
    """Both halves of every l_k^perp; the halves of one line carry p and 4 - p."""
    B = B or left_kernel_U(q)
    out = []
    for k in range(5):
        d = perp_direction(B, k)
        f = B.functional(k)
        for s in (1, -1):
            h = (s * d[0], s * d[1])
            p = positive_count(B.point(h), k)
            tangent = (-h[1], h[0])
            arrow = "ccw" if dot(f, tangent) > 0 else "cw"
            out.append(PerpHalfline(k, h, p, arrow))
    return out


@dataclass(frozen=True)
class Crossing:
    """One of the ten quadruple-point crossings met by the loop (a half of some l_k).

    ``counts`` holds the simplex count on the clockwise and counter-clockwise
    side of the half-line. ``coorientation`` names the side that is positive
    for the crossed stratum, or None for a (2, 2) crossing.
    """

    line: int
    direction: tuple[Fraction, Fraction]
    degree: int
    counts: tuple[int, int]
    coorientation: str | None

    @property
    def symbol(self) -> Symbol:
        return Symbol("Q", max(self.counts), self.degree)

    def far_count(self, orientation: int = 1) -> int:
        """Count on the side the walk enters (ccw side for a ccw walk)."""
        return self.counts[1] if orientation > 0 else self.counts[0]

    def sign(self, orientation: int = 1, q2_sign: int = 1) -> int:
        if self.coorientation is None:
            return q2_sign
        entering = "ccw" if orientation > 0 else "cw"
        return 1 if self.coorientation == entering else -1

    def to_json(self) -> dict:
        return {
            "line": self.line + 1,
            "direction": [str(x) for x in self.direction],
            "degree": self.degree,
            "counts": {"cw": self.counts[0], "ccw": self.counts[1]},
            "coorientation": self.coorientation,
            "symbol": str(self.symbol),
            "sign": self.sign(),
        }


@dataclass(frozen=True)
class BifurcationDiagram:
    quintuple: PlaneQuintuple
    basis: KernelBasis
    crossings: tuple[Crossing, ...]
    perp: tuple[PerpHalfline, ...]

    @property
    def m(self) -> int:
        return self.quintuple.m

    def to_json(self) -> dict:
        return {
            "quintuple": self.quintuple.to_json(),
            "crossings": [c.to_json() for c in self.crossings],
            "perp_halflines": [h.to_json() for h in self.perp],
        }

    def structural_violations(self) -> list[str]:
        out = []
        if len(self.crossings) != 10:
            out.append(f"{len(self.crossings)} crossings instead of 10")
        for k in range(5):
            cs = [c for c in self.crossings if c.line == k]
            if len(cs) != 2:
                out.append(f"line {k + 1}: {len(cs)} crossings")
                continue
            a, b = cs
            if cross2(a.direction, b.direction) != 0 or dot(a.direction, b.direction) >= 0:
                out.append(f"line {k + 1}: crossings not antipodal")
            if sorted((a.degree, b.degree)) != [self.m - 1, self.m]:
                out.append(f"line {k + 1}: degree tags {a.degree}, {b.degree}")
            for c in cs:
                if sum(c.counts) != 4:
                    out.append(f"line {k + 1}: counts {c.counts} not complementary")
            hs = [h for h in self.perp if h.line == k]
            if len(hs) != 2 or hs[0].count + hs[1].count != 4:
                out.append(f"line {k + 1}: perp counts not complementary")
        arrows = [h.arrow for h in self.perp]
        if arrows.count("cw") != 5 or arrows.count("ccw") != 5:
            out.append(f"arrow balance {arrows.count('ccw')} ccw / {arrows.count('cw')} cw")
        return out


def bifurcation_diagram(q: PlaneQuintuple) -> BifurcationDiagram:
    B = left_kernel_U(q)
    perp = halfline_profiles(q, B)
    crossings = []
    for k in range(5):
        c = projection_direction(B, k)
        lam_k = dot(B.functional(k), c)
        assert lam_k > 0  # projection of e_k pairs positively with e_k
        halves = [h for h in perp if h.line == k]
        for s in (1, -1):
            h = (s * c[0], s * c[1])
            ccw_half = next(x for x in halves if cross2(h, x.direction) > 0)
            cw_half = next(x for x in halves if cross2(h, x.direction) < 0)
            counts = (cw_half.count, ccw_half.count)
            if counts[0] == counts[1]:
                coor = None
            else:
                coor = "ccw" if counts[1] > counts[0] else "cw"
            degree = q.m if s > 0 else q.m - 1
            crossings.append(Crossing(k, h, degree, counts, coor))
    crossings.sort(key=cmp_to_key(lambda a, b: angle_cmp(a.direction, b.direction)))
    perp.sort(key=cmp_to_key(lambda a, b: angle_cmp(a.direction, b.direction)))
    return BifurcationDiagram(q, B, tuple(crossings), tuple(perp))


@dataclass(frozen=True)
class QQCheck:
    raw: FormalSum
    reduced: FormalSum
    verdict: bool

    def to_json(self) -> dict:
        return {"raw": str(self.raw), "reduced": str(self.reduced), "verdict": self.verdict}


def reduce_mod_q2_torsion(x: FormalSum) -> FormalSum:
    """Reduce Q^2 coefficients modulo 2 (into {0, 1})."""
    return x.map_coefficients(lambda s, c: c % 2 if (s.family, s.sup) == ("Q", 2) else c)


def crossing_sum(d: BifurcationDiagram, orientation: int = 1, q2_sign: int = 1) -> FormalSum:
    """Signed sum of crossed strata along one loop (orientation +1 = counter-clockwise)."""
    order = d.crossings if orientation > 0 else tuple(reversed(d.crossings))
    return sum_normalize((c.sign(orientation, q2_sign), c.symbol) for c in order)


def crossing_sum_extended(d: BifurcationDiagram, orientation: int = 1) -> FormalSum:
    """Same sum written as +Q^p with p the count on the entered side, then canonicalized.

    Agrees with :func:`crossing_sum` (with the (2, 2) sign +1) because the
    positive side of the extended Q^a is the side carrying count a.
    """
    return sum_normalize((1, Symbol("Q", c.far_count(orientation), c.degree)) for c in d.crossings)


def qq_relation_check(d: BifurcationDiagram, orientation: int = 1, q2_sign: int = 1) -> QQCheck:
    """The loop sum must reduce to +-(Q^2_m - Q^2_{m-1}) modulo 2 Q^2."""
    raw = crossing_sum(d, orientation, q2_sign)
    reduced = reduce_mod_q2_torsion(raw)
    target = FormalSum({Symbol("Q", 2, d.m): 1, Symbol("Q", 2, d.m - 1): 1})
    return QQCheck(raw, reduced, reduced == target)


# --- simplex oracle and the interior lemma ------------------------------------------


def simplex_vertices(normals: Sequence[Vec], offsets: Sequence[Fraction]) -> list[Vec]:
    """Vertex opposite face i solves the three plane equations j != i."""
    verts = []
    for i in range(4):
        idx = [j for j in range(4) if j != i]
        verts.append(solve3([normals[j] for j in idx], [offsets[j] for j in idx]))
    return verts


def face_count_oracle(q: PlaneQuintuple, k: int, sample: Sequence[Fraction]) -> int:
    """Faces of the simplex cut by planes x.u_j = sample_j (j != k) having the simplex on their non-preferred side.

    Builds the four vertices explicitly; independent of any sign counting on U.
    """
    idx = [j for j in range(5) if j != k]
    normals = [q.normals[j] for j in idx]
    offsets = [Fraction(sample[j]) for j in idx]
    verts = simplex_vertices(normals, offsets)
    p = 0
    for i in range(4):
        # vertex i is off face i; its side is the simplex side
        side = dot(verts[i], normals[i]) - offsets[i]
        if side == 0:
            raise GeometryError("degenerate simplex: four planes concurrent")
        p += side < 0
    return p


def _relation_vector(vs: Sequence[Vec]) -> Vec:
    """The (up to scale unique) c with sum(c_i * v_i) == 0 for four vectors spanning 3-space."""
    cols = [[v[j] for v in vs] for j in range(3)]
    basis = nullspace(cols, 4)
    if len(basis) != 1:
        raise DependentTripleError("vectors do not span 3-space")
    return basis[0]


def check_bounded(vs: Sequence[Vec]) -> None:
    """``{x : x.v_k <= mu_k}`` is bounded iff some relation among the v_k has all coefficients of one sign."""
    c = _relation_vector(vs)
    signs = {_sign(x) for x in c}
    if 0 in signs or len(signs) != 1:
        raise UnboundedRegionError(f"relation {tuple(map(str, c))} has mixed or zero signs")


def barycentric(point: Vec, verts: Sequence[Vec]) -> Vec:
    """Coordinates t with sum t_i verts_i == point and sum t_i == 1."""
    base = verts[3]
    rows = [[verts[i][j] - base[j] for i in range(3)] for j in range(3)]
    t = solve3(rows, [point[j] - base[j] for j in range(3)])
    return t + (1 - sum(t),)


def lemma1_interior_check(vs: Sequence[Sequence], mus: Sequence) -> bool:
    """Origin lies strictly inside the simplex {x : x.v_k <= mu_k} when the v_k sum to zero and every mu_k > 0."""
    vs = [_vec(v) for v in vs]
    mus = [Fraction(m) for m in mus]
    if len(vs) != 4 or len(mus) != 4 or any(len(v) != 3 for v in vs):
        raise ValueError("four vectors in 3-space and four offsets required")
    if any(sum(v[j] for v in vs) != 0 for j in range(3)):
        raise NonZeroSumError("v_1 + ... + v_4 != 0")
    if any(det3(*(vs[i] for i in t)) == 0 for t in combinations(range(4), 3)):
        raise DependentTripleError("some three of the v_k are dependent")
    if any(m <= 0 for m in mus):
        raise NonPositiveOffsetError("offsets must be positive")
    check_bounded(vs)
    verts = simplex_vertices(vs, mus)
    origin = (Fraction(0),) * 3
    strictly_inside = all(dot(origin, v) < m for v, m in zip(vs, mus))
    in_hull = all(t > 0 for t in barycentric(origin, verts))
    return strictly_inside and in_hull


# --- classification ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class DiagramClass:
    """Cyclic sequence of (line label, arrow) pairs, minimized over relabelings and dihedral motions."""

    encoding: tuple[tuple[int, str], ...]

    def __str__(self) -> str:
        return " ".join(f"{k}{'+' if a == 'ccw' else '-'}" for k, a in self.encoding)


def _relabel(seq: Sequence[tuple[int, str]]) -> tuple[tuple[int, str], ...]:
    names: dict[int, int] = {}
    out = []
    for k, a in seq:
        if k not in names:
            names[k] = len(names) + 1
        out.append((names[k], a))
    return tuple(out)


def canonical_encoding(seq: Sequence[tuple[int, str]]) -> tuple[tuple[int, str], ...]:
    flip = {"ccw": "cw", "cw": "ccw"}
    n = len(seq)
    variants = []
    for r in range(n):
        rot = list(seq[r:]) + list(seq[:r])
        variants.append(_relabel(rot))
        mirrored = [(k, flip[a]) for k, a in reversed(rot)]
        variants.append(_relabel(mirrored))
    return min(variants)


def classify_diagram(d: BifurcationDiagram) -> DiagramClass:
    # first-appearance relabeling is the minimal relabeling for a fixed position,
    # so minimizing over dihedral motions covers the full symmetry orbit
    return DiagramClass(canonical_encoding([(h.line, h.arrow) for h in d.perp]))


# --- random input ------------------------------------------------------------------


def _random_rational(rng: random.Random, bound: int) -> Fraction:
    return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))


def random_quintuple(seed: int, bound: int, m: int = 0, max_attempts: int = MAX_ATTEMPTS) -> PlaneQuintuple:
    """Seeded rational quintuple in general position, by rejection sampling."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    rng = random.Random(seed)
    for _ in range(max_attempts):
        normals = tuple(tuple(_random_rational(rng, bound) for _ in range(3)) for _ in range(5))
        q = PlaneQuintuple(normals, m)
        if q.dependent_triples():
            continue
        try:
            bifurcation_diagram(q)
        except GeometryError:
            continue
        return q
    raise RejectionBudgetExceeded(f"no valid quintuple after {max_attempts} attempts (seed={seed}, bound={bound})")


def random_lemma1_input(seed: int, bound: int, max_attempts: int = MAX_ATTEMPTS) -> tuple[list[Vec], list[Fraction]]:
    """Seeded v_1..v_4 summing to zero with independent triples, and positive offsets."""
    if bound < 1:
        raise ValueError("bound must be at least 1")
    rng = random.Random(seed)
    for _ in range(max_attempts):
        vs = [tuple(_random_rational(rng, bound) for _ in range(3)) for _ in range(3)]
        vs.append(tuple(-sum(v[j] for v in vs) for j in range(3)))
        if any(det3(*(vs[i] for i in t)) == 0 for t in combinations(range(4), 3)):
            continue
        mus = [Fraction(rng.randint(1, bound), rng.randint(1, bound)) for _ in range(4)]
        return vs, mus
    raise RejectionBudgetExceeded(f"no valid input after {max_attempts} attempts")
