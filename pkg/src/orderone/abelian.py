"""Integer matrices, Smith/Hermite normal forms and finitely generated abelian groups.

Everything here is exact: entries are Python ints, so intermediate blow-up
during elimination is harmless.

>>> D, P, Q = smith_normal_form([[2, 0], [0, 3]])
>>> D.diagonal()
[1, 6]
>>> G, proj = presentation_quotient(2, [[1, -1]])
>>> str(G)
'Z'
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Iterator, Sequence


class IntMatrix:
    """Immutable dense integer matrix.

    The column count is stored separately so that a matrix with zero rows
    still knows how wide it is (an empty relation list on ``n`` generators).
    """

    __slots__ = ("_rows", "_ncols")

    def __init__(self, rows: Iterable[Iterable[int]] = (), ncols: int | None = None):
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if ncols is None:
            if not data:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(data[0])
        if ncols < 0:
            raise ValueError("negative column count")
        for row in data:
            if len(row) != ncols:
                raise ValueError(f"ragged matrix: expected {ncols} columns, got {len(row)}")
        self._rows = data
        self._ncols = ncols

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(([int(i == j) for j in range(n)] for i in range(n)), ncols=n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "IntMatrix":
        return cls(([0] * ncols for _ in range(nrows)), ncols=ncols)

    @classmethod
    def diag(cls, entries: Sequence[int], nrows: int | None = None, ncols: int | None = None) -> "IntMatrix":
        nrows = len(entries) if nrows is None else nrows
        ncols = len(entries) if ncols is None else ncols
        rows = [[0] * ncols for _ in range(nrows)]
        for i, d in enumerate(entries):
            rows[i][i] = d
        return cls(rows, ncols=ncols)

    @property
    def nrows(self) -> int:
        return len(self._rows)

    @property
    def ncols(self) -> int:
        return self._ncols

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), self._ncols)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def row(self, i: int) -> tuple[int, ...]:
        return self._rows[i]

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return iter(self._rows)

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, j = idx
        return self._rows[i][j]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._ncols == other._ncols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._ncols, self._rows))

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()!r}, ncols={self._ncols})"

    def transpose(self) -> "IntMatrix":
        return IntMatrix(zip(*self._rows), ncols=self.nrows) if self._rows else IntMatrix.zeros(self._ncols, 0)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self._ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other._rows)) if other._rows else [()] * other.ncols
        return IntMatrix(
            ([sum(a * b for a, b in zip(row, col)) for col in cols] for row in self._rows),
            ncols=other.ncols,
        )

    def vecmul(self, v: Sequence[int]) -> list[int]:
        """Row vector times matrix."""
        if len(v) != self.nrows:
            raise ValueError("vector length does not match row count")
        out = [0] * self._ncols
        for c, row in zip(v, self._rows):
            if c:
                for j, a in enumerate(row):
                    out[j] += c * a
        return out

    def diagonal(self) -> list[int]:
        return [self._rows[i][i] for i in range(min(self.shape))]

    def is_diagonal(self) -> bool:
        return all(x == 0 for i, row in enumerate(self._rows) for j, x in enumerate(row) if i != j)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        n = self.nrows
        if n != self._ncols:
            raise ValueError("determinant of a non-square matrix")
        if n == 0:
            return 1
        a = self.tolist()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
                if swap is None:
                    return 0
                a[k], a[swap] = a[swap], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


def as_int_matrix(A, ncols: int | None = None) -> IntMatrix:
    """Coerce nested sequences (or an IntMatrix) to an IntMatrix."""
    if isinstance(A, IntMatrix):
        if ncols is not None and A.ncols != ncols:
            raise ValueError(f"expected {ncols} columns, got {A.ncols}")
        return A
    return IntMatrix(A, ncols=ncols)


def matrix_to_json(A: IntMatrix, labels: Sequence[str]) -> str:
    if len(labels) != A.ncols:
        raise ValueError("one label per column required")
    return json.dumps({"cols": list(labels), "rows": A.tolist()})


def matrix_from_json(text: str) -> tuple[IntMatrix, list[str]]:
    data = json.loads(text)
    labels = [str(c) for c in data["cols"]]
    rows = data["rows"]
    for row in rows:
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise ValueError("relation matrix entries must be integers")
    return IntMatrix(rows, ncols=len(labels)), labels


# --- Smith normal form -------------------------------------------------------


def smith_normal_form(A) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(D, P, Q)`` with ``P @ A @ Q == D``.

    ``D`` is diagonal with nonnegative entries d_1 | d_2 | ... (zeros last),
    ``P`` and ``Q`` are unimodular. Pivots are chosen by smallest absolute
    value.
    """
    A = as_int_matrix(A)
    m, n = A.shape
    D = A.tolist()
    P = IntMatrix.identity(m).tolist()
    Q = IntMatrix.identity(n).tolist()

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for M in (D, Q):
            for row in M:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        for M in (D, P):
            rs, rd = M[src], M[dst]
            for c in range(len(rd)):
                rd[c] += k * rs[c]

    def add_col(dst, src, k):
        for M in (D, Q):
            for row in M:
                row[dst] += k * row[src]

    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = D[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)

        while True:
            done = True
            for i in range(t + 1, m):
                if D[i][t]:
                    add_row(i, t, -(D[i][t] // D[t][t]))
            for j in range(t + 1, n):
                if D[t][j]:
                    add_col(j, t, -(D[t][j] // D[t][t]))
            # leftover remainders: bring the smallest one to the pivot
            best = None
            for i in range(t + 1, m):
                if D[i][t] and (best is None or abs(D[i][t]) < best[0]):
                    best = (abs(D[i][t]), "r", i)
            for j in range(t + 1, n):
                if D[t][j] and (best is None or abs(D[t][j]) < best[0]):
                    best = (abs(D[t][j]), "c", j)
            if best is not None:
                done = False
                if best[1] == "r":
                    swap_rows(t, best[2])
                else:
                    swap_cols(t, best[2])
                continue
            # divisibility: pivot must divide the remaining block
            p = D[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % p),
                None,
            )
            if bad is not None:
                add_row(t, bad, 1)
                done = False
            if done:
                break

        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            P[t] = [-x for x in P[t]]

    return IntMatrix(D, ncols=n), IntMatrix(P, ncols=m), IntMatrix(Q, ncols=n)


def invariant_factors(A) -> list[int]:
    """Nonzero diagonal of the Smith form."""
    D, _, _ = smith_normal_form(A)
    return [d for d in D.diagonal() if d]


# --- Hermite normal form / lattice membership ---------------------------------


def hermite_normal_form(A) -> IntMatrix:
    """Canonical row-echelon basis of the lattice spanned by the rows of ``A``.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)`` and zero
    rows are dropped, so two matrices span the same lattice iff their forms
    are equal.
    """
    A = as_int_matrix(A)
    rows = [list(r) for r in A if any(r)]
    n = A.ncols
    r = 0
    for col in range(n):
        while True:
            nz = [i for i in range(r, len(rows)) if rows[i][col]]
            if not nz:
                break
            piv = min(nz, key=lambda i: abs(rows[i][col]))
            rows[r], rows[piv] = rows[piv], rows[r]
            if len(nz) == 1:
                break
            p = rows[r][col]
            for i in range(r + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // p
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
        if r < len(rows) and rows[r][col]:
            if rows[r][col] < 0:
                rows[r] = [-a for a in rows[r]]
            p = rows[r][col]
            for i in range(r):
                q = rows[i][col] // p
                if q:
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[r])]
            r += 1
            rows = rows[:r] + [row for row in rows[r:] if any(row)]
    return IntMatrix(rows[:r], ncols=n)


def row_spans_equal(A, B) -> bool:
    A, B = as_int_matrix(A), as_int_matrix(B)
    if A.ncols != B.ncols:
        raise ValueError("matrices must have the same number of columns")
    return hermite_normal_form(A) == hermite_normal_form(B)


def solve_in_row_span(v: Sequence[int], A) -> list[int] | None:
    """Integer coefficients ``x`` with ``x @ A == v``, or None if ``v`` is not in the row lattice.

    Solved through the Smith form, independently of :func:`hermite_normal_form`.
    """
    A = as_int_matrix(A)
    if len(v) != A.ncols:
        raise ValueError("vector length does not match column count")
    D, P, Q = smith_normal_form(A)
    w = Q.vecmul(list(v)) if A.ncols else []  # v @ Q
    y = [0] * A.nrows
    diag = D.diagonal()
    for i, wi in enumerate(w):
        d = diag[i] if i < len(diag) else 0
        if d == 0:
            if wi:
                return None
        elif wi % d:
            return None
        else:
            y[i] = wi // d
    return P.vecmul(y) if A.nrows else []


# --- finitely generated abelian groups ----------------------------------------


@dataclass(frozen=True)
class GroupSpec:
    """``Z^free_rank + Z/d_1 + ... + Z/d_k`` with d_1 | d_2 | ... and every d_i >= 2."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion factors must be >= 2, got {d}")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"divisibility chain broken: {a} does not divide {b}")

    @classmethod
    def from_cyclic(cls, orders: Iterable[int]) -> "GroupSpec":
        """Direct sum of cyclic groups; order 0 means Z, order 1 is trivial."""
        orders = list(orders)
        if any(o < 0 for o in orders):
            raise ValueError("cyclic orders must be nonnegative")
        free = sum(1 for o in orders if o == 0)
        finite = [o for o in orders if o > 1]
        if not finite:
            return cls(free, ())
        facs = invariant_factors(IntMatrix.diag(finite))
        return cls(free, tuple(d for d in facs if d > 1))

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse ``"0,2"`` style specs: comma-separated cyclic orders, 0 for Z."""
        parts = [p.strip() for p in text.split(",")]
        if not text.strip() or not all(p.lstrip("-").isdigit() for p in parts):
            raise ValueError(f"cannot parse group spec {text!r}")
        return cls.from_cyclic(int(p) for p in parts)

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def orders(self) -> tuple[int, ...]:
        """Order of each coordinate generator, 0 for free ones."""
        return self.torsion + (0,) * self.free_rank

    def is_finite(self) -> bool:
        return self.free_rank == 0

    def order(self) -> int | None:
        if not self.is_finite():
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def zero(self) -> "GroupElement":
        return GroupElement(self, (0,) * self.ngens)

    def element(self, coords: Sequence[int]) -> "GroupElement":
        return GroupElement(self, tuple(coords))

    def generator(self, i: int) -> "GroupElement":
        return GroupElement(self, tuple(int(i == j) for j in range(self.ngens)))

    def elements(self) -> Iterator["GroupElement"]:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        for coords in itertools.product(*(range(d) for d in self.torsion)):
            yield GroupElement(self, coords)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        for d, grp in itertools.groupby(self.torsion):
            k = len(list(grp))
            parts.append(f"Z/{d}" if k == 1 else f"(Z/{d})^{k}")
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class GroupElement:
    group: GroupSpec
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.group.ngens:
            raise ValueError(f"expected {self.group.ngens} coordinates, got {len(self.coords)}")
        object.__setattr__(
            self,
            "coords",
            tuple(c % d if d else int(c) for c, d in zip(self.coords, self.group.orders)),
        )

    def _check(self, other: "GroupElement"):
        if other.group != self.group:
            raise ValueError("elements belong to different groups")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.group, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement(self.group, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement(self.group, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "GroupElement":
        return GroupElement(self.group, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __bool__(self) -> bool:
        return not self.is_zero()


def presentation_quotient(generator_count: int, relations) -> tuple[GroupSpec, list[GroupElement]]:
    """Invariant-factor form of ``Z^n / rowspan(relations)`` and the image of each generator."""
    R = as_int_matrix(relations, ncols=generator_count)
    D, _, Q = smith_normal_form(R)
    diag = [d for d in D.diagonal() if d]
    rank = len(diag)
    kept = [(i, d) for i, d in enumerate(diag) if d != 1]
    group = GroupSpec(generator_count - rank, tuple(d for _, d in kept))
    cols = [i for i, _ in kept] + list(range(rank, generator_count))
    proj = [group.element([Q[j, c] for c in cols]) for j in range(generator_count)]
    return group, proj


def generates(elements: Iterable[GroupElement], group: GroupSpec) -> bool:
    """True iff the given elements generate ``group``."""
    rows = [list(e.coords) for e in elements]
    for i, d in enumerate(group.torsion):
        rows.append([d if j == i else 0 for j in range(group.ngens)])
    if group.ngens == 0:
        return True
    Q, _ = presentation_quotient(group.ngens, rows)
    return Q.ngens == 0


def torsion_two_subgroup(G: GroupSpec) -> GroupSpec:
    """``{x : 2x = 0}``: one Z/2 per even invariant factor."""
    return GroupSpec(0, (2,) * sum(1 for d in G.torsion if d % 2 == 0))


def hom_group(S: GroupSpec, T: GroupSpec) -> GroupSpec:
    """Hom(S, T) from Hom(Z, T) = T and Hom(Z/d, T) = T[d]."""
    orders: list[int] = []
    for d in S.orders:
        if d == 0:
            orders.extend(T.orders)
        else:
            orders.extend(gcd(d, e) for e in T.torsion)
    return GroupSpec.from_cyclic(orders)


@dataclass(frozen=True)
class Homomorphism:
    source: GroupSpec
    target: GroupSpec
    images: tuple[GroupElement, ...]

    def __post_init__(self):
        if len(self.images) != self.source.ngens:
            raise ValueError("one image per source generator required")
        for img in self.images:
            if img.group != self.target:
                raise ValueError("image outside the target group")

    def __call__(self, x: GroupElement) -> GroupElement:
        if x.group != self.source:
            raise ValueError("element outside the source group")
        out = self.target.zero()
        for c, img in zip(x.coords, self.images):
            if c:
                out = out + c * img
        return out

    def is_well_defined(self) -> bool:
        return all((d * img).is_zero() for d, img in zip(self.source.torsion, self.images))


def enumerate_homs(S: GroupSpec, T: GroupSpec) -> list[Homomorphism]:
    """Every homomorphism S -> T, each exactly once, for finite T."""
    if not T.is_finite():
        raise ValueError(f"cannot enumerate homomorphisms into the infinite group {T}")
    elems = list(T.elements())
    choices = []
    for d in S.orders:
        if d == 0:
            choices.append(elems)
        else:
            choices.append([x for x in elems if (d * x).is_zero()])
    return [Homomorphism(S, T, tuple(imgs)) for imgs in itertools.product(*choices)]
