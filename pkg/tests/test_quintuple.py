import itertools
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings, strategies as st

from orderone.quintuple import (
    DependentTripleError,
    GeneralPositionError,
    NonPositiveOffsetError,
    NonZeroSumError,
    PlaneQuintuple,
    RejectionBudgetExceeded,
    UnboundedRegionError,
    bifurcation_diagram,
    canonical_encoding,
    check_bounded,
    classify_diagram,
    det3,
    crossing_sum,
    crossing_sum_extended,
    face_count_oracle,
    halfline_profiles,
    left_kernel_U,
    lemma1_interior_check,
    qq_relation_check,
    random_lemma1_input,
    random_quintuple,
)
from orderone.symbols import FormalSum, Symbol

F = Fraction
EXAMPLE = PlaneQuintuple(((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, 3)))


def _in_kernel(q, lam):
    return all(sum(l * u[j] for l, u in zip(lam, q.normals)) == 0 for j in range(3))


def test_kernel_example():
    B = left_kernel_U(EXAMPLE)
    assert _in_kernel(EXAMPLE, B.b1) and _in_kernel(EXAMPLE, B.b2)
    minors = [B.b1[i] * B.b2[j] - B.b1[j] * B.b2[i] for i, j in itertools.combinations(range(5), 2)]
    assert any(minors)
    # (1,1,1,-1,0) and (1,2,3,0,-1) are relations by inspection; both lie in the span
    for lam in ((1, 1, 1, -1, 0), (1, 2, 3, 0, -1)):
        assert _in_kernel(EXAMPLE, lam)
        # rank of [b1; b2; lam] stays 2: every 3x3 minor vanishes
        for cols in itertools.combinations(range(5), 3):
            assert det3(*[[r[c] for c in cols] for r in (B.b1, B.b2, lam)]) == 0


def test_general_position_rejected():
    q = PlaneQuintuple(((1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 0), (1, 2, 3)))
    assert (0, 1, 3) in q.dependent_triples()
    with pytest.raises(GeneralPositionError):
        bifurcation_diagram(q)
    with pytest.raises(ValueError):
        PlaneQuintuple(((1, 0, 0),) * 4)


def test_face_oracle_example():
    # x=1, y=1, z=1, x+y+z=-1: the simplex lies below three planes and above one
    sample = (1, 1, 1, -1, 0)
    assert face_count_oracle(EXAMPLE, 4, sample) == 3
    assert face_count_oracle(EXAMPLE, 4, tuple(-x for x in sample)) == 1


@pytest.mark.parametrize("seed", range(40))
def test_profiles_match_oracle(seed):
    q = random_quintuple(seed, 20)
    d = bifurcation_diagram(q)
    for h in d.perp:
        assert face_count_oracle(q, h.line, d.basis.point(h.direction)) == h.count
    for c in d.crossings:
        cw, ccw = c.counts
        # step off l_k along the perpendicular direction on each side
        for s, expected in ((1, ccw), (-1, cw)):
            nrm = (-c.direction[1] * s, c.direction[0] * s)
            pt = (c.direction[0] + F(1, 10**6) * nrm[0], c.direction[1] + F(1, 10**6) * nrm[1])
            assert face_count_oracle(q, c.line, d.basis.point(pt)) == expected


@pytest.mark.parametrize("seed", range(40))
def test_structure(seed):
    d = bifurcation_diagram(random_quintuple(seed, 20, m=seed % 5 - 2))
    assert d.structural_violations() == []
    assert len(d.crossings) == 10
    degrees = sorted(c.degree for c in d.crossings)
    assert degrees == [d.m - 1] * 5 + [d.m] * 5
    for h in d.perp:
        partner = next(x for x in d.perp if x.line == h.line and x is not h)
        assert h.count + partner.count == 4 and h.arrow != partner.arrow
    for c in d.crossings:
        assert c.symbol == Symbol("Q", max(c.counts), c.degree)
        assert (c.coorientation is None) == (c.counts == (2, 2))


@pytest.mark.parametrize("seed", range(60))
def test_qq_relation(seed):
    q = random_quintuple(seed, 20, m=1)
    d = bifurcation_diagram(q)
    r = qq_relation_check(d)
    assert r.verdict
    assert r.reduced == FormalSum.of((1, "Q^2_0"), (1, "Q^2_1"))
    assert crossing_sum_extended(d) == r.raw
    assert qq_relation_check(d, q2_sign=-1).verdict
    back = qq_relation_check(d, orientation=-1)
    assert back.verdict and back.reduced == r.reduced
    assert crossing_sum(d, orientation=-1, q2_sign=-1) == -r.raw
    assert crossing_sum_extended(d, orientation=-1) == crossing_sum(d, orientation=-1)


def _rotation(a, b, c, d):
    n = a * a + b * b + c * c + d * d
    R = [
        [a * a + b * b - c * c - d * d, 2 * (b * c - a * d), 2 * (b * d + a * c)],
        [2 * (b * c + a * d), a * a - b * b + c * c - d * d, 2 * (c * d - a * b)],
        [2 * (b * d - a * c), 2 * (c * d + a * b), a * a - b * b - c * c + d * d],
    ]
    return [[F(x, n) for x in row] for row in R]


@pytest.mark.parametrize("seed", range(25))
def test_invariances(seed):
    q = random_quintuple(seed, 12)
    d = bifurcation_diagram(q)
    cls = classify_diagram(d)

    scaled = PlaneQuintuple(tuple(tuple(F(seed % 7 + 1, j + 2) * x for x in u) for j, u in enumerate(q.normals)))
    perm = [(seed + 2 * i) % 5 for i in range(5)]
    R = _rotation(1 + seed % 3, 2, -1, seed % 4)
    rotated = PlaneQuintuple(tuple(tuple(sum(R[i][j] * u[j] for j in range(3)) for i in range(3)) for u in q.normals))

    for other in (scaled, q.relabeled(perm), rotated):
        e = bifurcation_diagram(other)
        assert qq_relation_check(e).verdict
        assert classify_diagram(e) == cls


@pytest.mark.parametrize("seed", range(25))
def test_class_is_orbit_invariant(seed):
    seq = [(h.line, h.arrow) for h in bifurcation_diagram(random_quintuple(seed, 20)).perp]
    base = canonical_encoding(seq)
    flip = {"cw": "ccw", "ccw": "cw"}
    for r in range(10):
        rot = seq[r:] + seq[:r]
        assert canonical_encoding(rot) == base
        assert canonical_encoding([(k, flip[a]) for k, a in reversed(rot)]) == base
        assert canonical_encoding([((k + r) % 5, a) for k, a in rot]) == base


def test_burnside_four_classes():
    # antipodal halves of a line carry opposite arrows, so 2^5 patterns
    flip = {"cw": "ccw", "ccw": "cw"}
    patterns = []
    for arrows in itertools.product(("cw", "ccw"), repeat=5):
        patterns.append(tuple(arrows) + tuple(flip[a] for a in arrows))
    # orbits of arrow strings under rotation and mirror-with-flip
    seen, orbits = set(), 0
    for p in patterns:
        if p in seen:
            continue
        orbits += 1
        stack = [p]
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            stack.append(x[1:] + x[:1])
            stack.append(tuple(flip[a] for a in reversed(x)))
    assert orbits == 4
    encs = {canonical_encoding([(i % 5, a) for i, a in enumerate(p)]) for p in patterns}
    assert len(encs) == 4


def test_lemma1_examples():
    vs = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)]
    assert lemma1_interior_check(vs, [1, 1, 1, 1])
    assert lemma1_interior_check(vs, [F(1, 100), 5, 7, F(1, 3)])
    with pytest.raises(NonZeroSumError):
        lemma1_interior_check([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, 0)], [1] * 4)
    with pytest.raises(DependentTripleError):
        lemma1_interior_check([(1, 0, 0), (0, 1, 0), (-1, -1, 0), (0, 0, 0)], [1] * 4)
    with pytest.raises(NonPositiveOffsetError):
        lemma1_interior_check(vs, [1, 0, 1, 1])
    with pytest.raises(UnboundedRegionError):
        check_bounded([(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, 0)])


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.tuples(*[st.integers(-9, 9)] * 3), min_size=3, max_size=3),
    st.lists(st.fractions(min_value=F(1, 50), max_value=50), min_size=4, max_size=4),
)
def test_lemma1_property(vs, mus):
    vs = list(vs) + [tuple(-sum(v[j] for v in vs) for j in range(3))]
    try:
        check = lemma1_interior_check(vs, mus)
    except DependentTripleError:
        assume(False)
    assert check


def test_random_inputs():
    assert random_quintuple(5, 20) == random_quintuple(5, 20)
    assert random_quintuple(5, 20) != random_quintuple(6, 20)
    for s in range(1000):
        assert not random_quintuple(s, 20).dependent_triples()
    with pytest.raises(ValueError):
        random_quintuple(0, 0)
    with pytest.raises(RejectionBudgetExceeded):
        for s in range(200):
            random_quintuple(s, 1, max_attempts=1)
    vs, mus = random_lemma1_input(3, 10)
    assert lemma1_interior_check(vs, mus)


def test_quintuple_json_roundtrip():
    q = random_quintuple(11, 20, m=2)
    assert PlaneQuintuple.from_json(q.to_json()) == q
    with pytest.raises(ValueError):
        PlaneQuintuple.from_json('{"normals": [["1/0", 0, 0]]}')
    with pytest.raises(ValueError):
        PlaneQuintuple.from_json("{}")


def test_profiles_on_example():
    hs = halfline_profiles(EXAMPLE)
    assert len(hs) == 10
    assert sorted(h.arrow for h in hs) == ["ccw"] * 5 + ["cw"] * 5
