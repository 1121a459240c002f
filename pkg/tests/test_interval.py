from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from named import H, cross, diamond, nowhere_dense, square, triangle
from oracles import slice_points
from svfentropy.core import NotSurjectiveError, compose, evaluate, inverse, iterate
from svfentropy.interval import (IntervalSVF, PLHomeomorphism, canonical,
                                 check_hausdorff_continuity, compose_interval,
                                 conjugate_interval, discretize, evaluate_interval, from_pieces,
                                 graphs_equal, grid_coords, identity_interval, inverse_interval,
                                 merge_intervals)

Q = Fraction


# construction and validation

def test_slice_gap_rejected():
    with pytest.raises(ValueError, match="empty near"):
        IntervalSVF(segments=(((0, 0), (Q(1, 2), 0)), ((Q(3, 4), 0), (1, 1))))


def test_coordinates_outside_unit_square_rejected():
    with pytest.raises(ValueError, match="outside"):
        IntervalSVF(segments=(((0, 0), (1, 2)),))


def test_non_convex_polygon_rejected():
    with pytest.raises(ValueError, match="convex"):
        IntervalSVF(polygons=(((0, 0), (1, 0), (Q(1, 2), Q(1, 4)), (1, 1), (0, 1)),))


def test_from_pieces_sorts_pieces_by_kind():
    F = from_pieces([[(0, 0)], [(0, 0), (1, 1)], [(0, 0), (1, 0), (1, 1)],
                     [(0, 0), (Q(1, 2), Q(1, 2)), (1, 1)]])
    assert len(F.points) == 1 and len(F.segments) == 2 and len(F.polygons) == 1


# evaluation

def test_evaluate_diamond_quarter():
    assert evaluate(diamond(), Q(1, 4)) == [(Q(1, 4), Q(1, 4)), (Q(3, 4), Q(3, 4))]


def test_evaluate_nowhere_dense_endpoints():
    F = nowhere_dense()
    assert evaluate_interval(F, 0) == [(0, 0), (1, 1)]
    assert evaluate_interval(F, Q(1, 3)) == [(Q(1, 3), Q(1, 3))]


def test_evaluate_triangle_is_interval():
    assert evaluate_interval(triangle(), Q(2, 5)) == [(0, Q(2, 5))]


def test_evaluate_outside_unit_interval():
    with pytest.raises(ValueError, match="outside"):
        evaluate_interval(diamond(), Q(3, 2))


def test_merge_intervals_joins_touching():
    assert merge_intervals([(Q(1, 2), 1), (0, Q(1, 2)), (0, Q(1, 4))]) == [(0, 1)]


# algebra

def test_diamond_squared_is_both_diagonals():
    F2 = compose_interval(diamond(), diamond())
    assert graphs_equal(F2, cross())
    x = Q(1, 5)
    assert evaluate_interval(F2, x) == [(x, x), (1 - x, 1 - x)]


def test_compose_with_identity_interval():
    assert graphs_equal(compose(identity_interval(), diamond()), diamond())
    assert graphs_equal(compose(diamond(), identity_interval()), diamond())


def test_iterate_interval_zero_is_identity():
    assert graphs_equal(iterate(diamond(), 0), identity_interval())


def test_compose_polygon_inner_not_supported():
    with pytest.raises(NotImplementedError):
        compose_interval(diamond(), triangle())


def test_polygon_outer_composition():
    # F(x) = [0, x] after the identity is itself
    assert graphs_equal(compose_interval(triangle(), identity_interval()), triangle())


def test_inverse_of_diamond_is_diamond():
    assert graphs_equal(inverse(diamond()), diamond())


def test_inverse_of_identity():
    assert graphs_equal(inverse_interval(identity_interval()), identity_interval())


def test_inverse_needs_surjective_graph():
    F = IntervalSVF(segments=(((0, 0), (1, Q(1, 2))),))
    with pytest.raises(NotSurjectiveError):
        inverse_interval(F)


def test_canonical_merges_collinear_segments():
    F = IntervalSVF(segments=(((0, 0), (Q(1, 2), Q(1, 2))), ((Q(1, 4), Q(1, 4)), (1, 1))),
                    points=((Q(1, 2), Q(1, 2)),))
    assert canonical(F) == identity_interval()


def test_reflection_conjugates_diamond_to_itself():
    G = conjugate_interval(diamond(), PLHomeomorphism.reflection())
    assert graphs_equal(G, diamond())


def test_pl_homeomorphism_validation():
    with pytest.raises(ValueError):
        PLHomeomorphism(((0, 0), (Q(1, 2), Q(3, 4)), (1, Q(1, 2))))
    with pytest.raises(ValueError):
        PLHomeomorphism(((0, Q(1, 4)), (1, 1)))
    phi = PLHomeomorphism(((0, 0), (Q(1, 2), Q(1, 4)), (1, 1)))
    assert phi(Q(1, 4)) == Q(1, 8)


# discretization

def test_identity_grid_is_diagonal():
    D = discretize(identity_interval(), 5)
    assert np.array_equal(D.adj, np.eye(5, dtype=bool))


def test_triangle_grid_is_lower_triangular():
    D = discretize(triangle(), 3)
    assert np.array_equal(D.adj, np.tril(np.ones((3, 3), dtype=bool)))


def test_diamond_grid_rows():
    D = discretize(diamond(), 5)
    expected = [[0, 0, 1, 0, 0], [0, 1, 0, 1, 0], [1, 0, 0, 0, 1], [0, 1, 0, 1, 0], [0, 0, 1, 0, 0]]
    assert D.adj.astype(int).tolist() == expected


def test_nowhere_dense_grid_rows():
    D = discretize(nowhere_dense(), 9)
    expected = np.eye(9, dtype=bool)
    expected[0, 8] = expected[8, 0] = True
    assert np.array_equal(D.adj, expected)


def test_square_grid_is_full():
    assert discretize(square(), 8).adj.all()


def test_discretize_needs_two_points():
    with pytest.raises(ValueError):
        discretize(diamond(), 1)


# Hausdorff continuity

def test_diamond_is_hausdorff_continuous():
    rep = check_hausdorff_continuity(diamond(), 101, Q(1, 10))
    assert rep["flagged"] == []


def test_identity_is_hausdorff_continuous():
    assert check_hausdorff_continuity(identity_interval(), 101, Q(1, 10))["flagged"] == []


def test_nowhere_dense_flags_endpoints():
    rep = check_hausdorff_continuity(nowhere_dense(), 101, Q(1, 10))
    assert rep["flagged"] == [0, 1]
    assert rep["max_jump"] >= Q(98, 100)


# properties on random piecewise-linear graphs

@st.composite
def pl_maps(draw, max_breaks=4):
    """Continuous PL single-valued maps with breakpoints on a 1/12 lattice."""
    inner = draw(st.lists(st.integers(1, 11), max_size=max_breaks, unique=True))
    xs = [Q(0)] + [Q(v, 12) for v in sorted(inner)] + [Q(1)]
    ys = [Q(draw(st.integers(0, 12)), 12) for _ in xs]
    return from_pieces([((a, c), (b, d)) for a, b, c, d in zip(xs, xs[1:], ys, ys[1:])])


@st.composite
def graphs(draw):
    F = draw(pl_maps())
    extra = draw(st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), max_size=3))
    pts = tuple((Q(a, 12), Q(b, 12)) for a, b in extra)
    polys = ()
    if draw(st.booleans()):
        x0, x1 = sorted(draw(st.lists(st.integers(0, 12), min_size=2, max_size=2, unique=True)))
        y0 = draw(st.integers(0, 11))
        polys = (((Q(x0, 12), Q(y0, 12)), (Q(x1, 12), Q(y0, 12)), (Q(x1, 12), Q(y0 + 1, 12))),)
    return IntervalSVF(F.segments, F.points + pts, polys)


@given(graphs(), st.integers(2, 14))
def test_discretize_marks_every_grid_pair_of_the_graph(F, N):
    D = discretize(F, N)
    xs = grid_coords(N)
    for i, x in enumerate(xs):
        for piece in F.pieces():
            s = slice_points(piece, x)
            if s is None:
                continue
            for j, y in enumerate(xs):
                if s[0] <= y <= s[1]:
                    assert D.adj[i, j]


@given(graphs(), st.integers(2, 14), st.integers(0, 1000), st.integers(0, 1000))
def test_discretize_marks_graph_points_inside_open_cells(F, N, u, v):
    D = discretize(F, N)
    h = Q(1, N - 1)
    x = Q(u, 1000)
    idx = x / h
    i = round(idx)
    if abs(idx - i) == Q(1, 2):
        return
    for lo, hi in evaluate_interval(F, x):
        y = lo + (hi - lo) * Q(v, 1000)
        jdx = y / h
        j = round(jdx)
        if abs(jdx - j) != Q(1, 2):
            assert D.adj[i, j]


@given(pl_maps(), graphs(), st.integers(0, 60))
def test_compose_matches_pointwise_union(F, G, k):
    x = Q(k, 60)
    expected = merge_intervals(iv for lo, _ in evaluate_interval(F, x)
                               for iv in evaluate_interval(G, lo))
    assert evaluate_interval(compose_interval(G, F), x) == expected


@given(pl_maps())
def test_inverse_reflects_graph(F):
    try:
        Fi = inverse_interval(F)
    except NotSurjectiveError:
        return
    assert graphs_equal(inverse_interval(Fi), F)
    for k in range(13):
        x = Q(k, 12)
        for y, _ in evaluate_interval(F, x):
            assert any(lo <= x <= hi for lo, hi in evaluate_interval(Fi, y))


@given(graphs())
def test_canonical_preserves_slices(F):
    C = canonical(F)
    for k in range(25):
        x = Q(k, 24)
        assert evaluate_interval(C, x) == evaluate_interval(F, x)


def test_diamond_slices_at_half():
    assert evaluate_interval(diamond(), H) == [(0, 0), (1, 1)]
