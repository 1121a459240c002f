import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from named import fib, full2, identity
from oracles import brute_compose, brute_core
from strategies import relation_pairs, relations
from svfentropy.core import (FiniteRelation, MetricPointSet, NotSurjectiveError,
                             SpaceMismatchError, compose, evaluate, hausdorff_distance, inverse,
                             iterate, relabel, surjective_core)


# metric point sets

def test_coords_normalized_to_unit_diameter():
    s = MetricPointSet.from_coords([2, 3, 6])
    assert s.diameter == pytest.approx(1.0)
    assert s.scale == pytest.approx(4.0)
    assert s.coords == (0, 0.25, 1)


def test_matrix_normalized_to_unit_diameter():
    s = MetricPointSet.from_matrix("abc", [[0, 2, 4], [2, 0, 2], [4, 2, 0]])
    assert s.diameter == pytest.approx(1.0)
    assert s.dist[0, 1] == pytest.approx(0.5)


def test_single_point_skips_normalization():
    s = MetricPointSet.from_matrix(["p"], [[0]])
    assert s.scale == 1.0 and s.diameter == 0.0


@pytest.mark.parametrize("dist, msg", [
    ([[0, 1], [2, 0]], "symmetric"),
    ([[1, 1], [1, 0]], "dist"),
    ([[0, -1], [-1, 0]], "non-negative"),
    ([[0, 1, 5], [1, 0, 1], [5, 1, 0]], "triangle"),
])
def test_invalid_metrics_rejected(dist, msg):
    with pytest.raises(ValueError, match=msg):
        MetricPointSet.from_matrix(list(range(len(dist))), dist, normalize=False)


def test_duplicate_labels_rejected():
    with pytest.raises(ValueError, match="distinct"):
        MetricPointSet.from_coords([0, 1], labels=["a", "a"])


# relations

def test_empty_image_rejected():
    with pytest.raises(ValueError, match="empty"):
        FiniteRelation.from_images(MetricPointSet.from_coords([0, 1]), {0: [1]})


def test_adjacency_is_read_only():
    F = fib()
    with pytest.raises(ValueError):
        F.adj[0, 0] = True


def test_evaluate_fib():
    assert evaluate(fib(), 1) == {0, 1}
    assert evaluate(fib(), 0) == {1}


def test_evaluate_identity():
    F = identity(4)
    assert all(evaluate(F, x) == {x} for x in F.labels)


def test_evaluate_unknown_label():
    with pytest.raises(KeyError):
        evaluate(fib(), 7)


def test_compose_fib_square_is_full():
    F2 = compose(fib(), fib())
    assert evaluate(F2, 0) == {0, 1} and evaluate(F2, 1) == {0, 1}


def test_compose_with_identity():
    F = fib()
    assert compose(FiniteRelation.identity(F.space), F) == F
    assert compose(F, FiniteRelation.identity(F.space)) == F


def test_compose_space_mismatch():
    with pytest.raises(SpaceMismatchError):
        compose(fib(), identity(3))


def test_iterate_examples():
    G = full2()
    assert all(iterate(G, k) == G for k in range(1, 6))
    assert iterate(fib(), 0) == FiniteRelation.identity(fib().space)
    assert iterate(fib(), 2) == full2()
    with pytest.raises(ValueError):
        iterate(fib(), -1)


def test_inverse_fib_transposes():
    Fi = inverse(fib())
    assert evaluate(Fi, 0) == {1} and evaluate(Fi, 1) == {0, 1}


def test_inverse_identity():
    assert inverse(identity(3)) == identity(3)


def test_inverse_requires_surjective():
    space = MetricPointSet.from_coords([0, 1, 2])
    F = FiniteRelation.from_images(space, {0: [1], 1: [0, 1], 2: [0]})
    with pytest.raises(NotSurjectiveError, match="2"):
        inverse(F)


def test_surjective_core_example():
    space = MetricPointSet.from_coords([0, 1, 2])
    F = FiniteRelation.from_images(space, {2: [0], 0: [1], 1: [0, 1]})
    core, labels = surjective_core(F)
    assert labels == [0, 1]
    assert core.labels == (0, 1)


def test_surjective_core_of_surjective_is_everything():
    for F in (fib(), full2(), identity(3)):
        assert surjective_core(F)[1] == list(F.labels)


def test_hausdorff_examples():
    s = MetricPointSet.grid(5)
    assert hausdorff_distance([0], [4], s) == 1.0
    assert hausdorff_distance([0, 4], [0], s) == 1.0
    assert hausdorff_distance([1, 2], [1, 2], s) == 0.0
    with pytest.raises(ValueError):
        hausdorff_distance([], [1], s)


def test_relabel_rejects_non_bijection():
    with pytest.raises(ValueError, match="bijection"):
        relabel(fib(), [0, 0])


# properties

def _mat(F):
    return F.adj.tolist()


@given(relation_pairs(count=3))
def test_compose_associative(triple):
    F, G, H = triple
    assert compose(H, compose(G, F)) == compose(compose(H, G), F)


@given(relation_pairs(count=2))
def test_compose_matches_definition(pair):
    F, G = pair
    assert compose(G, F).adj.tolist() == brute_compose(_mat(G), _mat(F))


@given(relations(), st.integers(0, 4), st.integers(0, 4))
def test_iterate_additive(F, k, m):
    assert iterate(F, k + m) == compose(iterate(F, k), iterate(F, m))


@given(relations())
def test_inverse_involution_on_core(F):
    core, _ = surjective_core(F)
    assert inverse(inverse(core)) == core


@given(relations())
def test_core_is_invariant(F):
    core, labels = surjective_core(F)
    assert labels == [F.labels[i] for i in brute_core(_mat(F))]
    image = core.adj.any(axis=0)
    assert image.all()  # F(C) = C: every core point has a preimage in C


@given(relation_pairs(count=2), st.integers(1, 4))
def test_graph_inclusion_is_preserved_by_iterates(pair, k):
    F, G = pair
    G = FiniteRelation(G.space, G.adj | F.adj)
    assert not (iterate(F, k).adj & ~iterate(G, k).adj).any()


@given(relations(min_points=2))
def test_relabel_transports_metric(F):
    perm = list(reversed(range(len(F))))
    G = relabel(F, perm)
    for i in range(len(F)):
        for j in range(len(F)):
            assert G.adj[perm[i], perm[j]] == F.adj[i, j]
            assert G.space.dist[perm[i], perm[j]] == pytest.approx(F.space.dist[i, j])


@given(relations())
def test_hausdorff_is_zero_on_equal_images(F):
    for i, x in enumerate(F.labels):
        img = evaluate(F, x)
        assert hausdorff_distance(img, img, F.space) == 0.0


def test_numpy_adjacency_round_trip():
    F = fib()
    assert np.array_equal(F.int_matrix(), [[0, 1], [1, 1]])
