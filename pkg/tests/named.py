"""Named systems built directly through the API."""

from fractions import Fraction

from svfentropy.core import FiniteRelation, MetricPointSet
from svfentropy.interval import IntervalSVF, from_pieces

H = Fraction(1, 2)


def two_point():
    return MetricPointSet.from_coords([0, 1])


def fib():
    return FiniteRelation.from_images(two_point(), {0: [1], 1: [0, 1]})


def full2():
    return FiniteRelation.full(two_point())


def full(m):
    return FiniteRelation.full(MetricPointSet.from_coords(range(m)))


def identity(m):
    if m == 1:
        return FiniteRelation.identity(MetricPointSet.discrete([0]))
    return FiniteRelation.identity(MetricPointSet.from_coords(range(m)))


def period3():
    third = Fraction(1, 3)
    space = MetricPointSet.from_coords([0, third, 2 * third, 1], labels=["0", "1/3", "2/3", "1"])
    return FiniteRelation.from_images(space, {"0": ["0"], "1/3": ["0", "2/3"],
                                              "2/3": ["0", "1"], "1": ["0", "1/3"]})


def diamond():
    return from_pieces([((0, H), (H, 0)), ((H, 0), (1, H)), ((0, H), (H, 1)), ((H, 1), (1, H))])


def nowhere_dense():
    return IntervalSVF(segments=(((0, 0), (1, 1)),), points=((0, 1), (1, 0)))


def triangle():
    return IntervalSVF(polygons=(((0, 0), (1, 0), (1, 1)),))


def square():
    return IntervalSVF(polygons=(((0, 0), (1, 0), (1, 1), (0, 1)),))


def cross():
    """Both diagonals: the graph of the diamond composed with itself."""
    return from_pieces([((0, 0), (1, 1)), ((0, 1), (1, 0))])
