"""Finite metric spaces and set-valued functions on them.

A set-valued function on a finite space is stored as a boolean adjacency
matrix: ``adj[i, j]`` is true when point ``j`` belongs to the image of
point ``i``.  Finite graphs are closed, so every such relation is upper
semi-continuous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Sequence

import numpy as np

TOL = 1e-12

Label = Hashable


class SpaceMismatchError(ValueError):
    pass


class NotSurjectiveError(ValueError):
    def __init__(self, label):
        super().__init__(f"point {label!r} has empty preimage")
        self.label = label


@dataclass(frozen=True, eq=False)
class MetricPointSet:
    """Labelled points with a symmetric distance matrix.

    ``coords`` is kept when the points live on the unit interval; it lets
    downstream geometry stay exact.  ``scale`` records the factor the raw
    distances were divided by during normalization.
    """

    labels: tuple
    dist: np.ndarray
    coords: tuple | None = None
    scale: float = 1.0
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        d = np.asarray(self.dist, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "dist", d)
        object.__setattr__(self, "labels", tuple(self.labels))
        m = len(self.labels)
        if d.shape != (m, m):
            raise ValueError(f"distance matrix has shape {d.shape}, expected {(m, m)}")
        if len(set(self.labels)) != m:
            raise ValueError("labels must be distinct")
        if m == 0:
            raise ValueError("a metric space needs at least one point")
        if np.any(d < -TOL):
            raise ValueError("distances must be non-negative")
        if np.any(np.abs(np.diag(d)) > TOL):
            raise ValueError("dist[i][i] must be 0")
        if np.any(np.abs(d - d.T) > TOL):
            raise ValueError("distance matrix must be symmetric")
        # triangle inequality: d[i,k] <= d[i,j] + d[j,k]
        if m <= 150:
            viol = d[:, None, :] - (d[:, :, None] + d[None, :, :])
            if np.any(viol > TOL):
                raise ValueError("distance matrix violates the triangle inequality")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(self.labels)})

    @classmethod
    def from_matrix(cls, labels: Sequence, dist, normalize: bool = True) -> MetricPointSet:
        d = np.array(dist, dtype=float)
        scale = 1.0
        if normalize and len(labels) >= 2:
            scale = float(d.max())
            if scale <= 0:
                raise ValueError("distinct points must have positive distance")
            d = d / scale
        return cls(tuple(labels), d, None, scale)

    @classmethod
    def from_coords(cls, coords: Sequence, labels: Sequence | None = None,
                    normalize: bool = True) -> MetricPointSet:
        """Points on the real line with ``d(x, y) = |x - y|``."""
        c = [Fraction(x) for x in coords]
        if labels is None:
            labels = tuple(range(len(c)))
        scale = Fraction(1)
        if normalize and len(c) >= 2:
            lo, hi = min(c), max(c)
            if hi == lo:
                raise ValueError("distinct points must have positive distance")
            scale = hi - lo
            c = [(x - lo) / scale for x in c]
        arr = np.array([float(x) for x in c])
        d = np.abs(arr[:, None] - arr[None, :])
        return cls(tuple(labels), d, tuple(c), float(scale))

    @classmethod
    def grid(cls, n: int) -> MetricPointSet:
        """The uniform grid ``i/(n-1)`` on [0, 1]."""
        if n < 2:
            raise ValueError("grid needs at least 2 points")
        return cls.from_coords([Fraction(i, n - 1) for i in range(n)], normalize=False)

    @classmethod
    def discrete(cls, labels: Sequence) -> MetricPointSet:
        m = len(labels)
        return cls(tuple(labels), 1.0 - np.eye(m))

    def __len__(self):
        return len(self.labels)

    def __eq__(self, other):
        if not isinstance(other, MetricPointSet):
            return NotImplemented
        return (self.labels == other.labels and self.dist.shape == other.dist.shape
                and bool(np.allclose(self.dist, other.dist, atol=TOL, rtol=0)))

    __hash__ = None

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown label {label!r}") from None

    def min_positive_distance(self) -> float:
        pos = self.dist[self.dist > TOL]
        return float(pos.min()) if pos.size else float("inf")

    def subspace(self, indices: Sequence[int]) -> MetricPointSet:
        idx = list(indices)
        coords = None if self.coords is None else tuple(self.coords[i] for i in idx)
        return MetricPointSet(tuple(self.labels[i] for i in idx),
                              self.dist[np.ix_(idx, idx)], coords, self.scale)

    def permuted(self, perm: Sequence[int]) -> MetricPointSet:
        """Same labels, metric transported so that ``d'(perm[i], perm[j]) = d(i, j)``."""
        inv = np.argsort(perm)
        return MetricPointSet(self.labels, self.dist[np.ix_(inv, inv)], None, self.scale)


@dataclass(frozen=True, eq=False)
class FiniteRelation:
    space: MetricPointSet
    adj: np.ndarray

    def __post_init__(self):
        a = np.array(self.adj, dtype=bool)
        a.setflags(write=False)
        object.__setattr__(self, "adj", a)
        m = len(self.space)
        if a.shape != (m, m):
            raise ValueError(f"adjacency has shape {a.shape}, expected {(m, m)}")
        empty = np.flatnonzero(~a.any(axis=1))
        if empty.size:
            raise ValueError(f"F({self.space.labels[empty[0]]!r}) is empty")

    @classmethod
    def from_images(cls, space: MetricPointSet, images: dict) -> FiniteRelation:
        m = len(space)
        adj = np.zeros((m, m), dtype=bool)
        for src, targets in images.items():
            i = space.index(src)
            for t in targets:
                adj[i, space.index(t)] = True
        return cls(space, adj)

    @classmethod
    def identity(cls, space: MetricPointSet) -> FiniteRelation:
        return cls(space, np.eye(len(space), dtype=bool))

    @classmethod
    def full(cls, space: MetricPointSet) -> FiniteRelation:
        m = len(space)
        return cls(space, np.ones((m, m), dtype=bool))

    def __len__(self):
        return len(self.space)

    def __eq__(self, other):
        if not isinstance(other, FiniteRelation):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.adj, other.adj))

    __hash__ = None

    @property
    def labels(self):
        return self.space.labels

    def image_indices(self, i: int) -> np.ndarray:
        return np.flatnonzero(self.adj[i])

    def int_matrix(self) -> np.ndarray:
        return self.adj.astype(np.int64)

    def successors(self) -> list[list[int]]:
        return [list(np.flatnonzero(row)) for row in self.adj]

    def restrict(self, indices: Sequence[int]) -> FiniteRelation:
        """Restriction to a subset of points.  Rows that would become empty raise."""
        idx = list(indices)
        return FiniteRelation(self.space.subspace(idx), self.adj[np.ix_(idx, idx)])


def evaluate(F, x):
    """Image ``F(x)``.

    For a :class:`FiniteRelation` ``x`` is a label and a set of labels is
    returned.  Interval functions are dispatched to
    :func:`svfentropy.interval.evaluate_interval`.
    """
    if isinstance(F, FiniteRelation):
        i = F.space.index(x)
        return {F.labels[j] for j in F.image_indices(i)}
    from .interval import IntervalSVF, evaluate_interval
    if isinstance(F, IntervalSVF):
        return evaluate_interval(F, x)
    raise TypeError(f"cannot evaluate {type(F).__name__}")


def _bool_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return (a.astype(np.int64) @ b.astype(np.int64)) > 0


def compose(G, F):
    """``G∘F``: first apply ``F``, then ``G``."""
    if isinstance(F, FiniteRelation) and isinstance(G, FiniteRelation):
        if F.space != G.space:
            raise SpaceMismatchError("codomain of F differs from domain of G")
        return FiniteRelation(F.space, _bool_product(F.adj, G.adj))
    from .interval import IntervalSVF, compose_interval
    if isinstance(F, IntervalSVF) and isinstance(G, IntervalSVF):
        return compose_interval(G, F)
    raise SpaceMismatchError(f"cannot compose {type(G).__name__} with {type(F).__name__}")


def iterate(F, k: int):
    if k < 0:
        raise ValueError("k must be non-negative")
    if isinstance(F, FiniteRelation):
        result = np.eye(len(F), dtype=bool)
        base = F.adj.copy()
        # repeated squaring; boolean products stay exact
        while k:
            if k & 1:
                result = _bool_product(result, base)
            base = _bool_product(base, base)
            k >>= 1
        return FiniteRelation(F.space, result)
    from .interval import IntervalSVF, identity_interval
    if isinstance(F, IntervalSVF):
        out = identity_interval()
        for _ in range(k):
            out = compose(F, out)
        return out
    raise TypeError(f"cannot iterate {type(F).__name__}")


def inverse(F):
    if isinstance(F, FiniteRelation):
        missing = np.flatnonzero(~F.adj.any(axis=0))
        if missing.size:
            raise NotSurjectiveError(F.labels[missing[0]])
        return FiniteRelation(F.space, F.adj.T)
    from .interval import IntervalSVF, inverse_interval
    if isinstance(F, IntervalSVF):
        return inverse_interval(F)
    raise TypeError(f"cannot invert {type(F).__name__}")


def image_mask(F: FiniteRelation, mask: np.ndarray) -> np.ndarray:
    return F.adj[np.asarray(mask, dtype=bool)].any(axis=0)


def surjective_core(F: FiniteRelation) -> tuple[FiniteRelation, list]:
    """Restrict ``F`` to ``C = ⋂ F^n(X)``.

    The images ``F^n(X)`` form a decreasing chain of subsets of a finite
    set, so the chain stabilises after at most ``|X|`` steps.
    """
    mask = np.ones(len(F), dtype=bool)
    while True:
        nxt = image_mask(F, mask)
        if np.array_equal(nxt, mask):
            break
        mask = nxt
    idx = list(np.flatnonzero(mask))
    return F.restrict(idx), [F.labels[i] for i in idx]


def hausdorff_distance(A: Iterable, B: Iterable, space: MetricPointSet) -> float:
    a = [space.index(x) for x in A]
    b = [space.index(x) for x in B]
    if not a or not b:
        raise ValueError("Hausdorff distance needs non-empty sets")
    sub = space.dist[np.ix_(a, b)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def relabel(F: FiniteRelation, perm: Sequence[int]) -> FiniteRelation:
    """Conjugate ``F`` by the permutation ``i -> perm[i]`` of point indices."""
    perm = list(perm)
    m = len(F)
    if sorted(perm) != list(range(m)):
        raise ValueError("phi is not a bijection of the point set")
    adj = np.zeros_like(F.adj)
    p = np.array(perm)
    adj[np.ix_(p, p)] = F.adj
    return FiniteRelation(F.space.permuted(perm), adj)
