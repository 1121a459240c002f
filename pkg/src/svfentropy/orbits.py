"""n-orbit spaces of finite relations, their metrics and projections."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .core import FiniteRelation, MetricPointSet

DEFAULT_CAP = 10**7


class OrbitCapExceeded(RuntimeError):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} orbits exceed the enumeration cap {cap}")
        self.count = count
        self.cap = cap


@dataclass(frozen=True)
class OrbitBlock:
    """``Orb_n`` of a relation, either as explicit index sequences or just its size."""

    n: int
    mode: str
    source: FiniteRelation
    count: int
    sequences: tuple | None = None
    start: tuple | None = None

    def __len__(self):
        return self.count

    def as_array(self) -> np.ndarray:
        if self.sequences is None:
            raise ValueError("orbit block is in counted mode")
        return np.array(self.sequences, dtype=np.int64).reshape(self.count, self.n)

    def labelled(self) -> list[tuple]:
        labels = self.source.labels
        return [tuple(labels[i] for i in seq) for seq in self.sequences]


def _start_indices(F: FiniteRelation, start) -> list[int]:
    if start is None:
        return list(range(len(F)))
    idx = sorted({F.space.index(s) for s in start})
    if not idx:
        raise ValueError("start set is empty")
    return idx


def count_sequence(F: FiniteRelation, n_max: int, start=None) -> list[int]:
    """Exact ``|Orb_n|`` for ``n = 1..n_max`` with Python integers."""
    if n_max < 1:
        raise ValueError("n must be at least 1")
    succ = F.successors()
    starts = _start_indices(F, start)
    # v[i] = number of k-step paths leaving i
    v = [1] * len(F)
    out = [len(starts)]
    for _ in range(n_max - 1):
        v = [sum(v[j] for j in s) for s in succ]
        out.append(sum(v[i] for i in starts))
    return out


def count_orbits(F: FiniteRelation, n: int, start=None) -> int:
    return count_sequence(F, n, start)[-1]


def enumerate_orbits(F: FiniteRelation, n: int, start=None, cap: int = DEFAULT_CAP) -> OrbitBlock:
    if n < 1:
        raise ValueError("n must be at least 1")
    starts = _start_indices(F, start)
    total = count_orbits(F, n, None if start is None else [F.labels[i] for i in starts])
    if total > cap:
        raise OrbitCapExceeded(total, cap)
    succ = F.successors()
    seqs: list[tuple] = [(i,) for i in starts]
    for _ in range(n - 1):
        seqs = [s + (j,) for s in seqs for j in succ[s[-1]]]
    return OrbitBlock(n, "explicit", F, len(seqs), tuple(seqs),
                      None if start is None else tuple(starts))


def orbit_block(F: FiniteRelation, n: int, start=None, cap: int = DEFAULT_CAP) -> OrbitBlock:
    """Explicit block when it fits under ``cap``, otherwise a counted summary."""
    try:
        return enumerate_orbits(F, n, start, cap)
    except OrbitCapExceeded as exc:
        st = None if start is None else tuple(_start_indices(F, start))
        return OrbitBlock(n, "counted", F, exc.count, None, st)


def orbit_distance_D(u: Sequence[int], v: Sequence[int], space: MetricPointSet) -> float:
    if len(u) != len(v):
        raise ValueError(f"orbit lengths differ: {len(u)} vs {len(v)}")
    return float(max(space.dist[a, b] for a, b in zip(u, v))) if len(u) else 0.0


def pairwise_D(orbits: np.ndarray, space: MetricPointSet) -> np.ndarray:
    """Matrix of ``D`` distances between all rows of an ``(M, n)`` index array."""
    m = orbits.shape[0]
    out = np.zeros((m, m))
    for c in range(orbits.shape[1]):
        col = orbits[:, c]
        np.maximum(out, space.dist[np.ix_(col, col)], out=out)
    return out


@dataclass(frozen=True)
class TruncatedForwardOrbit:
    entries: tuple

    @property
    def depth(self) -> int:
        return len(self.entries) - 1


def truncation_depth(epsilon: float) -> int:
    return math.ceil(1.0 / epsilon)


class RhoDistance(NamedTuple):
    value: float
    error_bound: float


def orbit_distance_rho(u: TruncatedForwardOrbit, v: TruncatedForwardOrbit,
                       space: MetricPointSet) -> RhoDistance:
    """``max_i d(u_i, v_i)/(i+1)`` over the stored prefix.

    Terms past the truncation depth are at most ``1/(depth+2)`` because the
    space has diameter 1, so the true supremum over any extensions lies in
    ``[value, max(value, error_bound)]``.
    """
    if u.depth != v.depth:
        raise ValueError(f"truncation depths differ: {u.depth} vs {v.depth}")
    val = max((space.dist[a, b] / (i + 1) for i, (a, b) in enumerate(zip(u.entries, v.entries))),
              default=0.0)
    return RhoDistance(float(val), 1.0 / (u.depth + 2))


def project(block: OrbitBlock, indices: Sequence[int], dedupe: bool = False) -> list[tuple]:
    idx = list(indices)
    if not idx:
        raise ValueError("projection needs at least one index")
    bad = [i for i in idx if not 0 <= i < block.n]
    if bad:
        raise IndexError(f"index {bad[0]} out of range for {block.n}-orbits")
    if block.sequences is None:
        raise ValueError("orbit block is in counted mode")
    out = [tuple(s[i] for i in idx) for s in block.sequences]
    if dedupe:
        out = list(dict.fromkeys(out))
    return out


def prefix_restriction_is_onto(F: FiniteRelation, n: int) -> bool:
    longer = {s[:n] for s in enumerate_orbits(F, n + 1).sequences}
    return longer == set(enumerate_orbits(F, n).sequences)


def lift_iterate_orbit(F: FiniteRelation, k: int, orbit: Sequence[int]) -> tuple | None:
    """An F-orbit of length ``(n-1)k+1`` visiting ``orbit[i]`` at time ``ik``.

    Found by breadth-first search over exact-length paths; ``None`` when no
    such lift exists.
    """
    succ = F.successors()
    path = [orbit[0]]
    for a, b in zip(orbit, orbit[1:]):
        # layered search for a k-step walk a -> b
        layers = [{a: None}]
        for _ in range(k):
            nxt = {}
            for v in layers[-1]:
                for w in succ[v]:
                    nxt.setdefault(w, v)
            layers.append(nxt)
        if b not in layers[-1]:
            return None
        walk = [b]
        for layer in reversed(layers[1:]):
            walk.append(layer[walk[-1]])
        walk.reverse()
        path.extend(walk[1:])
    return tuple(path)
