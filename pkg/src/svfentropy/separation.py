"""Maximum separated and minimum spanning subsets of orbit spaces.

Exact separated counts come from a maximum independent set in the
conflict graph: a bitset clique search with a colouring bound for general
point sets, and for orbit blocks a 0/1 program over product-clique
inequalities.  Exact spanning counts are a minimum set cover by open
ε-balls, also solved as a 0/1 program.  Greedy routines give certified
one-sided bounds when the exact search is out of reach.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Sequence

import networkx as nx
import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import coo_matrix

from .core import TOL, FiniteRelation
from .orbits import count_orbits, enumerate_orbits, pairwise_D

DEFAULT_VERTEX_CAP = 5000
PRODUCT_CLIQUE_LIMIT = 200_000
GREEDY_CAP = 20000
GREEDY_SEEDS = 8


class ExactComputationRefused(RuntimeError):
    def __init__(self, size: int, cap: int, bounds: "SeparationResult | None" = None):
        super().__init__(f"exact search over {size} points exceeds the vertex cap {cap}")
        self.size = size
        self.cap = cap
        self.bounds = bounds


@dataclass(frozen=True)
class SeparationResult:
    n: int | None
    epsilon: float
    value: int
    exact: bool
    method: str
    witness: tuple | None = None


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _clique_search(neighbours: Sequence[int]) -> list[int]:
    """Branch and bound with a greedy colouring bound: vertices are coloured
    sequentially and a branch is cut when the current clique plus the
    number of colours left cannot beat the incumbent.
    """
    n = len(neighbours)
    best: list[int] = []

    def colour_order(P: int):
        order, colours = [], []
        uncoloured = P
        c = 0
        while uncoloured:
            c += 1
            avail = uncoloured
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                order.append(v)
                colours.append(c)
                uncoloured &= ~low
                avail &= ~low & ~neighbours[v]
        return order, colours

    def expand(R: list[int], P: int):
        nonlocal best
        order, colours = colour_order(P)
        for v, c in zip(reversed(order), reversed(colours)):
            if len(R) + c <= len(best):
                return
            newP = P & neighbours[v]
            R.append(v)
            if newP:
                expand(R, newP)
            elif len(R) > len(best):
                best = list(R)
            R.pop()
            P &= ~(1 << v)

    if n:
        expand([], (1 << n) - 1)
    return sorted(best)


def max_clique(neighbours: Sequence[int]) -> list[int]:
    """Maximum clique of a graph given by adjacency bitmasks.

    Vertices are renumbered by non-increasing degree before the search,
    which tightens the colouring bound dramatically on dense graphs.
    """
    n = len(neighbours)
    order = sorted(range(n), key=lambda i: (-bin(neighbours[i]).count("1"), i))
    pos = {v: k for k, v in enumerate(order)}
    renum = []
    for v in order:
        m = 0
        for u in _bits(neighbours[v]):
            m |= 1 << pos[u]
        renum.append(m)
    return sorted(order[k] for k in _clique_search(renum))


def max_independent_set(conflicts: Sequence[int]) -> list[int]:
    n = len(conflicts)
    full = (1 << n) - 1
    comp = [(full & ~conflicts[i]) & ~(1 << i) for i in range(n)]
    return max_clique(comp)


def _masks(rel: np.ndarray) -> list[int]:
    out = []
    for row in rel:
        m = 0
        for j in np.flatnonzero(row):
            m |= 1 << int(j)
        out.append(m)
    return out


def min_cover(close: np.ndarray) -> list[int]:
    """Fewest closed neighbourhoods covering every vertex, as a 0/1 program.

    Row ``i`` of the boolean matrix ``close`` is the set of vertices point
    ``i`` covers.  Solved to optimality by HiGHS branch and bound; the
    greedy cover seeds nothing but serves as a sanity ceiling.
    """
    close = np.asarray(close, dtype=bool)
    m = close.shape[0]
    greedy = _greedy_cover(_masks(close), (1 << m) - 1)
    res = milp(c=np.ones(m), integrality=np.ones(m),
               bounds=Bounds(0, 1),
               constraints=LinearConstraint(close.T.astype(float), lb=1, ub=np.inf),
               options={"mip_rel_gap": 0.0})
    if res.status != 0:
        raise RuntimeError(f"set cover solver failed: {res.message}")
    chosen = sorted(int(i) for i in np.flatnonzero(res.x > 0.5))
    if len(chosen) > len(greedy) or not close[chosen].any(axis=0).all():
        raise RuntimeError("set cover solver returned an invalid cover")
    return chosen


def product_clique_rows(orbits: np.ndarray, close: np.ndarray,
                        limit: int = PRODUCT_CLIQUE_LIMIT):
    """Clique inequalities for the conflict graph of an orbit block.

    Two orbits conflict exactly when every coordinate pair is close, so any
    clique of orbits projects to a clique of points in each coordinate and
    lies inside a product of maximal point cliques.  Each such product
    meeting the block yields one ``sum <= 1`` row.  Returns ``None`` when
    the number of incidences would exceed ``limit``.
    """
    m = close.shape[0]
    g = nx.Graph()
    g.add_nodes_from(range(m))
    g.add_edges_from(zip(*np.nonzero(np.triu(close, 1))))
    cliques = [frozenset(c) for c in nx.find_cliques(g)]
    member = [[k for k, c in enumerate(cliques) if x in c] for x in range(m)]
    sizes = np.array([len(k) for k in member], dtype=float)
    if float(np.prod(sizes[orbits], axis=1).sum()) > limit:
        return None
    keys: dict[tuple, int] = {}
    rows, cols = [], []
    for o, seq in enumerate(orbits):
        for key in itertools.product(*(member[x] for x in seq)):
            rows.append(keys.setdefault(key, len(keys)))
            cols.append(o)
    return coo_matrix((np.ones(len(rows)), (rows, cols)),
                      shape=(len(keys), orbits.shape[0])).tocsr()


def max_independent_milp(rows, size: int) -> list[int]:
    """Maximum independent set under clique inequalities, solved exactly."""
    res = milp(c=-np.ones(size), integrality=np.ones(size), bounds=Bounds(0, 1),
               constraints=LinearConstraint(rows, -np.inf, 1),
               options={"mip_rel_gap": 0.0})
    if res.status != 0:
        raise RuntimeError(f"independent set solver failed: {res.message}")
    return sorted(int(i) for i in np.flatnonzero(res.x > 0.5))


def _greedy_cover(close: Sequence[int], U: int) -> list[int]:
    chosen = []
    while U:
        s = max(range(len(close)), key=lambda i: (bin(close[i] & U).count("1"), -i))
        chosen.append(s)
        U &= ~close[s]
    return chosen


def greedy_separated(dist: np.ndarray, epsilon: float, seeds: int = GREEDY_SEEDS) -> list[int]:
    """Best maximal ε-separated set over several cyclic starting points."""
    m = dist.shape[0]
    starts = sorted({(k * m) // seeds for k in range(min(seeds, m))})
    best: list[int] = []
    for s in starts:
        chosen: list[int] = []
        for i in list(range(s, m)) + list(range(s)):
            if all(dist[i, j] >= epsilon - TOL for j in chosen):
                chosen.append(i)
        if len(chosen) > len(best):
            best = chosen
    return sorted(best)


def _distance_matrix(points: Sequence, metric: Callable) -> np.ndarray:
    m = len(points)
    d = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            d[i, j] = d[j, i] = metric(points[i], points[j])
    return d


def is_separated(dist: np.ndarray, witness: Sequence[int], epsilon: float) -> bool:
    w = list(witness)
    sub = dist[np.ix_(w, w)]
    off = ~np.eye(len(w), dtype=bool)
    return bool(np.all(sub[off] >= epsilon - TOL))


def is_spanning(dist: np.ndarray, witness: Sequence[int], epsilon: float) -> bool:
    w = list(witness)
    return bool(np.all(dist[:, w].min(axis=1) < epsilon - TOL))


def separated_from_distances(dist: np.ndarray, epsilon: float, mode: str = "exact",
                             cap: int = DEFAULT_VERTEX_CAP, n: int | None = None) -> SeparationResult:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    m = dist.shape[0]
    if m == 0:
        raise ValueError("need at least one point")
    if mode == "greedy" or m > cap:
        w = greedy_separated(dist, epsilon)
        res = SeparationResult(n, epsilon, len(w), False, "greedy-lower", tuple(w))
        if mode == "exact":
            raise ExactComputationRefused(m, cap, res)
        return res
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    conflicts = _masks((dist < epsilon - TOL) & ~np.eye(m, dtype=bool))
    w = max_independent_set(conflicts)
    return SeparationResult(n, epsilon, len(w), True, "branch-and-bound", tuple(w))


def spanning_from_distances(dist: np.ndarray, epsilon: float, mode: str = "exact",
                            cap: int = DEFAULT_VERTEX_CAP, n: int | None = None) -> SeparationResult:
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    m = dist.shape[0]
    if m == 0:
        raise ValueError("need at least one point")
    close = dist < epsilon - TOL
    if mode == "greedy" or m > cap:
        w = sorted(_greedy_cover(_masks(close), (1 << m) - 1))
        res = SeparationResult(n, epsilon, len(w), False, "greedy-upper", tuple(w))
        if mode == "exact":
            raise ExactComputationRefused(m, cap, res)
        return res
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    w = min_cover(close)
    return SeparationResult(n, epsilon, len(w), True, "branch-and-bound", tuple(w))


def max_separated(points: Sequence, metric: Callable, epsilon: float, mode: str = "exact",
                  cap: int = DEFAULT_VERTEX_CAP) -> SeparationResult:
    """Largest subset of ``points`` with pairwise ``metric >= epsilon``.

    The witness holds the selected points themselves.
    """
    if not points:
        raise ValueError("need at least one point")
    if len(points) > cap and mode == "exact":
        raise ExactComputationRefused(len(points), cap)
    res = separated_from_distances(_distance_matrix(points, metric), epsilon, mode, cap)
    return _with_points(res, points)


def min_spanning(points: Sequence, metric: Callable, epsilon: float, mode: str = "exact",
                 cap: int = DEFAULT_VERTEX_CAP) -> SeparationResult:
    if not points:
        raise ValueError("need at least one point")
    if len(points) > cap and mode == "exact":
        raise ExactComputationRefused(len(points), cap)
    res = spanning_from_distances(_distance_matrix(points, metric), epsilon, mode, cap)
    return _with_points(res, points)


def _with_points(res: SeparationResult, points: Sequence) -> SeparationResult:
    return SeparationResult(res.n, res.epsilon, res.value, res.exact, res.method,
                            tuple(points[i] for i in res.witness))


def fast_path_applies(F: FiniteRelation, epsilon: float) -> bool:
    """Distinct orbits are automatically ε-separated when ε is at most the
    smallest positive distance, so every count is a total orbit count."""
    return epsilon <= F.space.min_positive_distance() + TOL


def _orbit_problem(F, n, epsilon, mode, cap, start, solver):
    if n < 1:
        raise ValueError("n must be at least 1")
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if fast_path_applies(F, epsilon):
        return SeparationResult(n, epsilon, count_orbits(F, n, start), True, "total-count")
    total = count_orbits(F, n, start)
    if mode == "exact" and total > cap:
        bounds = None
        if total <= GREEDY_CAP:
            bounds = _orbit_problem(F, n, epsilon, "greedy", cap, start, solver)
        raise ExactComputationRefused(total, cap, bounds)
    if total > GREEDY_CAP:
        raise ExactComputationRefused(total, GREEDY_CAP)
    block = enumerate_orbits(F, n, start)
    arr = block.as_array()
    dist = pairwise_D(arr, F.space)
    res = None
    if mode == "exact" and solver is separated_from_distances:
        rows = product_clique_rows(arr, F.space.dist < epsilon - TOL)
        if rows is not None:
            w = max_independent_milp(rows, total)
            if is_separated(dist, w, epsilon) and len(w) >= len(greedy_separated(dist, epsilon)):
                res = SeparationResult(n, epsilon, len(w), True, "branch-and-bound", tuple(w))
    if res is None:
        res = solver(dist, epsilon, mode, max(cap, total), n)
    return SeparationResult(n, epsilon, res.value, res.exact, res.method,
                            tuple(block.sequences[i] for i in res.witness))


def s_n_eps(F: FiniteRelation, n: int, epsilon: float, mode: str = "exact",
            cap: int = DEFAULT_VERTEX_CAP, start=None) -> SeparationResult:
    """Largest ε-separated subset of ``Orb_n`` under the max-coordinate metric."""
    return _orbit_problem(F, n, epsilon, mode, cap, start, separated_from_distances)


def r_n_eps(F: FiniteRelation, n: int, epsilon: float, mode: str = "exact",
            cap: int = DEFAULT_VERTEX_CAP, start=None) -> SeparationResult:
    """Smallest ε-spanning subset of ``Orb_n``."""
    return _orbit_problem(F, n, epsilon, mode, cap, start, spanning_from_distances)
