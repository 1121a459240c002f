"""Entropy of finite relations and interval functions.

For a finite relation ``s_{n,ε}`` is squeezed between two path counts:
orbits that stay inside an ε-separated set of points are pairwise
ε-separated, and no separated set is larger than the whole orbit space.
The exponential growth rate of a path count is the logarithm of the
largest spectral radius among the strongly connected components the
paths can reach, so both ends of the squeeze have exact ``n -> ∞``
limits.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import connected_components

from .core import TOL, FiniteRelation
from .interval import IntervalSVF, discretize
from .orbits import count_sequence
from .separation import (ExactComputationRefused, fast_path_applies,
                         max_clique, s_n_eps)

LOG2 = math.log(2)
TABLE_EXACT_CAP = 400


def _component_radius(block: np.ndarray) -> float:
    if block.shape[0] == 1:
        return float(block[0, 0])
    return float(np.max(np.abs(np.linalg.eigvals(block.astype(float)))))


def growth_rate(adj: np.ndarray, start: np.ndarray | None = None) -> float:
    """``lim (1/n) log`` of the number of length-``n`` paths leaving ``start``.

    ``adj`` may have empty rows (dead ends).  Returns 0 when path counts stay
    bounded and ``-inf`` never: a non-empty start set always has its
    length-0 paths.
    """
    adj = np.asarray(adj, dtype=bool)
    m = adj.shape[0]
    if m == 0:
        return 0.0
    if start is None:
        start = np.ones(m, dtype=bool)
    ncomp, comp = connected_components(adj, directed=True, connection="strong")
    # points reachable from the start set
    seen = np.asarray(start, dtype=bool).copy()
    frontier = seen.copy()
    while frontier.any():
        nxt = adj[frontier].any(axis=0) & ~seen
        seen |= nxt
        frontier = nxt
    rho = 0.0
    for c in set(comp[seen].tolist()):
        idx = np.flatnonzero(comp == c)
        rho = max(rho, _component_radius(adj[np.ix_(idx, idx)]))
    return math.log(rho) if rho > 1.0 + 1e-15 else 0.0


def sft_entropy(F: FiniteRelation) -> float:
    """Exact entropy of a finite relation: log of the adjacency spectral radius."""
    return growth_rate(F.adj)


def path_count_slope(F: FiniteRelation, n: int) -> float:
    """``log c_{n+1} - log c_n`` from exact big-integer orbit counts."""
    c = count_sequence(F, n + 1)
    return math.log(c[n]) - math.log(c[n - 1])


@dataclass(frozen=True)
class Certificate:
    kind: str
    witness: dict
    bound: float


def detect_box(F: FiniteRelation) -> Certificate | None:
    """Two points ``a != b`` with ``{a, b}`` inside both images."""
    a = F.adj
    loops = np.diag(a)
    both = a & a.T & loops[:, None] & loops[None, :]
    np.fill_diagonal(both, False)
    hits = np.argwhere(both)
    if hits.size == 0:
        return None
    i, j = (int(v) for v in hits[0])
    return Certificate("box", {"a": F.labels[i], "b": F.labels[j]}, LOG2)


def _cycles_through(succ, p: int, length: int, dist_to_p: np.ndarray, limit: int = 2) -> list[tuple]:
    found: list[tuple] = []
    path = [p]
    on_path = {p}

    def dfs(v: int):
        if len(found) >= limit:
            return
        steps = len(path)
        for w in succ[v]:
            if w == p and steps == length:
                found.append(tuple(path))
                if len(found) >= limit:
                    return
            elif w != p and w not in on_path and steps < length and dist_to_p[w] <= length - steps:
                path.append(w)
                on_path.add(w)
                dfs(w)
                path.pop()
                on_path.discard(w)

    dfs(p)
    return found


def _distances_to(adj: np.ndarray, p: int) -> np.ndarray:
    m = adj.shape[0]
    dist = np.full(m, m + 1)
    dist[p] = 0
    frontier = np.zeros(m, dtype=bool)
    frontier[p] = True
    d = 0
    while frontier.any():
        d += 1
        prev = adj[:, frontier].any(axis=1) & (dist > m)
        dist[prev] = d
        frontier = prev
    return dist


def detect_double_periodic(F: FiniteRelation, max_len: int = 12) -> Certificate | None:
    """A point on two distinct periodic orbits, with the smallest common period.

    Periodic orbits are taken from simple cycles of length ``<= max_len``;
    two distinct simple cycles through ``p`` give two distinct periodic
    sequences starting at ``p``.  The bound is ``log 2 / lcm(m, k)``.
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    succ = F.successors()
    best = None
    for p in range(len(F)):
        limit = max_len if best is None else min(max_len, best[0])
        dist = _distances_to(F.adj, p)
        by_len = {}
        for m in range(1, limit + 1):
            cyc = _cycles_through(succ, p, m, dist)
            if cyc:
                by_len[m] = cyc
        lens = sorted(by_len)
        for i, m in enumerate(lens):
            if len(by_len[m]) >= 2:
                cand = (m, m, m, by_len[m][0], by_len[m][1])
                if best is None or cand[0] < best[0]:
                    best = cand + (p,)
            for k in lens[i + 1:]:
                l = math.lcm(m, k)
                if best is None or l < best[0]:
                    best = (l, m, k, by_len[m][0], by_len[k][0], p)
    if best is None:
        return None
    l, m, k, c1, c2, p = best
    labels = F.labels
    return Certificate("double-periodic", {
        "point": labels[p], "periods": (m, k), "lcm": l,
        "orbits": (tuple(labels[i] for i in c1), tuple(labels[i] for i in c2)),
    }, LOG2 / l)


def cycle_census(F: FiniteRelation, max_len: int = 12, cap: int = 100_000) -> dict[int, list[tuple]]:
    """Simple cycles up to ``max_len``, each listed once from its smallest point.

    A cycle of length ``m`` accounts for ``m`` periodic orbits of period ``m``
    (its rotations).
    """
    succ = F.successors()
    out: dict[int, list[tuple]] = {}
    total = 0
    for s in range(len(F)):
        path = [s]
        on = {s}

        def dfs(v):
            nonlocal total
            for w in succ[v]:
                if w == s:
                    out.setdefault(len(path), []).append(tuple(F.labels[i] for i in path))
                    total += 1
                    if total > cap:
                        raise RuntimeError(f"more than {cap} simple cycles")
                elif w > s and w not in on and len(path) < max_len:
                    path.append(w)
                    on.add(w)
                    dfs(w)
                    path.pop()
                    on.discard(w)

        dfs(s)
    return dict(sorted(out.items()))


def detect_complete_subset(F: FiniteRelation) -> Certificate | None:
    """Largest ``A`` with ``A ⊆ F(a)`` for every ``a ∈ A``; bound ``log |A|``."""
    a = F.adj
    loops = np.flatnonzero(np.diag(a))
    if loops.size == 0:
        return None
    mutual = (a & a.T)[np.ix_(loops, loops)]
    masks = []
    for i in range(len(loops)):
        m = 0
        for j in np.flatnonzero(mutual[i]):
            if j != i:
                m |= 1 << int(j)
        masks.append(m)
    clique = [int(loops[i]) for i in max_clique(masks)]
    return Certificate("complete-subset", {"subset": tuple(F.labels[i] for i in clique)},
                       math.log(len(clique)))


def run_detectors(F: FiniteRelation, max_len: int = 12) -> list[Certificate]:
    out = []
    for cert in (detect_box(F), detect_double_periodic(F, max_len), detect_complete_subset(F)):
        if cert is not None:
            out.append(cert)
    return out


@dataclass
class EntropyRow:
    epsilon: float
    n: int
    s_value: int
    exact: bool
    log_s_over_n: float


@dataclass
class EntropyReport:
    eps_schedule: list
    rows: list = field(default_factory=list)
    h_eps: list = field(default_factory=list)
    h_eps_upper: list = field(default_factory=list)
    h_eps_window: list = field(default_factory=list)
    h_estimate: float = 0.0
    bias_note: str | None = None
    certificates: list = field(default_factory=list)
    partial: bool = False
    grid: int | None = None

    def rows_for(self, epsilon) -> list[EntropyRow]:
        return [r for r in self.rows if r.epsilon == epsilon]


def window_slope(ns, log_s, width: int = 4) -> float:
    """Largest least-squares slope of ``log s`` against ``n`` over trailing
    windows ending in the upper half of the ``n`` range."""
    ns = list(ns)
    vals = list(log_s)
    if len(ns) < 2:
        return 0.0
    width = min(width, len(ns))
    best = -math.inf
    for end in range(len(ns) // 2, len(ns) + 1):
        if end < width:
            continue
        x = np.array(ns[end - width:end], dtype=float)
        y = np.array(vals[end - width:end], dtype=float)
        best = max(best, float(np.polyfit(x, y, 1)[0]))
    return max(best, 0.0)


def separated_point_sets(F: FiniteRelation, epsilon: float, seeds: list[int]) -> list[np.ndarray]:
    """Greedy maximal ε-separated point sets, one per seed, scanning cyclically."""
    d = F.space.dist
    m = len(F)
    out = []
    for s in seeds:
        chosen: list[int] = []
        for i in list(range(s, m)) + list(range(s)):
            if all(d[i, j] >= epsilon - TOL for j in chosen):
                chosen.append(i)
        mask = np.zeros(m, dtype=bool)
        mask[chosen] = True
        out.append(mask)
    return out


def _seeds(m: int, start_idx: list[int] | None, k: int = 8) -> list[int]:
    pool = start_idx if start_idx else list(range(m))
    return sorted({pool[(j * len(pool)) // k] for j in range(min(k, len(pool)))})


def _eps_bracket(F: FiniteRelation, epsilon: float, start_mask: np.ndarray,
                 start_idx: list[int] | None) -> tuple[float, float]:
    upper = growth_rate(F.adj, start_mask)
    if fast_path_applies(F, epsilon):
        return upper, upper
    lower = 0.0
    for K in separated_point_sets(F, epsilon, _seeds(len(F), start_idx)):
        sub = F.adj[np.ix_(K, K)]
        st = start_mask[K]
        if st.any():
            lower = max(lower, growth_rate(sub, st))
        if lower >= upper - 1e-12:
            break
    return lower, upper


def _restricted_counts(F, K: np.ndarray, start_mask: np.ndarray, n_max: int) -> list[int]:
    idx = np.flatnonzero(K)
    sub = F.adj[np.ix_(idx, idx)]
    succ = [list(np.flatnonzero(r)) for r in sub]
    st = [i for i, k in enumerate(idx) if start_mask[k]]
    v = [1] * len(idx)
    out = [len(st)]
    for _ in range(n_max - 1):
        v = [sum(v[j] for j in s) for s in succ]
        out.append(sum(v[i] for i in st))
    return out


def estimate_entropy(F, eps_schedule, n_max: int = 14, grid: int | None = None,
                     start=None, mode: str = "exact", cap: int = TABLE_EXACT_CAP,
                     detectors: bool = True, max_len: int = 12,
                     threads: int = 1) -> EntropyReport:
    """Tabulate ``s_{n,ε}`` and estimate ``h(F, ε)`` along a decreasing ε schedule.

    ``h_eps`` is the certified lower limit in ``n`` (orbits confined to an
    ε-separated point set) and ``h_eps_upper`` the total-orbit growth rate;
    they coincide whenever ε is at most the smallest point distance.  The
    windowed slope of the finite table is kept in ``h_eps_window``.  Table
    entries are exact when ε is below the point spacing or the orbit space
    has at most ``cap`` elements (and ``mode`` is ``"exact"``); otherwise
    they are certified lower bounds.  Interval functions are discretized on
    ``grid`` points first.  The ε values are processed by ``threads``
    workers and assembled in schedule order, so the result does not depend
    on the worker count.
    """
    eps = [float(e) for e in eps_schedule]
    if not eps:
        raise ValueError("empty epsilon schedule")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon schedule must be strictly decreasing")
    if any(e <= 0 for e in eps):
        raise ValueError("epsilon values must be positive")
    if n_max < 4:
        raise ValueError("n_max must be at least 4")
    bias = None
    if isinstance(F, IntervalSVF):
        if grid is None:
            raise ValueError("an interval function needs a grid size")
        F = discretize(F, grid)
        bias = (f"discretized on {grid} grid points; cell over-approximation can only "
                "raise orbit counts")
    m = len(F)
    if start is None:
        start_mask = np.ones(m, dtype=bool)
        start_idx = None
        start_labels = None
    else:
        start_idx = sorted({F.space.index(s) for s in start})
        if not start_idx:
            raise ValueError("start set Z is empty")
        start_mask = np.zeros(m, dtype=bool)
        start_mask[start_idx] = True
        start_labels = [F.labels[i] for i in start_idx]

    report = EntropyReport(eps, bias_note=bias, grid=grid)
    totals = count_sequence(F, n_max, start_labels)

    def one_eps(e):
        lower, upper = _eps_bracket(F, e, start_mask, start_idx)
        fast = fast_path_applies(F, e)
        restricted = None
        rows, partial = [], False
        for n in range(2, n_max + 1):
            if fast:
                val, exact = totals[n - 1], True
            else:
                val, exact = None, False
                if mode == "exact" and totals[n - 1] <= cap:
                    try:
                        val = s_n_eps(F, n, e, "exact", cap, start_labels).value
                        exact = True
                    except ExactComputationRefused:
                        val = None
                if val is None:
                    if restricted is None:
                        restricted = max(
                            (_restricted_counts(F, K, start_mask, n_max)
                             for K in separated_point_sets(F, e, _seeds(m, start_idx))),
                            key=lambda c: c[-1])
                    val = max(restricted[n - 1], 1)
                    partial = True
            rows.append(EntropyRow(e, n, val, exact, math.log(val) / n))
        window = window_slope([r.n for r in rows], [math.log(r.s_value) for r in rows])
        return lower, upper, rows, window, partial

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        results = list(pool.map(one_eps, eps))
    running = 0.0
    for lower, upper, rows, window, partial in results:
        running = max(running, lower)
        report.h_eps.append(running)
        report.h_eps_upper.append(upper)
        report.rows.extend(rows)
        report.h_eps_window.append(window)
        report.partial = report.partial or partial
    report.h_estimate = max(report.h_eps[-1], 0.0)
    if detectors:
        report.certificates = run_detectors(F, max_len)
    return report


def estimate_entropy_restricted(F, Z, eps_schedule, n_max: int = 14, grid: int | None = None,
                                **kw) -> EntropyReport:
    """Same pipeline with orbits forced to start in ``Z``.

    For interval functions ``Z`` may be a predicate on grid coordinates or a
    set of grid indices; it is applied after discretization.
    """
    if isinstance(F, IntervalSVF):
        if grid is None:
            raise ValueError("an interval function needs a grid size")
        D = discretize(F, grid)
        if callable(Z):
            Z = [i for i, x in enumerate(D.space.coords) if Z(Fraction(x))]
        rep = estimate_entropy(D, eps_schedule, n_max, start=Z, **kw)
        rep.grid = grid
        rep.bias_note = (f"discretized on {grid} grid points; cell over-approximation can only "
                         "raise orbit counts")
        return rep
    if Z is not None and not list(Z):
        raise ValueError("start set Z is empty")
    return estimate_entropy(F, eps_schedule, n_max, start=Z, **kw)
