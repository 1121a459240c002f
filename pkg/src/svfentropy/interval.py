"""Set-valued functions on [0, 1] with piecewise-linear closed graphs.

A graph is a finite union of convex pieces: isolated points, closed line
segments and (optionally) filled convex polygons.  Each piece is a tuple
of vertices with :class:`~fractions.Fraction` coordinates, so slices,
compositions and the grid discretization are computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Sequence

import numpy as np

from .core import FiniteRelation, MetricPointSet, NotSurjectiveError, SpaceMismatchError

Point = tuple[Fraction, Fraction]
Piece = tuple[Point, ...]

ZERO = Fraction(0)
ONE = Fraction(1)


def _pt(p) -> Point:
    x, y = p
    return (Fraction(x), Fraction(y))


def _dedupe(verts: Sequence[Point]) -> list[Point]:
    out: list[Point] = []
    for v in verts:
        if not out or out[-1] != v:
            out.append(v)
    while len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return out


def _cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _is_convex(verts: Sequence[Point]) -> bool:
    n = len(verts)
    sign = 0
    for i in range(n):
        c = _cross(verts[i], verts[(i + 1) % n], verts[(i + 2) % n])
        if c:
            s = 1 if c > 0 else -1
            if sign and s != sign:
                return False
            sign = s
    return True


def clip_halfplane(verts: Sequence[Point], axis: int, bound: Fraction, keep_ge: bool) -> list[Point]:
    """Sutherland-Hodgman clip of a convex vertex list against ``v[axis] >= bound``
    (or ``<=`` when ``keep_ge`` is false).  Works for points and segments too."""
    if not verts:
        return []

    def inside(v):
        return v[axis] >= bound if keep_ge else v[axis] <= bound

    if len(verts) == 1:
        return list(verts) if inside(verts[0]) else []
    out: list[Point] = []
    n = len(verts)
    for k in range(n):
        cur, nxt = verts[k], verts[(k + 1) % n]
        cin, nin = inside(cur), inside(nxt)
        if cin:
            out.append(cur)
        if cin != nin:
            t = (bound - cur[axis]) / (nxt[axis] - cur[axis])
            p = (cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1]))
            out.append(p)
        if n == 2:
            # a segment has a single edge; the reversed edge would duplicate it
            if nin:
                out.append(nxt)
            break
    return _dedupe(out)


def clip_box(verts, x0=None, x1=None, y0=None, y1=None) -> list[Point]:
    v = list(verts)
    if x0 is not None:
        v = clip_halfplane(v, 0, x0, True)
    if x1 is not None:
        v = clip_halfplane(v, 0, x1, False)
    if y0 is not None:
        v = clip_halfplane(v, 1, y0, True)
    if y1 is not None:
        v = clip_halfplane(v, 1, y1, False)
    return v


def piece_slice(piece: Piece, x: Fraction) -> tuple[Fraction, Fraction] | None:
    q = clip_box(piece, x0=x, x1=x)
    if not q:
        return None
    ys = [v[1] for v in q]
    return (min(ys), max(ys))


def merge_intervals(intervals: Iterable[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Canonical sorted, disjoint union of closed intervals (points are ``(a, a)``)."""
    out: list[list[Fraction]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(lo, hi) for lo, hi in out]


def _covers_unit(intervals) -> Fraction | None:
    """First uncovered point of [0, 1], or None when fully covered."""
    reach = None
    for lo, hi in merge_intervals(intervals):
        if reach is None:
            if lo > 0:
                return ZERO
            reach = hi
        elif lo > reach:
            return reach
        else:
            reach = max(reach, hi)
    if reach is None:
        return ZERO
    return None if reach >= 1 else reach


@dataclass(frozen=True)
class IntervalSVF:
    segments: tuple = ()
    points: tuple = ()
    polygons: tuple = ()

    def __post_init__(self):
        segs = tuple(tuple(_pt(p) for p in s) for s in self.segments)
        pts = tuple(_pt(p) for p in self.points)
        polys = tuple(tuple(_pt(p) for p in poly) for poly in self.polygons)
        object.__setattr__(self, "segments", segs)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "polygons", polys)
        for s in segs:
            if len(s) != 2:
                raise ValueError(f"segment {s} must have exactly two endpoints")
        for poly in polys:
            if len(poly) < 3:
                raise ValueError("polygon needs at least three vertices")
            if not _is_convex(poly):
                raise ValueError(f"polygon {poly} is not convex")
        for piece in self.pieces():
            for x, y in piece:
                if not (0 <= x <= 1 and 0 <= y <= 1):
                    raise ValueError(f"coordinate ({x}, {y}) lies outside [0,1]^2")
        gap = _covers_unit(_extent(p, 0) for p in self.pieces())
        if gap is not None:
            raise ValueError(f"F(x) is empty near x = {gap}")

    def pieces(self) -> list[Piece]:
        return [*self.segments, *((p,) for p in self.points), *self.polygons]


def _extent(piece: Piece, axis: int) -> tuple[Fraction, Fraction]:
    vals = [v[axis] for v in piece]
    return (min(vals), max(vals))


def from_pieces(pieces: Iterable[Sequence[Point]]) -> IntervalSVF:
    segs, pts, polys = [], [], []
    for p in pieces:
        p = _dedupe(list(p))
        if not p:
            continue
        if len(p) == 1:
            pts.append(p[0])
        elif len(p) == 2:
            segs.append(tuple(p))
        elif all(_cross(p[0], p[1], v) == 0 for v in p[2:]):
            # collinear vertex list collapses to its extreme points
            s = sorted(p)
            segs.append((s[0], s[-1]))
        else:
            polys.append(tuple(p))
    return IntervalSVF(tuple(segs), tuple(pts), tuple(polys))


def identity_interval() -> IntervalSVF:
    return IntervalSVF(segments=(((0, 0), (1, 1)),))


def evaluate_interval(F: IntervalSVF, x) -> list[tuple[Fraction, Fraction]]:
    """Vertical slice of the graph at ``x`` as sorted disjoint closed intervals."""
    x = Fraction(x)
    if not 0 <= x <= 1:
        raise ValueError(f"x = {x} lies outside [0, 1]")
    found = [s for s in (piece_slice(p, x) for p in F.pieces()) if s is not None]
    return merge_intervals(found)


def _line_key(a: Point, b: Point):
    # (A, B, C) with A x + B y = C, scaled so the first non-zero of A, B is 1
    A, B = b[1] - a[1], a[0] - b[0]
    C = A * a[0] + B * a[1]
    v = A if A else B
    return (A / v, B / v, C / v)


def canonical(F: IntervalSVF) -> IntervalSVF:
    """Merge collinear overlapping segments and drop points already covered, so
    that two representations of the same graph compare equal."""
    by_line: dict = {}
    for a, b in F.segments:
        if a == b:
            continue
        key = _line_key(a, b)
        by_line.setdefault(key, []).append(tuple(sorted((a, b))))
    segs = []
    for key, lst in by_line.items():
        lst.sort()
        cur = list(lst[0])
        for a, b in lst[1:]:
            if a <= cur[1]:
                cur[1] = max(cur[1], b)
            else:
                segs.append(tuple(cur))
                cur = [a, b]
        segs.append(tuple(cur))
    segs.sort()
    polys = sorted(F.polygons)
    covered = [*segs, *polys]
    pts = set()
    for p in F.points:
        if not any(clip_box(piece, p[0], p[0], p[1], p[1]) for piece in covered):
            pts.add(p)
    for a, b in F.segments:
        if a == b and not any(clip_box(piece, a[0], a[0], a[1], a[1]) for piece in covered):
            pts.add(a)
    return IntervalSVF(tuple(segs), tuple(sorted(pts)), tuple(polys))


def graphs_equal(F: IntervalSVF, G: IntervalSVF) -> bool:
    return canonical(F) == canonical(G)


def _compose_pieces(g: Piece, f: Piece) -> list[Piece]:
    """Graph of ``g∘f`` for a segment or point ``f`` and any convex piece ``g``."""
    (xa, ya), (xb, yb) = f[0], f[-1]
    if ya == yb:
        sl = piece_slice(g, ya)
        if sl is None:
            return []
        zlo, zhi = sl
        lo, hi = min(xa, xb), max(xa, xb)
        return [_dedupe([(lo, zlo), (hi, zlo), (hi, zhi), (lo, zhi)])]
    ylo, yhi = min(ya, yb), max(ya, yb)
    q = clip_box(g, x0=ylo, x1=yhi)  # g's first coordinate is f's output
    if not q:
        return []

    def x_of(y):
        return xa + (y - ya) * (xb - xa) / (yb - ya)

    return [_dedupe([(x_of(y), z) for y, z in q])]


def compose_interval(G: IntervalSVF, F: IntervalSVF) -> IntervalSVF:
    if F.polygons:
        raise NotImplementedError("composition with a filled-polygon inner function")
    out = []
    for f in F.pieces():
        for g in G.pieces():
            out.extend(_compose_pieces(g, f))
    return from_pieces(out)


def inverse_interval(F: IntervalSVF) -> IntervalSVF:
    gap = _covers_unit(_extent(p, 1) for p in F.pieces())
    if gap is not None:
        raise NotSurjectiveError(gap)
    return from_pieces([[(y, x) for x, y in p] for p in F.pieces()])


def grid_coords(N: int) -> list[Fraction]:
    return [Fraction(i, N - 1) for i in range(N)]


def discretize(F: IntervalSVF, N: int) -> FiniteRelation:
    """Grid relation on ``x_i = i/(N-1)``.

    ``adj[i, j]`` is set when the graph meets the open cell
    ``(x_i - h/2, x_i + h/2) × (x_j - h/2, x_j + h/2)``, or when the exact
    slice ``F(x_i)`` meets the closed row cell around ``x_j``.  The slice
    rule keeps every row non-empty and marks every grid pair in the graph;
    using open cells elsewhere keeps a line through cell centres from
    leaking into diagonal neighbours through shared corners.
    """
    if N < 2:
        raise ValueError("grid size N must be at least 2")
    h = Fraction(1, N - 1)
    half = h / 2
    xs = grid_coords(N)
    adj = np.zeros((N, N), dtype=bool)

    def row_range(lo, hi):
        return range(max(0, floor(lo / h) - 1), min(N - 1, ceil(hi / h) + 1) + 1)

    for piece in F.pieces():
        plo, phi = _extent(piece, 0)
        for i in row_range(plo, phi):
            a, b = xs[i] - half, xs[i] + half
            if not (a < phi and b > plo):
                continue
            q = clip_box(piece, x0=a, x1=b)
            if not q:
                continue
            qx0, qx1 = _extent(q, 0)
            if qx0 == qx1 and qx0 in (a, b):
                continue
            ylo, yhi = _extent(q, 1)
            for j in row_range(ylo, yhi):
                c, d = xs[j] - half, xs[j] + half
                if ylo < yhi:
                    hit = c < yhi and d > ylo
                else:
                    hit = c < ylo < d
                if hit:
                    adj[i, j] = True
    for i, x in enumerate(xs):
        for lo, hi in evaluate_interval(F, x):
            for j in row_range(lo, hi):
                if xs[j] - half <= hi and xs[j] + half >= lo:
                    adj[i, j] = True
    return FiniteRelation(MetricPointSet.grid(N), adj)


def _interval_hausdorff(A, B) -> Fraction:
    def directed(P, Q):
        def dist(t):
            return min(ZERO if lo <= t <= hi else min(abs(t - lo), abs(t - hi)) for lo, hi in Q)

        cands = [e for lo, hi in P for e in (lo, hi)]
        for (_, h1), (l2, _) in zip(Q, Q[1:]):
            mid = (h1 + l2) / 2
            if any(lo <= mid <= hi for lo, hi in P):
                cands.append(mid)
        return max(dist(t) for t in cands)

    return max(directed(A, B), directed(B, A))


def check_hausdorff_continuity(F: IntervalSVF, N: int, delta) -> dict:
    """Hausdorff jumps between slices at adjacent grid points.

    A grid point is flagged when its jump to every neighbour exceeds
    ``delta``; a large jump between two unflagged points flags the left one.
    """
    if N < 3:
        raise ValueError("N must be at least 3")
    delta = Fraction(delta)
    xs = grid_coords(N)
    slices = [evaluate_interval(F, x) for x in xs]
    jumps = [_interval_hausdorff(slices[i], slices[i + 1]) for i in range(N - 1)]
    flagged = set()
    for i in range(N):
        nb = [jumps[k] for k in (i - 1, i) if 0 <= k < N - 1]
        if all(j > delta for j in nb):
            flagged.add(i)
    for k, j in enumerate(jumps):
        if j > delta and k not in flagged and k + 1 not in flagged:
            flagged.add(k)
    return {
        "pairs": [(xs[k], xs[k + 1], jumps[k]) for k in range(N - 1)],
        "flagged": [xs[i] for i in sorted(flagged)],
        "max_jump": max(jumps),
    }


@dataclass(frozen=True)
class PLHomeomorphism:
    """Strictly monotone piecewise-linear self-map of [0, 1] given by breakpoints."""

    breakpoints: tuple

    def __post_init__(self):
        bp = tuple(_pt(p) for p in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        xs = [p[0] for p in bp]
        ys = [p[1] for p in bp]
        if len(bp) < 2 or xs[0] != 0 or xs[-1] != 1 or any(a >= b for a, b in zip(xs, xs[1:])):
            raise ValueError("breakpoints must start at x=0, end at x=1 and increase")
        inc = all(a < b for a, b in zip(ys, ys[1:]))
        dec = all(a > b for a, b in zip(ys, ys[1:]))
        if not (inc or dec) or {ys[0], ys[-1]} != {ZERO, ONE}:
            raise ValueError("phi must be a strictly monotone bijection of [0, 1]")

    @classmethod
    def reflection(cls) -> PLHomeomorphism:
        return cls(((0, 1), (1, 0)))

    def __call__(self, x) -> Fraction:
        x = Fraction(x)
        bp = self.breakpoints
        for (x0, y0), (x1, y1) in zip(bp, bp[1:]):
            if x0 <= x <= x1:
                return y0 + (x - x0) * (y1 - y0) / (x1 - x0)
        raise ValueError(f"x = {x} lies outside [0, 1]")


def conjugate_interval(F: IntervalSVF, phi: PLHomeomorphism) -> IntervalSVF:
    """Graph of ``phi∘F∘phi^{-1}``: the image of Γ(F) under ``(x, y) -> (phi x, phi y)``."""
    cuts = [p[0] for p in phi.breakpoints]
    cells = list(zip(cuts, cuts[1:]))
    out = []
    for piece in F.pieces():
        for x0, x1 in cells:
            for y0, y1 in cells:
                q = clip_box(piece, x0, x1, y0, y1)
                if q:
                    out.append([(phi(x), phi(y)) for x, y in q])
    return from_pieces(out)


__all__ = [
    "IntervalSVF", "PLHomeomorphism", "canonical", "check_hausdorff_continuity",
    "compose_interval", "conjugate_interval", "discretize", "evaluate_interval",
    "from_pieces", "graphs_equal", "identity_interval", "inverse_interval",
    "merge_intervals", "SpaceMismatchError",
]
