"""Checks of entropy inequalities on concrete instances.

Every check returns a :class:`TheoremCheckResult` whose verdict can be
recomputed from the stored quantities and comparisons.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (TOL, FiniteRelation, MetricPointSet, NotSurjectiveError, inverse, iterate,
                   relabel, surjective_core)
from .entropy import estimate_entropy, sft_entropy
from .interval import IntervalSVF, PLHomeomorphism, conjugate_interval
from .orbits import count_orbits, enumerate_orbits
from .separation import (DEFAULT_VERTEX_CAP, ExactComputationRefused, r_n_eps, s_n_eps,
                         separated_from_distances)



@dataclass
class TheoremCheckResult:
    theorem: str
    instance: str
    quantities: dict = field(default_factory=dict)
    comparisons: list = field(default_factory=list)
    verdict: str = "pass"
    tolerance: float = 0.0
    note: str = ""

    def recompute(self) -> str:
        if self.verdict == "skipped":
            return "skipped"
        return "pass" if all(_holds(self.quantities, c, self.tolerance)
                             for c in self.comparisons) else "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _holds(q: dict, comp: tuple, tol: float) -> bool:
    left, op, right = comp
    a, b = q[left], q[right]
    if op == "<=":
        return a <= b + tol
    if op == "<":
        return a < b - tol
    if op == "==":
        return abs(a - b) <= tol
    raise ValueError(op)


def _finish(res: TheoremCheckResult) -> TheoremCheckResult:
    res.verdict = res.recompute()
    return res


def _skipped(theorem: str, instance: str, why: str) -> TheoremCheckResult:
    return TheoremCheckResult(theorem, instance, verdict="skipped", note=why)


def describe(F: FiniteRelation) -> str:
    imgs = "; ".join(f"{lab}->{{{','.join(str(F.labels[j]) for j in F.image_indices(i))}}}"
                     for i, lab in enumerate(F.labels))
    return f"{len(F)} points: {imgs}"


def verify_iterate_bounds(F: FiniteRelation, k: int, tol: float = 1e-9) -> TheoremCheckResult:
    """h(F) <= h(F^k) <= k h(F)."""
    if k < 1:
        raise ValueError("k must be at least 1")
    h = sft_entropy(F)
    hk = sft_entropy(iterate(F, k))
    res = TheoremCheckResult("iterate-bounds", f"{describe(F)}; k={k}",
                             {"h(F)": h, "h(F^k)": hk, "k*h(F)": k * h},
                             [("h(F)", "<=", "h(F^k)"), ("h(F^k)", "<=", "k*h(F)")],
                             tolerance=tol)
    res.quantities["strict_lower"] = hk > h + tol
    res.quantities["strict_upper"] = hk < k * h - tol
    return _finish(res)


def _exact_s(F, n, eps, cap):
    r = s_n_eps(F, n, eps, "exact", cap)
    return r.value


def verify_lemma_iterate_counts(F: FiniteRelation, k: int, n: int, eps: float,
                                cap: int = DEFAULT_VERTEX_CAP) -> TheoremCheckResult:
    """s_{n,ε}(F) <= s_{m,ε/2}(F^k)^k with (m-1)k < n <= mk."""
    m = -(-n // k)
    inst = f"{describe(F)}; k={k}, n={n}, eps={eps}"
    try:
        lhs = _exact_s(F, n, eps, cap)
        base = _exact_s(iterate(F, k), m, eps / 2, cap)
    except ExactComputationRefused as exc:
        return _skipped("iterate-count-lemma", inst, str(exc))
    return _finish(TheoremCheckResult(
        "iterate-count-lemma", inst,
        {"m": m, "s_n(F)": lhs, "s_m(F^k)": base, "s_m(F^k)^k": base**k},
        [("s_n(F)", "<=", "s_m(F^k)^k")]))


def verify_sandwich(F: FiniteRelation, n: int, eps: float,
                    cap: int = DEFAULT_VERTEX_CAP) -> TheoremCheckResult:
    """r_{n,ε} <= s_{n,ε} <= r_{n,ε/2}."""
    inst = f"{describe(F)}; n={n}, eps={eps}"
    try:
        r = r_n_eps(F, n, eps, "exact", cap).value
        s = s_n_eps(F, n, eps, "exact", cap).value
        r2 = r_n_eps(F, n, eps / 2, "exact", cap).value
    except ExactComputationRefused as exc:
        return _skipped("separated-spanning-sandwich", inst, str(exc))
    return _finish(TheoremCheckResult(
        "separated-spanning-sandwich", inst, {"r(eps)": r, "s(eps)": s, "r(eps/2)": r2},
        [("r(eps)", "<=", "s(eps)"), ("s(eps)", "<=", "r(eps/2)")]))


def _parse_perm(F: FiniteRelation, phi) -> list[int]:
    if isinstance(phi, dict):
        return [F.space.index(phi[lab]) for lab in F.labels]
    return [int(p) for p in phi]


def verify_conjugacy(F, phi, eps_values: Sequence[float] = (0.3, 0.6), n_max: int = 4,
                     tol: float = 1e-12, grid: int = 129,
                     eps_schedule: Sequence[float] = (2**-2, 2**-3, 2**-4),
                     interval_tol: float = 1e-9) -> TheoremCheckResult:
    """Conjugate systems have the same entropy.

    Finite case: ``phi`` is a permutation (list of image indices or a label
    dict), the metric is transported along it and the whole s-table must
    agree.  Interval case: ``phi`` is a :class:`PLHomeomorphism` and the
    discretized estimates are compared.
    """
    if isinstance(F, IntervalSVF):
        if not isinstance(phi, PLHomeomorphism):
            raise TypeError("interval conjugacy needs a PLHomeomorphism")
        G = conjugate_interval(F, phi)
        rf = estimate_entropy(F, eps_schedule, n_max=max(n_max, 4), grid=grid, detectors=False)
        rg = estimate_entropy(G, eps_schedule, n_max=max(n_max, 4), grid=grid, detectors=False)
        return _finish(TheoremCheckResult(
            "conjugacy", f"interval function, phi breakpoints {phi.breakpoints}",
            {"h(F)": rf.h_estimate, "h(G)": rg.h_estimate}, [("h(F)", "==", "h(G)")],
            tolerance=interval_tol))
    perm = _parse_perm(F, phi)
    G = relabel(F, perm)  # raises on non-bijective phi
    q = {"h(F)": sft_entropy(F), "h(G)": sft_entropy(G)}
    comps = [("h(F)", "==", "h(G)")]
    for n in range(1, n_max + 1):
        for e in eps_values:
            try:
                a = _exact_s(F, n, e, DEFAULT_VERTEX_CAP)
                b = _exact_s(G, n, e, DEFAULT_VERTEX_CAP)
            except ExactComputationRefused:
                continue
            q[f"s_{n},{e}(F)"] = a
            q[f"s_{n},{e}(G)"] = b
            comps.append((f"s_{n},{e}(F)", "==", f"s_{n},{e}(G)"))
    return _finish(TheoremCheckResult("conjugacy", f"{describe(F)}; phi={perm}", q, comps,
                                      tolerance=tol))


def semiconjugacy_hypothesis(F: FiniteRelation, phi: dict, G: FiniteRelation) -> str | None:
    """Reason the pointwise hypothesis G(phi(x)) ⊆ phi(F(x)) fails, or None."""
    img = {G.labels[i] for i in range(len(G))}
    if set(phi.values()) != img:
        return "phi is not onto"
    for i, x in enumerate(F.labels):
        y = phi[x]
        gy = {G.labels[j] for j in G.image_indices(G.space.index(y))}
        pfx = {phi[F.labels[j]] for j in F.image_indices(i)}
        if not gy <= pfx:
            return f"G(phi({x!r})) = {sorted(map(str, gy))} not inside phi(F({x!r}))"
    return None


def verify_semiconjugacy(F: FiniteRelation, phi: dict, G: FiniteRelation,
                         tol: float = 1e-9) -> TheoremCheckResult:
    """h(G) <= h(F) when G is semi-conjugate to F through phi."""
    inst = f"F: {describe(F)}; G: {describe(G)}; phi={phi}"
    why = semiconjugacy_hypothesis(F, phi, G)
    if why:
        return _skipped("semi-conjugacy", inst, f"instance rejected: {why}")
    return _finish(TheoremCheckResult("semi-conjugacy", inst,
                                      {"h(G)": sft_entropy(G), "h(F)": sft_entropy(F)},
                                      [("h(G)", "<=", "h(F)")], tolerance=tol))


def verify_inverse_entropy(F: FiniteRelation, tol: float = 1e-12) -> TheoremCheckResult:
    Finv = inverse(F)  # raises NotSurjectiveError
    return _finish(TheoremCheckResult("inverse", describe(F),
                                      {"h(F)": sft_entropy(F), "h(F^-1)": sft_entropy(Finv)},
                                      [("h(F)", "==", "h(F^-1)")], tolerance=tol))


def verify_core_entropy(F: FiniteRelation, tol: float = 1e-9) -> TheoremCheckResult:
    core, labels = surjective_core(F)
    return _finish(TheoremCheckResult("surjective-core", describe(F),
                                      {"h(F)": sft_entropy(F), "h(F|C)": sft_entropy(core),
                                       "|C|": len(labels)},
                                      [("h(F)", "==", "h(F|C)")], tolerance=tol))


def shift_separation_count(F: FiniteRelation, n: int, eps: float,
                           cap: int = DEFAULT_VERTEX_CAP) -> int:
    """Exact ``s_{n,ε}`` of the shift on forward orbits under the weighted metric.

    Two forward orbits are ``(n, ε)``-separated for the shift when some
    ``j < n`` and ``i >= 0`` give ``d(x_{i+j}, y_{i+j}) >= ε (i+1)``.  With
    diameter 1 only ``i < q = floor(1/ε)`` can fire, so the relation depends
    on prefixes of length ``n + q - 1`` alone; each prefix extends to a
    forward orbit because images are non-empty.  Coordinate ``c`` is best
    seen through the smallest admissible ``i = max(0, c - n + 1)``.
    """
    if eps > 1:
        return 1
    q = math.floor(1 / eps + TOL)
    L = n + q - 1
    total = count_orbits(F, L)
    if total > cap:
        raise ExactComputationRefused(total, cap)
    arr = enumerate_orbits(F, L).as_array()
    d = F.space.dist
    w = np.zeros((arr.shape[0], arr.shape[0]))
    for c in range(L):
        col = arr[:, c]
        np.maximum(w, d[np.ix_(col, col)] / (max(0, c - n + 1) + 1), out=w)
    return separated_from_distances(w, eps, "exact", cap).value


def verify_shift_inequalities(F: FiniteRelation, n: int, eps: float,
                              cap: int = DEFAULT_VERTEX_CAP) -> TheoremCheckResult:
    """s_{n,ε}(F) <= s_{n,ε}(σ) <= s_{n+k,ε}(F) with k the least integer, 1/k < ε."""
    k = math.floor(1 / eps) + 1
    inst = f"{describe(F)}; n={n}, eps={eps}, k={k}"
    try:
        sF = _exact_s(F, n, eps, cap)
        ss = shift_separation_count(F, n, eps, cap)
        sFk = _exact_s(F, n + k, eps, cap)
    except ExactComputationRefused as exc:
        return _skipped("shift", inst, str(exc))
    return _finish(TheoremCheckResult(
        "shift", inst, {"s_n(F)": sF, "s_n(sigma)": ss, "s_n+k(F)": sFk, "k": k},
        [("s_n(F)", "<=", "s_n(sigma)"), ("s_n(sigma)", "<=", "s_n+k(F)")],
        note="prefix metric is exact at this scale; no truncation band"))


def random_relation(rng: np.random.Generator, m: int, density: float,
                    discrete: bool = False) -> FiniteRelation:
    """Random relation on ``m`` points of [0, 1]; empty rows get one random image."""
    adj = rng.random((m, m)) < density
    for i in np.flatnonzero(~adj.any(axis=1)):
        adj[i, rng.integers(m)] = True
    if discrete or m == 1:
        space = MetricPointSet.discrete(list(range(m)))
    else:
        while True:
            xs = np.round(rng.random(m), 6)
            if len(set(xs.tolist())) == m:
                break
        space = MetricPointSet.from_coords([str(x) for x in xs])
    return FiniteRelation(space, adj)


def random_campaign(seed: int = 0, count: int = 100, min_points: int = 3, max_points: int = 6,
                    ks: Sequence[int] = (2, 3), threads: int = 1) -> list[TheoremCheckResult]:
    """Entropy-level checks (iterates, inverse after core, core) on random relations."""
    rng = np.random.default_rng(seed)
    rels = [random_relation(rng, int(rng.integers(min_points, max_points + 1)),
                            float(rng.uniform(0.3, 0.8))) for _ in range(count)]

    def run(F):
        out = [verify_iterate_bounds(F, k) for k in ks]
        core, _ = surjective_core(F)
        out.append(verify_inverse_entropy(core))
        out.append(verify_core_entropy(F))
        return out

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        chunks = list(pool.map(run, rels))
    return [r for chunk in chunks for r in chunk]


def format_results(results: Sequence[TheoremCheckResult]) -> str:
    lines = []
    for r in results:
        qs = ", ".join(f"{k}={_fmt(v)}" for k, v in r.quantities.items())
        lines.append(f"{r.verdict.upper():8s} {r.theorem:28s} {qs}" + (f"  [{r.note}]" if r.note else ""))
    return "\n".join(lines)


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


__all__ = [
    "TheoremCheckResult", "NotSurjectiveError", "format_results", "random_campaign",
    "random_relation", "semiconjugacy_hypothesis", "shift_separation_count",
    "verify_conjugacy", "verify_core_entropy", "verify_inverse_entropy",
    "verify_iterate_bounds", "verify_lemma_iterate_counts", "verify_sandwich",
    "verify_semiconjugacy", "verify_shift_inequalities",
]
