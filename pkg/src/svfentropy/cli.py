"""Command-line front end.

Exit status is 0 on success, 2 when a verification fails and 1 for usage
or load errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .core import FiniteRelation, evaluate, iterate, surjective_core
from .entropy import (cycle_census, estimate_entropy, path_count_slope, run_detectors,
                      sft_entropy)
from .harness import (format_results, random_campaign, verify_conjugacy, verify_core_entropy,
                      verify_inverse_entropy, verify_iterate_bounds, verify_lemma_iterate_counts,
                      verify_sandwich, verify_shift_inequalities)
from .interval import (IntervalSVF, PLHomeomorphism, compose_interval, discretize,
                       evaluate_interval)
from .io import SpecError, parse_spec

DEFAULT_EPS = "0.25,0.125,0.0625,0.03125,0.015625"
DEFAULT_GRID = 257
CSV_COLUMNS = ["eps", "n", "s_value", "exact", "log_s_over_n", "h_eps"]
THEOREMS = ("iterates", "inverse", "core", "shift", "lemma", "sandwich", "conjugacy", "campaign")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _eps_list(text: str) -> list[float]:
    try:
        vals = [float(Fraction(t.strip())) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot read epsilon list {text!r}") from None
    if not vals:
        raise UsageError("empty epsilon list")
    return vals


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _load(args):
    spec = parse_spec(args.spec)
    return spec, spec.build()


def _grid(args, spec) -> int:
    return args.grid or spec.grid or DEFAULT_GRID


def _finite(args, spec, system) -> FiniteRelation:
    if isinstance(system, IntervalSVF):
        return discretize(system, _grid(args, spec))
    return system


def report_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    h_by_eps = dict(zip(report.eps_schedule, report.h_eps))
    for row in report.rows:
        w.writerow([_fmt(row.epsilon), row.n, row.s_value, int(row.exact),
                    _fmt(row.log_s_over_n), _fmt(h_by_eps[row.epsilon])])
    exact = int(not report.partial)
    w.writerow(["summary", "", "", exact, "", _fmt(report.h_estimate)])
    return buf.getvalue()


def _entropy_report(args, spec, system):
    kw = dict(n_max=args.nmax, mode=args.mode, detectors=False, threads=args.threads)
    if isinstance(system, IntervalSVF):
        kw["grid"] = _grid(args, spec)
    return estimate_entropy(system, _eps_list(args.eps), **kw)


def cmd_eval(args) -> int:
    spec, system = _load(args)
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    if isinstance(system, IntervalSVF):
        try:
            x = Fraction(args.x)
        except (ValueError, ZeroDivisionError):
            raise UsageError(f"cannot read point {args.x!r}") from None
        G = system
        for _ in range(args.k - 1):
            G = compose_interval(system, G)
        parts = evaluate_interval(G, x)
        print(" U ".join(f"[{lo}, {hi}]" if lo != hi else f"{{{lo}}}" for lo, hi in parts))
        return 0
    label = _label(system, args.x)
    img = evaluate(iterate(system, args.k), label)
    print("{" + ", ".join(str(v) for v in img) + "}")
    return 0


def _label(F: FiniteRelation, text: str):
    for lab in F.labels:
        if str(lab) == text:
            return lab
    raise UsageError(f"unknown label {text!r}; labels are {[str(v) for v in F.labels]}")


def cmd_entropy(args) -> int:
    spec, system = _load(args)
    if args.oracle:
        F = _finite(args, spec, system)
        print(f"{sft_entropy(F):.6f}")
        return 0
    rep = _entropy_report(args, spec, system)
    text = report_csv(rep)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    for e, h, hu in zip(rep.eps_schedule, rep.h_eps, rep.h_eps_upper):
        print(f"eps={_fmt(e)}  h_eps={h:.6f}  upper={hu:.6f}")
    print(f"h_estimate={rep.h_estimate:.6f}" + ("  (partial table)" if rep.partial else ""))
    if rep.bias_note:
        print(f"note: {rep.bias_note}")
    return 0


def cmd_oracle(args) -> int:
    spec, system = _load(args)
    F = _finite(args, spec, system)
    h = sft_entropy(F)
    print(f"sft_entropy={h:.12f}")
    print(f"path_count_slope(n={args.n})={path_count_slope(F, args.n):.12f}")
    return 0


def cmd_detect(args) -> int:
    spec, system = _load(args)
    F = _finite(args, spec, system)
    certs = run_detectors(F, args.max_len)
    if not certs:
        print("no certificate")
    for c in certs:
        print(f"{c.kind}: bound={c.bound:.6f}  witness={c.witness}")
    if args.census:
        for length, cycles in cycle_census(F, args.max_len).items():
            print(f"cycles of length {length}: {len(cycles)}  {cycles}")
    return 0


def _checks(args, spec, system) -> list:
    th = args.theorem
    if th == "campaign":
        return random_campaign(seed=args.seed, threads=args.threads)
    if th == "conjugacy":
        if isinstance(system, IntervalSVF):
            return [verify_conjugacy(system, PLHomeomorphism.reflection(), grid=_grid(args, spec))]
        return [verify_conjugacy(system, list(reversed(range(len(system)))))]
    F = _finite(args, spec, system)
    eps = _eps_list(args.eps)
    if th == "iterates":
        return [verify_iterate_bounds(F, args.k)]
    if th == "inverse":
        core, _ = surjective_core(F)
        return [verify_inverse_entropy(core)]
    if th == "core":
        return [verify_core_entropy(F)]
    jobs = []
    for e in eps:
        if th == "shift":
            jobs.append((verify_shift_inequalities, (F, args.n, e)))
        elif th == "lemma":
            jobs.append((verify_lemma_iterate_counts, (F, args.k, args.n, e)))
        elif th == "sandwich":
            jobs.append((verify_sandwich, (F, args.n, e)))
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        return list(pool.map(lambda job: job[0](*job[1]), jobs))


def cmd_verify(args) -> int:
    spec, system = _load(args)
    results = _checks(args, spec, system)
    text = format_results(results)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    failed = [r for r in results if r.verdict == "fail"]
    passed = sum(r.verdict == "pass" for r in results)
    skipped = sum(r.verdict == "skipped" for r in results)
    print(f"{'FAIL' if failed else 'PASS'}: {passed} passed, {len(failed)} failed, {skipped} skipped")
    return 2 if failed else 0


def cmd_report(args) -> int:
    spec, system = _load(args)
    out = Path(args.out or f"{spec.name or 'report'}-report")
    out.mkdir(parents=True, exist_ok=True)
    rep = _entropy_report(args, spec, system)
    (out / "entropy.csv").write_text(report_csv(rep), encoding="utf-8")
    F = _finite(args, spec, system)
    lines = [f"system: {spec.name}", f"points: {len(F)}",
             f"sft_entropy: {sft_entropy(F):.12f}", f"h_estimate: {rep.h_estimate:.12f}"]
    if rep.bias_note:
        lines.append(f"note: {rep.bias_note}")
    for c in run_detectors(F, args.max_len):
        lines.append(f"certificate {c.kind}: bound={c.bound:.12f} witness={c.witness}")
    core, _ = surjective_core(F)
    checks = [verify_iterate_bounds(F, 2), verify_iterate_bounds(F, 3),
              verify_inverse_entropy(core), verify_core_entropy(F)]
    lines.append(format_results(checks))
    (out / "summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("\n".join(lines))
    print(f"wrote {out / 'entropy.csv'} and {out / 'summary.txt'}")
    return 2 if any(c.verdict == "fail" for c in checks) else 0


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("spec", help="spec file or bundled system name")
    shared.add_argument("--eps", default=DEFAULT_EPS, help="comma-separated epsilon list")
    shared.add_argument("--nmax", type=int, default=14, help="largest orbit length")
    shared.add_argument("--grid", type=int, default=None, help="grid size for interval functions")
    shared.add_argument("--mode", choices=("exact", "greedy"), default="exact")
    shared.add_argument("--out", default=None, help="output file or directory")
    shared.add_argument("--threads", type=int, default=1)
    shared.add_argument("--seed", type=int, default=0, help="seed for random campaigns")
    shared.add_argument("--max-len", type=int, default=12, help="cycle length limit for detectors")

    p = _Parser(prog="svfentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    s = sub.add_parser("eval", parents=[shared], help="image of a point under F^k")
    s.add_argument("x", help="label (finite) or number (interval)")
    s.add_argument("--k", type=int, default=1)
    s.set_defaults(func=cmd_eval)
    s = sub.add_parser("entropy", parents=[shared], help="entropy table and estimate")
    s.add_argument("--oracle", action="store_true", help="print the exact spectral entropy only")
    s.set_defaults(func=cmd_entropy)
    s = sub.add_parser("oracle", parents=[shared], help="exact entropy from the adjacency matrix")
    s.add_argument("--n", type=int, default=1000, help="orbit length for the count slope")
    s.set_defaults(func=cmd_oracle)
    s = sub.add_parser("detect", parents=[shared], help="positive-entropy certificates")
    s.add_argument("--census", action="store_true", help="also list simple cycles")
    s.set_defaults(func=cmd_detect)
    s = sub.add_parser("verify", parents=[shared], help="check an entropy inequality")
    s.add_argument("--theorem", choices=THEOREMS, required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--n", type=int, default=3)
    s.set_defaults(func=cmd_verify)
    s = sub.add_parser("report", parents=[shared], help="entropy CSV plus summary directory")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SpecError, FileNotFoundError) as exc:
        print(f"load error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, NotImplementedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
