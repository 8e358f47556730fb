"""Batch command-line front end.

Every subcommand prints one JSON report (stdout or ``--out``) and a one-line
summary on stderr. Exit codes: 0 pass, 1 verification failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from collections import Counter
from pathlib import Path
from typing import Callable, Sequence

from . import abelian, quintuple as qg, relations as rel
from .symbols import DegreeWindow, enumerate_symbols

SCHEMA = 1
MASK64 = (1 << 64) - 1
MAX_LISTED_FAILURES = 20


class UsageError(Exception):
    pass


def trial_seed(seed: int, index: int) -> int:
    """splitmix64 output for stream ``seed`` at position ``index``."""
    z = (seed + (index + 1) * 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def _window(M: int) -> DegreeWindow:
    if M < 1:
        raise UsageError(f"--window must be >= 1, got {M}")
    return DegreeWindow(M)


def _positive(name: str, value: int) -> int:
    if value < 1:
        raise UsageError(f"--{name} must be >= 1, got {value}")
    return value


def _group(text: str) -> abelian.GroupSpec:
    try:
        return abelian.GroupSpec.parse(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _contexts(text: str) -> int | None:
    if text == "full":
        return None
    if text.startswith("sample:") and text[7:].isdigit() and int(text[7:]) > 0:
        return int(text[7:])
    raise UsageError(f"--contexts must be 'full' or 'sample:N', got {text!r}")


# --- commands ------------------------------------------------------------------


def cmd_universal_group(args) -> tuple[dict, bool]:
    w = _window(args.window)
    U = rel.universal_group(w)
    if args.matrix_out:
        symbols = enumerate_symbols(w)
        M = rel.relation_matrix(U.relations, symbols)
        Path(args.matrix_out).write_text(abelian.matrix_to_json(M, [str(s) for s in symbols]) + "\n")
    expected = {"free_rank": 4 * w.M + 3, "torsion": [2, 2]}
    results = {**U.to_json(), "expected": expected}
    ok = U.group.to_json() == expected and U.named_basis
    return results, ok


def cmd_spans_equal(args) -> tuple[dict, bool]:
    w = _window(args.window)
    equal = rel.spans_equivalent(w)
    control = rel.spans_equivalent(w, drop_families=["QQ"])
    results = {
        "window": w.M,
        "spans_equal": equal,
        "negative_control": {"dropped_families": ["QQ"], "spans_equal": control},
    }
    return results, equal and not control


def cmd_crosscheck_gu(args) -> tuple[dict, bool]:
    w = _window(args.window)
    report = rel.crosscheck_gU(w)
    return report.to_json(), report.ok


def cmd_delta1_tables(args) -> tuple[dict, bool]:
    w = _window(args.window)
    G = _group(args.group)
    U = rel.universal_group(w)
    hom = abelian.hom_group(U.group, G)
    if not G.is_finite():
        raise UsageError(
            f"cannot enumerate tables over the infinite group {G}; Hom(G_U, G) = {hom}"
        )
    tables = rel.delta1_tables(G, w, U)
    distinct = len({t.key() for t in tables})
    failures = []
    for i, t in enumerate(tables):
        m = rel.check_membership(t)
        if not m.ok:
            failures.append({"table": i, **m.to_json(limit=5)})
    results = {
        "window": w.M,
        "coefficient_group": G.to_json(),
        "universal_group": U.group.to_json(),
        "hom_group": hom.to_json(),
        "expected_count": hom.order(),
        "table_count": len(tables),
        "distinct_tables": distinct,
        "membership_failures": failures[:MAX_LISTED_FAILURES],
        "membership_failure_count": len(failures),
    }
    if args.tables:
        results["tables"] = [t.to_json() for t in tables]
    ok = len(tables) == hom.order() == distinct and not failures
    return results, ok


def _verify_quintuple(q: qg.PlaneQuintuple) -> dict:
    """Relation, structure and 20 oracle comparisons for one quintuple."""
    d = qg.bifurcation_diagram(q)
    check = qg.qq_relation_check(d)
    oracle_mismatch = []
    for h in d.perp:
        got = qg.face_count_oracle(q, h.line, d.basis.point(h.direction))
        if got != h.count:
            oracle_mismatch.append({"perp_line": h.line + 1, "expected": h.count, "oracle": got})
    perp_dirs = {h.line: [] for h in d.perp}
    for h in d.perp:
        perp_dirs[h.line].append(h)
    for c in d.crossings:
        # a point on the entered side of l_k, away from l_k^perp
        far = next(h for h in perp_dirs[c.line] if qg.cross2(c.direction, h.direction) > 0)
        pt = (c.direction[0] + far.direction[0], c.direction[1] + far.direction[1])
        got = qg.face_count_oracle(q, c.line, d.basis.point(pt))
        if got != c.far_count():
            oracle_mismatch.append({"crossing_line": c.line + 1, "expected": c.far_count(), "oracle": got})
    structural = d.structural_violations()
    return {
        "diagram": d,
        "check": check,
        "oracle_checks": len(d.perp) + len(d.crossings),
        "oracle_mismatch": oracle_mismatch,
        "structural": structural,
        "ok": check.verdict and not oracle_mismatch and not structural,
    }


def _trial_quintuples(args) -> list[tuple[int, int, qg.PlaneQuintuple]]:
    trials = _positive("trials", args.trials)
    bound = _positive("bound", args.bound)
    out = []
    for i in range(trials):
        s = trial_seed(args.seed, i)
        out.append((i, s, qg.random_quintuple(s, bound, m=args.m)))
    return out


def _load_quintuple(path: str) -> qg.PlaneQuintuple:
    try:
        q = qg.PlaneQuintuple.from_json(Path(path).read_text())
        qg.left_kernel_U(q)
        return q
    except (OSError, ValueError) as exc:
        raise UsageError(f"invalid quintuple file {path}: {exc}") from None


def cmd_qq_verify(args) -> tuple[dict, bool]:
    if args.input:
        q = _load_quintuple(args.input)
        r = _verify_quintuple(q)
        results = {
            "diagram": r["diagram"].to_json(),
            "check": r["check"].to_json(),
            "oracle_checks": r["oracle_checks"],
            "oracle_mismatch": r["oracle_mismatch"],
            "structural_violations": r["structural"],
        }
        return results, r["ok"]
    passed = 0
    oracle_checks = 0
    failures = []
    for i, s, q in _trial_quintuples(args):
        r = _verify_quintuple(q)
        oracle_checks += r["oracle_checks"]
        if r["ok"]:
            passed += 1
        else:
            failures.append(
                {
                    "trial": i,
                    "seed": s,
                    "quintuple": q.to_json(),
                    "check": r["check"].to_json(),
                    "oracle_mismatch": r["oracle_mismatch"],
                    "structural_violations": r["structural"],
                }
            )
    results = {
        "trials": args.trials,
        "passed": passed,
        "relation": f"Q^2_{args.m} = Q^2_{args.m - 1} (mod 2Q^2)",
        "oracle_checks": oracle_checks,
        "failure_count": len(failures),
        "failures": failures[:MAX_LISTED_FAILURES],
    }
    return results, passed == args.trials


def cmd_diagram_classes(args) -> tuple[dict, bool]:
    counts: Counter = Counter()
    witness = {}
    for i, s, q in _trial_quintuples(args):
        c = qg.classify_diagram(qg.bifurcation_diagram(q))
        counts[c] += 1
        witness.setdefault(c, {"trial": i, "seed": s, "quintuple": q.to_json()})
    classes = [
        {"class": str(c), "count": counts[c], "witness": witness[c]}
        for c in sorted(counts)
    ]
    results = {
        "trials": args.trials,
        "class_count": len(counts),
        "expected_class_count": 4,
        "classes": classes,
    }
    return results, len(counts) == 4


LEMMA1_FIXTURES = [
    ("nonzero_sum", [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, 0)], [1, 1, 1, 1], qg.NonZeroSumError),
    ("dependent_triple", [(1, 0, 0), (0, 1, 0), (-1, -1, 0), (0, 0, 0)], [1, 1, 1, 1], qg.DependentTripleError),
    ("non_positive_offset", [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)], [1, 0, 1, 1], qg.NonPositiveOffsetError),
]


def cmd_lemma1_verify(args) -> tuple[dict, bool]:
    trials = _positive("trials", args.trials)
    bound = _positive("bound", args.bound)
    passed = 0
    failures = []
    for i in range(trials):
        s = trial_seed(args.seed, i)
        vs, mus = qg.random_lemma1_input(s, bound)
        if qg.lemma1_interior_check(vs, mus):
            passed += 1
        else:
            failures.append({"trial": i, "seed": s, "v": [[str(x) for x in v] for v in vs], "mu": [str(m) for m in mus]})
    fixtures = []
    for name, vs, mus, expected in LEMMA1_FIXTURES:
        try:
            qg.lemma1_interior_check(vs, mus)
            raised = None
        except qg.LemmaPreconditionError as exc:
            raised = type(exc).__name__
        fixtures.append({"fixture": name, "expected": expected.__name__, "raised": raised})
    try:
        qg.check_bounded([qg._vec(v) for v in LEMMA1_FIXTURES[0][1]])
        unbounded = False
    except qg.UnboundedRegionError:
        unbounded = True
    results = {
        "trials": trials,
        "passed": passed,
        "failures": failures[:MAX_LISTED_FAILURES],
        "precondition_fixtures": fixtures,
        "unbounded_path_detected": unbounded,
    }
    ok = passed == trials and all(f["raised"] == f["expected"] for f in fixtures) and unbounded
    return results, ok


def cmd_section_e(args) -> tuple[dict, bool]:
    n = _positive("n", args.n)
    w = _window(args.window)
    sample = _contexts(args.contexts)
    table = rel.section_e_table(n, w)
    ctxs = rel.contexts_for(n, w, sample=sample, seed=args.seed)
    report = rel.check_membership(table, ctxs)
    results = {"contexts_mode": args.contexts, **report.to_json()}
    return results, report.ok


COMMANDS: dict[str, Callable] = {
    "universal-group": cmd_universal_group,
    "spans-equal": cmd_spans_equal,
    "crosscheck-gu": cmd_crosscheck_gu,
    "delta1-tables": cmd_delta1_tables,
    "qq-verify": cmd_qq_verify,
    "diagram-classes": cmd_diagram_classes,
    "lemma1-verify": cmd_lemma1_verify,
    "section-e": cmd_section_e,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="orderone", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, *opts):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        for opt in opts:
            opt(p)
        return p

    window = lambda default: lambda p: p.add_argument("--window", type=int, default=default)  # noqa: E731
    trials = lambda p: (  # noqa: E731
        p.add_argument("--trials", type=int, default=1000),
        p.add_argument("--seed", type=int, default=7),
        p.add_argument("--bound", type=int, default=20),
    )
    degree = lambda p: p.add_argument("--m", type=int, default=0, help="degree of the quintuple point")  # noqa: E731

    add("universal-group", "truncated universal group",
        window(1), lambda p: p.add_argument("--matrix-out", help="export the relation matrix as JSON"))
    add("spans-equal", "raw vs simplified relation lattices", window(1))
    add("crosscheck-gu", "closed-form g_U against the quotient", window(1))
    add("delta1-tables", "enumerate phi o g_U over a finite group",
        window(1), lambda p: p.add_argument("--group", default="2"),
        lambda p: p.add_argument("--tables", action="store_true", help="include every table in the report"))
    add("qq-verify", "quintuple-point relation on random quintuples", trials, degree,
        lambda p: p.add_argument("--input", help="verify a single quintuple from a JSON file"))
    add("diagram-classes", "census of bifurcation diagram classes", trials, degree)
    add("lemma1-verify", "interior lemma on random inputs", trials)
    add("section-e", "all-Q indicator satisfies the lifted relations",
        window(2), lambda p: p.add_argument("--n", type=int, default=2),
        lambda p: p.add_argument("--contexts", default="full"),
        lambda p: p.add_argument("--seed", type=int, default=0))
    return parser


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out")}


def _execute(args) -> tuple[dict, int]:
    start = time.perf_counter()
    results, ok = COMMANDS[args.command](args)
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "config": _config(args),
        "results": results,
        "verdict": bool(ok),
        "wall_time": round(time.perf_counter() - start, 3),
    }
    return report, (0 if ok else 1)


def execute(argv: Sequence[str] | None = None) -> tuple[dict, int]:
    """Run a command and return ``(report, exit_code)`` without printing it."""
    return _execute(build_parser().parse_args(argv))


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        report, code = _execute(args)
    except SystemExit as exc:  # argparse already printed the usage message
        return exc.code if isinstance(exc.code, int) else 2
    except UsageError as exc:
        print(f"orderone: error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    print(
        f"{report['command']}: {'PASS' if report['verdict'] else 'FAIL'} ({report['wall_time']}s)",
        file=sys.stderr,
    )
    return code


def main() -> None:
    sys.exit(run())
