"""Command-line interface.

Verbs: evaluate, compare, trace, axioms, guarantee, witness.
Exit codes: 0 converged/pass, 1 input error, 2 divergence detected,
3 iteration budget exhausted, 4 axiom-matrix mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import sys

from . import axioms as ax
from . import io as graph_io
from .engine import (
    COMPARISON_SEMANTICS,
    Converged,
    IterationConfig,
    Oscillating,
    SEMANTICS_NAMES,
    build_divergence_witness,
    divergence_params,
    guarantee as engine_guarantee,
    iterate,
    registry,
    semantics_needs_delta,
)
from .errors import BwagError, NonFiniteIteration
from .graph import builtin
from .influences import INFLUENCE_KINDS, Influence

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DIVERGED = 2
EXIT_BUDGET = 3
EXIT_MATRIX_MISMATCH = 4


def round3(x: float) -> float:
    """Round half away from zero at three decimals."""
    m = math.floor(abs(x) * 1000.0 + 0.5) / 1000.0
    return math.copysign(m, x) if m != 0.0 else 0.0


def fmt3(x: float) -> str:
    return f"{round3(x):.3f}"


def _render_table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(header[c]), *(len(r[c]) for r in rows)) if rows
              else len(header[c]) for c in range(len(header))]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    return "\n".join(lines)


def _render_csv(header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().rstrip("\n")


def _emit(fmt: str, header: list[str], display_rows: list[list[str]],
          raw_rows: list[list], json_payload) -> None:
    if fmt == "table":
        print(_render_table(header, display_rows))
    elif fmt == "csv":
        print(_render_csv(header, raw_rows))
    else:
        print(json.dumps(json_payload, indent=2))


def _load_graph(args):
    if args.builtin and args.graph:
        raise BwagError("pass either --builtin or --graph, not both")
    if args.builtin:
        return builtin(args.builtin)
    if args.graph:
        return graph_io.load(args.graph)
    raise BwagError("a graph is required: --builtin NAME or --graph PATH")


def _resolve_semantics(name: str, delta: float | None):
    if name not in SEMANTICS_NAMES:
        raise BwagError(f"unknown semantics {name!r}; known: "
                        f"{', '.join(sorted(SEMANTICS_NAMES))}")
    if semantics_needs_delta(name):
        if delta is None:
            raise BwagError(f"semantics {name!r} needs --delta")
        return registry(name, delta)
    return registry(name)


def _config(args, detect_cycles: bool = True, record_trace: bool = False):
    return IterationConfig(tolerance=args.tol, max_iterations=args.max_iter,
                           detect_cycles=detect_cycles, record_trace=record_trace)


# ---------------------------------------------------------------------------
# evaluate / trace
# ---------------------------------------------------------------------------

def _cmd_evaluate(args) -> int:
    wasa = _load_graph(args)
    sem = _resolve_semantics(args.semantics, args.delta)
    try:
        out = iterate(wasa, sem, _config(args))
    except NonFiniteIteration as exc:
        print(f"diverged: {exc}")
        return EXIT_DIVERGED
    if isinstance(out, Converged):
        header = ["argument", "degree"]
        disp = [[lab, fmt3(d)] for lab, d in zip(wasa.labels, out.degrees)]
        raw = [[lab, repr(float(d))] for lab, d in zip(wasa.labels, out.degrees)]
        payload = {"status": "converged", "semantics": sem.describe(),
                   "iterations": out.iterations, "residual": out.residual,
                   "degrees": {lab: float(d)
                               for lab, d in zip(wasa.labels, out.degrees)}}
        _emit(args.format, header, disp, raw, payload)
        return EXIT_OK
    if isinstance(out, Oscillating):
        print(f"oscillating: period {out.period}, detected at iteration "
              f"{out.detected_at}")
        header = ["state"] + list(wasa.labels)
        disp = [[f"f{k}"] + [fmt3(x) for x in vec]
                for k, vec in enumerate(out.cycle)]
        raw = [[f"f{k}"] + [repr(float(x)) for x in vec]
               for k, vec in enumerate(out.cycle)]
        payload = {"status": "oscillating", "semantics": sem.describe(),
                   "period": out.period, "detected_at": out.detected_at,
                   "cycle": [[float(x) for x in vec] for vec in out.cycle]}
        _emit(args.format, header, disp, raw, payload)
        return EXIT_DIVERGED
    print(f"budget exhausted after {args.max_iter} iterations "
          f"(residual {out.residual:.3e})")
    return EXIT_BUDGET


def _cmd_trace(args) -> int:
    wasa = _load_graph(args)
    sem = _resolve_semantics(args.semantics, args.delta)
    try:
        out = iterate(wasa, sem, _config(args, record_trace=True))
    except NonFiniteIteration as exc:
        print(f"diverged: {exc}")
        return EXIT_DIVERGED
    header = ["iteration"] + list(wasa.labels)
    disp = [[str(k)] + [fmt3(x) for x in vec] for k, vec in enumerate(out.trace)]
    raw = [[str(k)] + [repr(float(x)) for x in vec]
           for k, vec in enumerate(out.trace)]
    payload = {"semantics": sem.describe(),
               "status": type(out).__name__.lower(),
               "trace": [[float(x) for x in vec] for vec in out.trace]}
    _emit(args.format, header, disp, raw, payload)
    if isinstance(out, Converged):
        return EXIT_OK
    if isinstance(out, Oscillating):
        return EXIT_DIVERGED
    return EXIT_BUDGET


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def _cmd_compare(args) -> int:
    wasa = _load_graph(args)
    header = ["semantics", "delta"] + list(wasa.labels)
    disp, raw = [], []
    payload_rows = {}
    for name in COMPARISON_SEMANTICS:
        needs = semantics_needs_delta(name)
        sem = registry(name, args.delta) if needs else registry(name)
        delta_str = f"{args.delta:g}" if needs else "-"
        try:
            out = iterate(wasa, sem, _config(args))
        except NonFiniteIteration:
            out = None
        if isinstance(out, Converged):
            disp.append([name, delta_str] + [fmt3(d) for d in out.degrees])
            raw.append([name, delta_str] + [repr(float(d)) for d in out.degrees])
            payload_rows[name] = [float(d) for d in out.degrees]
        else:
            disp.append([name, delta_str] + ["div"] * wasa.n)
            raw.append([name, delta_str] + ["div"] * wasa.n)
            payload_rows[name] = None
    payload = {"arguments": list(wasa.labels), "delta": args.delta,
               "degrees": payload_rows}
    _emit(args.format, header, disp, raw, payload)
    return EXIT_OK


# ---------------------------------------------------------------------------
# axioms
# ---------------------------------------------------------------------------

def _mark(v: ax.AxiomVerdict) -> str:
    return "+" if v.passed else "-"


def _cmd_axioms(args) -> int:
    if args.fixtures:
        rows = ax.fixture_report(args.trials, args.seed, args.n_max)
        header = ["fixture", "target", "failed-axioms", "status"]
        disp = []
        all_ok = True
        for fx, verdicts, ok in rows:
            failed = ",".join(sorted(a for a, v in verdicts.items()
                                     if not v.passed)) or "(none)"
            status = "advisory" if getattr(fx, "advisory", False) \
                else ("ok" if ok else "MISMATCH")
            all_ok = all_ok and (status != "MISMATCH")
            disp.append([fx.subject.name, fx.target, failed, status])
        payload = [{"fixture": fx.subject.name, "target": fx.target,
                    "failed": sorted(a for a, v in verdicts.items() if not v.passed),
                    "ok": bool(ok)}
                   for fx, verdicts, ok in rows]
        _emit(args.format, header, disp, disp, payload)
        return EXIT_OK if all_ok else EXIT_MATRIX_MISMATCH

    target = args.target.upper()
    blocks = []
    ok = True
    if target in ("AGG", "ALL"):
        am = ax.alpha_matrix(args.trials, args.seed, args.n_max)
        header = ["aggregation"] + [a.replace("_alpha", "") for a in ax.ALPHA_MATRIX_AXIOMS]
        rows = [[kind] + [_mark(am[kind][a]) for a in ax.ALPHA_MATRIX_AXIOMS]
                for kind in ax.ALPHA_MATRIX_ORDER]
        blocks.append((header, rows, {
            kind: {a: am[kind][a].passed for a in ax.ALPHA_MATRIX_AXIOMS}
            for kind in ax.ALPHA_MATRIX_ORDER}))
        ok = ok and all(am[k][a].passed == want
                        for k, row in ax.EXPECTED_ALPHA_MATRIX.items()
                        for a, want in row.items())
    if target in ("INF", "ALL"):
        im = ax.iota_matrix(args.trials, args.seed)
        header = ["influence"] + list(ax.IOTA_MATRIX_AXIOMS)
        rows = [[kind] + [_mark(im[kind][a]) for a in ax.IOTA_MATRIX_AXIOMS]
                for kind in ax.IOTA_MATRIX_ORDER]
        blocks.append((header, rows, {
            kind: {a: im[kind][a].passed for a in ax.IOTA_MATRIX_AXIOMS}
            for kind in ax.IOTA_MATRIX_ORDER}))
        ok = ok and all(im[k][a].passed == want
                        for k, row in ax.EXPECTED_IOTA_MATRIX.items()
                        for a, want in row.items())
    if not blocks:
        raise BwagError("--target must be AGG, INF or ALL")
    if args.format == "json":
        print(json.dumps([b[2] for b in blocks], indent=2))
    else:
        out = []
        for header, rows, _ in blocks:
            out.append(_render_table(header, rows) if args.format == "table"
                       else _render_csv(header, rows))
        print("\n\n".join(out))
    return EXIT_OK if ok else EXIT_MATRIX_MISMATCH


# ---------------------------------------------------------------------------
# guarantee / witness
# ---------------------------------------------------------------------------

def _cmd_guarantee(args) -> int:
    wasa = _load_graph(args)
    sem = _resolve_semantics(args.semantics, args.delta)
    report = engine_guarantee(wasa, sem)
    if args.format == "json":
        print(json.dumps({"guaranteed": report.guaranteed,
                          "theorem": report.theorem, "reason": report.reason,
                          "details": report.details}, indent=2))
    elif report.guaranteed:
        print(f"guaranteed: {report.theorem} ({report.reason})")
    else:
        print(f"no guarantee: {report.reason}")
    return EXIT_OK


def _cmd_witness(args) -> int:
    kind = args.influence.replace("-", "_")
    if kind not in INFLUENCE_KINDS:
        raise BwagError(f"unknown influence {args.influence!r}; known: "
                        f"{', '.join(k.replace('_', '-') for k in INFLUENCE_KINDS)}")
    if kind in ("linear", "sigmoid"):
        if args.delta is None:
            raise BwagError(f"influence {kind!r} needs --delta")
        inf = Influence(kind, args.delta)
    else:
        inf = Influence(kind)
    params = divergence_params(inf)
    wasa = build_divergence_witness(params.k, params.v, params.w,
                                    inf.value_domain)
    text = graph_io.serialize(wasa)
    summary = (f"divergence witness for {inf.describe()}: k={params.k} "
               f"v={params.v:g} w={params.w:g} "
               f"({wasa.n} arguments, indegree {2 * params.k})")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(summary)
        print(f"written to {args.out}")
    else:
        print(text, end="")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bwag",
        description="Acceptability degrees for bipolar weighted argumentation "
                    "graphs under composable aggregation/influence semantics.")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "csv", "json"),
                        default="table")
    common.add_argument("--seed", type=int, default=42,
                        help="seed for randomized checks (axioms)")

    graph_opts = argparse.ArgumentParser(add_help=False)
    graph_opts.add_argument("--graph", help="path to a graph JSON document")
    graph_opts.add_argument("--builtin", help="builtin graph name "
                                              "(ex1, ex2, exp-counter)")

    iter_opts = argparse.ArgumentParser(add_help=False)
    iter_opts.add_argument("--tol", type=float, default=1e-9)
    iter_opts.add_argument("--max-iter", type=int, default=10_000)
    iter_opts.add_argument("--delta", type=float, default=None,
                           help="damping factor for linear/sigmoid influence")

    p = sub.add_parser("evaluate", parents=[common, graph_opts, iter_opts],
                       help="iterate one semantics to a fixpoint")
    p.add_argument("--semantics", required=True)
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("trace", parents=[common, graph_opts, iter_opts],
                       help="like evaluate, printing every iterate")
    p.add_argument("--semantics", required=True)
    p.set_defaults(func=_cmd_trace)

    p = sub.add_parser("compare", parents=[common, graph_opts, iter_opts],
                       help="evaluate all bipolar semantics side by side")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("axioms", parents=[common],
                       help="reproduce the characteristics matrix")
    p.add_argument("--target", choices=("AGG", "INF", "ALL", "agg", "inf", "all"),
                   default="ALL")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--n-max", type=int, default=6)
    p.add_argument("--fixtures", action="store_true",
                   help="run the independence fixtures instead of the matrix")
    p.set_defaults(func=_cmd_axioms)

    p = sub.add_parser("guarantee", parents=[common, graph_opts, iter_opts],
                       help="check the convergence certificates")
    p.add_argument("--semantics", required=True)
    p.set_defaults(func=_cmd_guarantee)

    p = sub.add_parser("witness", parents=[common],
                       help="write a divergence witness graph")
    p.add_argument("--influence", required=True)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=_cmd_witness)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (BwagError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
