"""``mipdom`` command line.

Verbs: compute, report, correlate, running, emit-lp, size. Global options
may be given before or after the verb.

Exit codes: 0 success, 2 input error, 3 backend error or a solve that
stopped short of the gap target, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .core import read_csv, translate_nonnegative
from .errors import BackendError, InvalidInputError, VerificationError
from .harness import (
    ReportDocument,
    build_report,
    correlate,
    dump_json,
    load_algorithms,
    load_run_series,
    running_csv,
    running_matrix,
)
from .mip_model import build_model, emit_lp, model_size
from .solver import BACKENDS, DEFAULT_GAP, SolveOptions, SolveStatus, dom, highs_command

EXIT_OK, EXIT_INPUT, EXIT_BACKEND, EXIT_VERIFY = 0, 2, 3, 4
ENV_COMMAND = "DOM_EXTERNAL_CMD"

_GLOBAL_DEFAULTS = {
    "backend": "auto",
    "gap": DEFAULT_GAP,
    "time_limit": None,
    "external_cmd": None,
    "dp_limit": 20,
    "hv_ref": None,
    "deterministic": False,
    "json": None,
}


def _time_limit(text: str) -> float | None:
    return None if text.lower() in ("none", "inf", "") else float(text)


def _vector(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _global_options(suppress: bool) -> argparse.ArgumentParser:
    # the subcommand copy uses SUPPRESS so it only overrides when given
    kw = (lambda k: {"default": argparse.SUPPRESS}) if suppress else (
        lambda k: {"default": _GLOBAL_DEFAULTS[k]})
    g = argparse.ArgumentParser(add_help=False)
    g.add_argument("--backend", choices=BACKENDS, **kw("backend"))
    g.add_argument("--gap", type=float, help="relative gap target", **kw("gap"))
    g.add_argument("--time-limit", type=_time_limit, metavar="SECONDS", **kw("time_limit"))
    g.add_argument("--external-cmd", metavar="TEMPLATE",
                   help=f"solver command; 'highs' runs the bundled driver (env: {ENV_COMMAND})",
                   **kw("external_cmd"))
    g.add_argument("--dp-limit", type=int, metavar="N", **kw("dp_limit"))
    g.add_argument("--hv-ref", type=_vector, metavar="R1,R2,...", **kw("hv_ref"))
    g.add_argument("--deterministic", action="store_true", **kw("deterministic"))
    g.add_argument("--json", metavar="PATH", help="also write JSON here ('-' for stdout)",
                   **kw("json"))
    return g


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mipdom", parents=[_global_options(False)],
                                 description="Dominance move between point sets.")
    sub = ap.add_subparsers(dest="verb", required=True)
    common = [_global_options(True)]

    c = sub.add_parser("compute", parents=common, help="DoM(P, Q) of two CSV point sets")
    c.add_argument("p_file")
    c.add_argument("q_file")
    c.add_argument("--emit-lp", metavar="PATH", help="write the MIP model and stop")

    e = sub.add_parser("emit-lp", parents=common, help="write the MIP model of a pair")
    e.add_argument("p_file")
    e.add_argument("q_file")
    e.add_argument("out", nargs="?", default="-")

    s = sub.add_parser("size", parents=common, help="variable and constraint counts")
    s.add_argument("n_p", type=int)
    s.add_argument("n_q", type=int)
    s.add_argument("m", type=int)

    r = sub.add_parser("report", parents=common, help="indicator table for a directory of sets")
    r.add_argument("directory")
    r.add_argument("--problem", default=None, help="label (default: directory name)")

    k = sub.add_parser("correlate", parents=common, help="correlate report JSON files")
    k.add_argument("reports", nargs="+")

    g = sub.add_parser("running", parents=common, help="running DoM matrix of a run")
    g.add_argument("directory")
    g.add_argument("--pivots", required=True,
                   help="comma-separated generations, may include 'terminal'")
    g.add_argument("--terminal", metavar="CSV")
    g.add_argument("--out", metavar="PATH", help="CSV destination (default stdout)")
    return ap


def _options(args) -> SolveOptions:
    cmd = args.external_cmd or os.environ.get(ENV_COMMAND) or None
    if cmd == "highs":
        cmd = highs_command()
    return SolveOptions(
        backend=args.backend,
        relative_gap_target=args.gap,
        time_limit=args.time_limit,
        external_command=cmd,
        dp_size_limit=args.dp_limit,
    )


def _emit_json(args, payload, out) -> None:
    if args.json is None:
        return
    text = dump_json(payload, deterministic=args.deterministic)
    if args.json == "-":
        out.write(text)
    else:
        Path(args.json).write_text(text)


def _write_model(p_file, q_file, dest, out) -> None:
    p, q = read_csv(p_file), read_csv(q_file)
    pt, qt, _ = translate_nonnegative(p, q)
    model = build_model(pt, qt)
    if dest == "-":
        emit_lp(model, out)
    else:
        with open(dest, "w") as fh:
            emit_lp(model, fh)


def _compute(args, out) -> int:
    if args.emit_lp:
        _write_model(args.p_file, args.q_file, args.emit_lp, out)
        print(f"model written to {args.emit_lp}", file=out)
        return EXIT_OK
    p, q = read_csv(args.p_file), read_csv(args.q_file)
    sol = dom(p, q, _options(args))
    lo, hi = sol.interval
    # human text is rounded; the JSON keeps full precision
    print(f"value:          {sol.value:.12g}", file=out)
    print(f"interval:       [{lo:.12g}, {hi:.12g}]", file=out)
    print(f"gap:            {sol.gap:.6g}", file=out)
    print(f"status:         {sol.status.value}", file=out)
    print(f"backend:        {sol.backend}", file=out)
    print(f"changed points: {sol.changed_points}", file=out)
    _emit_json(args, sol, out)
    return EXIT_OK if sol.status in (SolveStatus.OPTIMAL, SolveStatus.WITHIN_GAP) else EXIT_BACKEND


def _size(args, out) -> int:
    cont, binary, rows = model_size(args.n_p, args.n_q, args.m)
    print(f"continuous variables: {cont}", file=out)
    print(f"binary variables:     {binary}", file=out)
    print(f"constraints:          {rows}", file=out)
    _emit_json(args, {"continuous": cont, "binary": binary, "constraints": rows}, out)
    return EXIT_OK


def _report(args, out) -> int:
    algos = load_algorithms(args.directory)
    label = args.problem or Path(args.directory).resolve().name
    doc = build_report(algos, problem=label, opts=_options(args),
                       hv_ref=None if args.hv_ref is None else np.asarray(args.hv_ref))
    out.write(doc.to_text())
    _emit_json(args, doc, out)
    return EXIT_OK


def _correlate(args, out) -> int:
    docs = []
    for f in args.reports:
        try:
            data = json.loads(Path(f).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{f}: not JSON ({exc})") from exc
        docs.append(ReportDocument.from_dict(data))
    res = correlate(docs)
    out.write(res.to_text())
    _emit_json(args, res, out)
    return EXIT_OK


def _running(args, out) -> int:
    pivots = []
    for tok in args.pivots.split(","):
        tok = tok.strip()
        try:
            pivots.append(tok if tok == "terminal" else int(tok))
        except ValueError:
            raise InvalidInputError(f"bad pivot {tok!r}")
    series = load_run_series(args.directory, pivots, terminal=args.terminal)
    text = running_csv(running_matrix(series, _options(args)))
    if args.out:
        Path(args.out).write_text(text)
    else:
        out.write(text)
    return EXIT_OK


_VERBS = {
    "compute": _compute,
    "report": _report,
    "correlate": _correlate,
    "running": _running,
    "size": _size,
    "emit-lp": lambda a, out: (_write_model(a.p_file, a.q_file, a.out, out), EXIT_OK)[1],
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return _VERBS[args.verb](args, out)
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (InvalidInputError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
