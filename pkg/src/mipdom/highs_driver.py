"""Command-line bridge between an LP file and the HiGHS MIP solver.

Usage::

    python -m mipdom.highs_driver MODEL.lp SOLUTION.txt [--gap G] [--time-limit T]

Writes the solution-file grammar read by :func:`mipdom.solver.parse_solution`.
Exit status is 0 when a feasible solution was written, 1 otherwise.
"""

from __future__ import annotations

import argparse
import sys


def _parse_limit(text: str) -> float | None:
    if text.lower() in ("", "none", "inf"):
        return None
    return float(text)


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="mipdom.highs_driver")
    ap.add_argument("lp_file")
    ap.add_argument("sol_file")
    ap.add_argument("--gap", type=float, default=1e-8, help="relative MIP gap")
    ap.add_argument("--time-limit", default="none", help="seconds, or 'none'")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args(argv)

    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("threads", args.threads)
    h.setOptionValue("mip_rel_gap", args.gap)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.setOptionValue("mip_feasibility_tolerance", 1e-9)
    limit = _parse_limit(args.time_limit)
    if limit is not None:
        h.setOptionValue("time_limit", limit)

    if h.readModel(args.lp_file) != highspy.HighsStatus.kOk:
        print(f"cannot read {args.lp_file}", file=sys.stderr)
        return 1
    h.run()
    status = h.getModelStatus()
    info = h.getInfo()
    if info.primal_solution_status != 2:  # 2 == feasible
        print(f"no feasible solution: {h.modelStatusToString(status)}", file=sys.stderr)
        return 1

    lp = h.getLp()
    values = h.getSolution().col_value
    with open(args.sol_file, "w") as fh:
        fh.write(f"# status {h.modelStatusToString(status)}\n")
        fh.write(f"objective {info.objective_function_value!r}\n")
        fh.write(f"bound {info.mip_dual_bound!r}\n")
        for name, v in zip(lp.col_names_, values):
            fh.write(f"{name} {float(v)!r}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
