"""Command-line interface.

Subcommands: ``generate`` (emit a stock benchmark problem file), ``solve``
(one algorithm, artifacts to a directory), ``compare`` (all four dual
algorithms plus a combined convergence plot), ``oracle-check`` (tiny
instances against the exact solver).

Exit codes: 0 success / converged, 2 iteration cap or failed check,
1 input or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .core import Algorithm, SolverConfig, max_violation
from .dual import duality_gap
from .fileio import (
    ProblemFileError,
    default_problem,
    load_problem,
    realize_problem,
    render_convergence_svg,
    save_problem,
    write_history_csv,
    write_matrix,
    write_vector,
)
from .oracle import ENUMERATION_LIMIT, exact_solve
from .problems import BENCHMARK_GAMMAS, COST_KINDS
from .solvers import DivergenceError, solve

_CLI_ALGORITHMS = {
    "cyclic-projection": Algorithm.CYCLIC_PROJECTION,
    "gradient": Algorithm.DUAL_GRADIENT,
    "fixed-point": Algorithm.FIXED_POINT,
    "nesterov": Algorithm.NESTEROV,
    "sinkhorn": Algorithm.SINKHORN,
}

_COMPARED = (
    Algorithm.CYCLIC_PROJECTION,
    Algorithm.DUAL_GRADIENT,
    Algorithm.FIXED_POINT,
    Algorithm.NESTEROV,
)


class _Parser(argparse.ArgumentParser):
    # usage problems are input errors: exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _load(args):
    return load_problem(args.problem)


def _make_config(args, algorithm, **overrides) -> SolverConfig:
    options = {
        "tol": args.tol,
        "max_iters": args.max_iters,
        "tau": getattr(args, "tau", None),
        "history_stride": getattr(args, "history_stride", 1),
    }
    options.update(overrides)
    return SolverConfig(gamma=args.gamma, algorithm=algorithm, **options)


def cmd_generate(args) -> int:
    if args.gamma is None:
        args.gamma = BENCHMARK_GAMMAS[args.cost][1]
    try:
        problem = default_problem(cost=args.cost, gamma=args.gamma, n=args.n)
        save_problem(problem, args.out)
    except (ProblemFileError, OSError, ValueError) as exc:
        return _fail(str(exc))
    print(f"wrote {args.out}")
    return 0


def cmd_solve(args) -> int:
    try:
        problem = _load(args)
        mu, nu, c = realize_problem(problem)
        args.gamma = problem.gamma
        config = _make_config(args, _CLI_ALGORITHMS[args.algorithm])
        report = solve(mu, nu, c, config)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        tag = report.algorithm.value
        write_matrix(out / f"plan_{tag}.txt", report.final_plan)
        write_vector(out / f"alpha_{tag}.txt", report.final_potentials.alpha)
        write_vector(out / f"beta_{tag}.txt", report.final_potentials.beta)
        write_history_csv(out / f"history_{tag}.csv", report, problem.gamma, args.tol)
    except (ProblemFileError, DivergenceError, ValueError, OSError) as exc:
        return _fail(str(exc))
    status = "converged" if report.converged else "hit the iteration cap"
    viol = max_violation(report.final_plan, mu, nu)
    print(f"{tag}: {status} after {report.iterations} iterations (max violation {viol:.3e})")
    return 0 if report.converged else 2


def cmd_compare(args) -> int:
    try:
        problem = _load(args)
        mu, nu, c = realize_problem(problem)
        args.gamma = problem.gamma
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        reports = []
        for algorithm in _COMPARED:
            report = solve(mu, nu, c, _make_config(args, algorithm))
            write_history_csv(out / f"history_{algorithm.value}.csv", report, problem.gamma, args.tol)
            reports.append(report)
        render_convergence_svg(
            [(r.algorithm.value, r.history) for r in reports], out / "compare.svg"
        )
    except (ProblemFileError, DivergenceError, ValueError, OSError) as exc:
        return _fail(str(exc))
    for report in reports:
        status = "converged" if report.converged else "capped"
        print(f"{report.algorithm.value}: {status} in {report.iterations} iterations")
    print(f"plot: {out / 'compare.svg'}")
    return 0 if all(r.converged for r in reports) else 2


def cmd_oracle_check(args) -> int:
    try:
        problem = _load(args)
        mu, nu, c = realize_problem(problem)
        cells = problem.grid1.n * problem.grid2.n
        if cells > ENUMERATION_LIMIT:
            return _fail(
                f"instance has {cells} cells; oracle-check is limited to {ENUMERATION_LIMIT}"
            )
        plan_star, pot_star = exact_solve(mu, nu, c, problem.gamma)
        args.gamma = problem.gamma
        print(f"oracle duality gap: {duality_gap(pot_star, plan_star, c, problem.gamma, mu, nu):.3e}")
        worst = 0.0
        for algorithm in _COMPARED:
            config = _make_config(args, algorithm, record_history=False)
            report = solve(mu, nu, c, config)
            gap = duality_gap(report.final_potentials, report.final_plan, c, problem.gamma, mu, nu)
            diff = float(np.abs(report.final_plan - plan_star).max())
            worst = max(worst, diff)
            print(f"{algorithm.value}: plan discrepancy {diff:.3e}, duality gap {gap:.3e}")
    except (ProblemFileError, DivergenceError, RuntimeError, ValueError, OSError) as exc:
        return _fail(str(exc))
    if worst <= 1e-6:
        print("all plans within 1e-06 of the exact solution")
        return 0
    print("discrepancy above 1e-06", file=sys.stderr)
    return 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qrot", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a stock benchmark problem file")
    gen.add_argument("--out", default="problem.json", help="output path (default problem.json)")
    gen.add_argument("--cost", choices=COST_KINDS, default="squared")
    gen.add_argument("--gamma", type=float, default=None, help="regularization weight (default per cost kind)")
    gen.add_argument("--n", type=int, default=100, help="cells per grid (default 100)")
    gen.set_defaults(func=cmd_generate)

    def run_flags(p, with_algorithm=False):
        p.add_argument("problem", help="problem file (JSON)")
        if with_algorithm:
            p.add_argument("--algorithm", choices=sorted(_CLI_ALGORITHMS), required=True)
        p.add_argument("--tol", type=float, default=1e-6, help="max-violation stopping threshold")
        p.add_argument("--max-iters", type=int, default=100_000, dest="max_iters")
        p.add_argument("--tau", type=float, default=None, help="stepsize override for the gradient methods")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--history-stride", type=int, default=1, dest="history_stride")

    slv = sub.add_parser("solve", help="run one algorithm on a problem file")
    run_flags(slv, with_algorithm=True)
    slv.set_defaults(func=cmd_solve)

    cmp_ = sub.add_parser("compare", help="run the four dual algorithms and plot convergence")
    run_flags(cmp_)
    cmp_.set_defaults(func=cmd_compare)

    orc = sub.add_parser("oracle-check", help="validate the solvers against the exact oracle")
    orc.add_argument("problem", help="tiny problem file (N*M <= 16)")
    orc.add_argument("--tol", type=float, default=1e-9)
    orc.add_argument("--max-iters", type=int, default=200_000, dest="max_iters")
    orc.add_argument("--tau", type=float, default=None)
    orc.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
