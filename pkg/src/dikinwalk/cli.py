"""Command-line front end: precondition, warmstart, budget, sample, oracle, diagnose.

Every output file starts with a '#' manifest block recording the resolved
parameters; stripping comment lines leaves machine-parseable data only.
Files are written to a temp path and renamed on success, so errors never
leave partial outputs. Exit codes: 0 ok, 2 file/parse error, 3 infeasible
initial point, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import tempfile

import numpy as np

from dikinwalk import __version__
from dikinwalk.diagnostics import (
    DiagnosticsError,
    diagnose_corpus,
    rejection_oracle,
)
from dikinwalk.metrics import MetricError, RegularizedLewis, SoftThreshold
from dikinwalk.planner import (
    PlannerError,
    MixingBudgetQuery,
    beyond_worst_case_budget,
    mixing_budget,
    sample_warm_start,
    solve_modes,
    warm_start_ball,
)
from dikinwalk.polytope import (
    PolytopeError,
    contains,
    parse_polytope,
    serialize_polytope,
)
from dikinwalk.target import (
    GaussianTarget,
    TargetError,
    precondition_gaussian,
    quadratic_target,
)
from dikinwalk.walk import WalkConfig, WalkError, format_csv, run

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc


def _load_polytope(path: str):
    try:
        return parse_polytope(_read_file(path))
    except PolytopeError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


def parse_gaussian(text: str) -> GaussianTarget:
    """Gaussian file: "n", one line of n floats (mu), n lines of n floats (Sigma)."""
    rows = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.strip().startswith("#")
    ]
    if not rows:
        raise TargetError("empty Gaussian file")
    try:
        n = int(rows[0])
    except ValueError:
        raise TargetError("first line must be the dimension n") from None
    if len(rows) != n + 2:
        raise TargetError(f"expected 1 mean line and {n} covariance rows")
    try:
        mu = np.array([float(t) for t in rows[1].split()])
        Sigma = np.array([[float(t) for t in rows[i + 2].split()] for i in range(n)])
    except ValueError:
        raise TargetError("non-numeric token in Gaussian file") from None
    if mu.shape != (n,) or Sigma.shape != (n, n):
        raise TargetError("wrong number of values in Gaussian file")
    return GaussianTarget(mu=mu, Sigma=Sigma)


def serialize_gaussian(G: GaussianTarget) -> str:
    lines = [str(G.n), " ".join(f"{v:.17g}" for v in G.mu)]
    for row in G.Sigma:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def serialize_transform(T) -> str:
    lines = [str(T.shift.shape[0])]
    for row in T.L:
        lines.append(" ".join(f"{v:.17g}" for v in row))
    lines.append(" ".join(f"{v:.17g}" for v in T.shift))
    return "\n".join(lines) + "\n"


def _load_gaussian(path: str) -> GaussianTarget:
    try:
        return parse_gaussian(_read_file(path))
    except TargetError as exc:
        raise CliError(f"{path}: {exc}", EXIT_PARSE) from exc


def _manifest(args: argparse.Namespace) -> str:
    skip = {"func", "command"}
    items = [
        f"{k}={v}"
        for k, v in sorted(vars(args).items())
        if k not in skip and v is not None
    ]
    lines = [f"# dikinwalk {__version__}", f"# command={args.command}"]
    lines += [f"# {item}" for item in items]
    return "\n".join(lines) + "\n"


def _write_output(path: str | None, content: str) -> None:
    if path is None:
        sys.stdout.write(content)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".dikinwalk-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(content)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _resolve_metric(args: argparse.Namespace, beta: float | None):
    if args.lambda_from_beta:
        if beta is None:
            raise CliError("--lambda-from-beta needs a Gaussian target", EXIT_PARSE)
        lam = beta
    elif args.lam is not None:
        lam = args.lam
    else:
        raise CliError("specify --lambda or --lambda-from-beta", EXIT_PARSE)
    if args.metric == "soft":
        return SoftThreshold(lam=lam)
    return RegularizedLewis(
        lam=lam, c1=args.c1, c2=args.c2, q=args.q, tol=args.lewis_tol
    )


def _build_target(args: argparse.Namespace, P):
    gauss = _load_gaussian(args.gaussian)
    if gauss.n != P.n:
        raise CliError("Gaussian and polytope dimensions differ", EXIT_PARSE)
    return gauss, quadratic_target(gauss)


def cmd_sample(args: argparse.Namespace) -> int:
    P = _load_polytope(args.polytope)
    gauss, target = _build_target(args, P)
    metric = _resolve_metric(args, target.beta)
    if args.init_point is not None:
        x0 = np.array(args.init_point, dtype=float)
        if x0.shape[0] != P.n:
            raise CliError("--init-point has the wrong dimension", EXIT_PARSE)
        if not contains(P, x0):
            raise CliError("initial point is not interior", EXIT_INFEASIBLE)
        init = x0
    elif args.init_warmstart:
        try:
            modes = solve_modes(target, P)
            ball = warm_start_ball(
                target, P, modes.x_dag, args.r_tilde, modes, args.outer_radius
            )
        except (PlannerError, PolytopeError) as exc:
            raise CliError(str(exc), EXIT_NUMERIC) from exc
        init = lambda rng: sample_warm_start(ball, rng)  # noqa: E731
    else:
        raise CliError("specify --init-point or --init-warmstart", EXIT_PARSE)

    def one_chain(chain_seed: int):
        config = WalkConfig(
            metric=metric,
            r=args.step_size,
            lazy=not args.no_lazy,
            steps=args.steps,
            burn_in=args.burn_in,
            adapt=args.adapt,
            seed=chain_seed,
            thin=args.thin,
        )
        try:
            return run(init, target, P, config)
        except WalkError as exc:
            raise CliError(str(exc), EXIT_INFEASIBLE) from exc
        except MetricError as exc:
            raise CliError(str(exc), EXIT_NUMERIC) from exc

    manifest = _manifest(args)
    if args.chains == 1:
        batch = one_chain(args.seed)
        _write_output(args.out, manifest + format_csv(batch, header=args.header))
    else:
        seeds = [args.seed + i for i in range(args.chains)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
            batches = list(pool.map(one_chain, seeds))
        for i, batch in enumerate(batches):
            path = None
            if args.out is not None:
                root, ext = os.path.splitext(args.out)
                path = f"{root}_{i}{ext}"
            _write_output(path, manifest + format_csv(batch, header=args.header))
    return EXIT_OK


def cmd_precondition(args: argparse.Namespace) -> int:
    P = _load_polytope(args.polytope)
    gauss = _load_gaussian(args.gaussian)
    try:
        P_new, transform = precondition_gaussian(gauss, P)
    except (TargetError, PolytopeError) as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    manifest = _manifest(args)
    _write_output(args.out_polytope, manifest + serialize_polytope(P_new))
    _write_output(args.out_transform, manifest + serialize_transform(transform))
    return EXIT_OK


def _kv_block(pairs) -> str:
    return "\n".join(f"{k}={v}" for k, v in pairs) + "\n"


def _fmt_vec(v: np.ndarray) -> str:
    return " ".join(f"{x:.17g}" for x in v)


def cmd_warmstart(args: argparse.Namespace) -> int:
    P = _load_polytope(args.polytope)
    _, target = _build_target(args, P)
    try:
        modes = solve_modes(target, P)
        x1 = np.array(args.x1, dtype=float) if args.x1 else modes.x_dag
        ball = warm_start_ball(target, P, x1, args.r_tilde, modes, args.outer_radius)
    except (PlannerError, PolytopeError, TargetError) as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    content = _manifest(args) + _kv_block(
        [
            ("x0", _fmt_vec(ball.x0)),
            ("r0", f"{ball.r0:.17g}"),
            ("r1", f"{ball.r1:.17g}"),
            ("logM", f"{ball.logM:.17g}"),
            ("outer_radius_estimated", str(ball.outer_radius_estimated).lower()),
        ]
    )
    _write_output(args.out, content)
    return EXIT_OK


def cmd_budget(args: argparse.Namespace) -> int:
    metric = (
        SoftThreshold(lam=1.0)
        if args.metric == "soft"
        else RegularizedLewis(lam=1.0, c1=args.c1, c2=args.c2)
    )
    try:
        qry = MixingBudgetQuery(
            regime=args.regime,
            m=args.m,
            n=args.n,
            metric=metric,
            M=args.warmness,
            eps=args.eps,
            C=args.C,
            kappa=args.kappa,
            beta_eta=args.beta_eta,
            psi_n_sq=args.psi_n_sq,
        )
        T = mixing_budget(qry)
    except PlannerError as exc:
        raise CliError(str(exc), EXIT_PARSE) from exc
    pairs = [("T", T)]
    if args.beyond_worst_case:
        if args.polytope is None or args.gaussian is None:
            raise CliError(
                "--beyond-worst-case needs --polytope and --gaussian", EXIT_PARSE
            )
        P = _load_polytope(args.polytope)
        _, target = _build_target(args, P)
        try:
            modes = solve_modes(target, P)
            res = beyond_worst_case_budget(
                P, target, modes, args.warmness, args.eps, args.C
            )
        except PlannerError as exc:
            raise CliError(str(exc), EXIT_NUMERIC) from exc
        pairs += [
            ("T_beyond", res.T),
            ("best_delta", f"{res.best_delta:.17g}"),
            ("count", res.violated_count),
            ("T_plain", res.plain_T),
        ]
    _write_output(args.out, _manifest(args) + _kv_block(pairs))
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    P = _load_polytope(args.polytope)
    gauss = _load_gaussian(args.gaussian)
    rng = np.random.default_rng(args.seed)
    try:
        result = rejection_oracle(gauss, P, args.n_samples, rng)
    except DiagnosticsError as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    lines = []
    for row in result.samples:
        lines.append(",".join(f"{v:.17g}" for v in row))
    lines.append(f"# acceptance={result.acceptance:.17g}")
    _write_output(args.out, _manifest(args) + "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    reports = diagnose_corpus(seed=args.seed, trials=args.trials)
    lines = []
    total_violations = 0
    for rep in reports:
        total_violations += rep.violations
        lines.append(
            f"{rep.name} trials={rep.trials} violations={rep.violations} "
            f"max_slack={rep.max_slack:.6f}"
        )
    _write_output(args.out, _manifest(args) + "\n".join(lines) + "\n")
    return EXIT_OK if total_violations == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dikinwalk",
        description="Regularized Dikin walk sampling on polytopes",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_polytope_gaussian(p):
        p.add_argument("--polytope", required=True, help="polytope text file")
        p.add_argument("--gaussian", required=True, help="Gaussian target file")

    def add_metric_flags(p):
        p.add_argument("--metric", choices=["soft", "lewis"], default="soft")
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument(
            "--lambda-from-beta",
            action="store_true",
            help="set the regularization to the target smoothness beta",
        )
        p.add_argument("--c1", type=float, default=1.0)
        p.add_argument("--c2", type=float, default=0.0)
        p.add_argument("--q", type=int, default=None)
        p.add_argument("--lewis-tol", type=float, default=1e-8)

    p = sub.add_parser("sample", help="run the walk and write samples CSV")
    add_polytope_gaussian(p)
    add_metric_flags(p)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--step-size", type=float, default=0.1)
    p.add_argument("--adapt", action="store_true")
    p.add_argument("--no-lazy", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--init-point", type=float, nargs="+", default=None)
    p.add_argument("--init-warmstart", action="store_true")
    p.add_argument("--r-tilde", type=float, default=0.1)
    p.add_argument("--outer-radius", type=float, default=None)
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("precondition", help="affine-reduce a truncated Gaussian")
    add_polytope_gaussian(p)
    p.add_argument("--out-polytope", required=True)
    p.add_argument("--out-transform", required=True)
    p.set_defaults(func=cmd_precondition)

    p = sub.add_parser("warmstart", help="construct the warm-start ball")
    add_polytope_gaussian(p)
    p.add_argument("--x1", type=float, nargs="+", default=None)
    p.add_argument("--r-tilde", type=float, required=True)
    p.add_argument("--outer-radius", type=float, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_warmstart)

    p = sub.add_parser("budget", help="closed-form iteration budgets")
    p.add_argument("--regime", choices=["strong", "weak"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--metric", choices=["soft", "lewis"], default="soft")
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--beta-eta", type=float, default=None)
    p.add_argument("--psi-n-sq", type=float, default=None)
    p.add_argument("--warmness", type=float, required=True, help="warmness M")
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--c1", type=float, default=1.0)
    p.add_argument("--c2", type=float, default=0.0)
    p.add_argument("--beyond-worst-case", action="store_true")
    p.add_argument("--polytope", default=None)
    p.add_argument("--gaussian", default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_budget)

    p = sub.add_parser("oracle", help="exact rejection-sampling oracle")
    add_polytope_gaussian(p)
    p.add_argument("--n-samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("diagnose", help="run the certification corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (PolytopeError, TargetError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (MetricError, PlannerError, DiagnosticsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
