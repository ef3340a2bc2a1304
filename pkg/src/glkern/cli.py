"""Command-line entry point binding simulation, estimation, calibration,
the Monte Carlo study and the bound checks.

Every run resolves its configuration (flags take precedence over an
optional JSON config file, which takes precedence over the defaults),
prints floats with 10 significant digits, and writes the resolved
configuration, including the seed, to a provenance file next to its
output so the run can be repeated bit-identically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import checks as checks_mod
from .calibration import build_gamma_grid, calibrate, split_sample
from .estimators import known_design_density, nw_known_density
from .kernels import KernelSpec
from .processes import ProcessSpec, bump_line, generate_sample, sample_autocorrelation
from .selection import DELTA_EXPONENT_EMPIRICAL
from .study import StudyConfig, export_report, run_study
from .regression import GoldenshlugerLepskiRegressor

SEED_ENV_VAR = "GLKERN_SEED"


def _fmt(value: float) -> str:
    return f"{value:.10g}"


class _Parser(argparse.ArgumentParser):
    # usage problems exit with status 1; status 2 is reserved for failed checks
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _resolve_seed(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get(SEED_ENV_VAR)
    return int(env) if env else 0


def _write_provenance(args: argparse.Namespace, primary_out: str) -> None:
    resolved = {k: v for k, v in vars(args).items() if k != "func"}
    if os.path.isdir(primary_out):
        path = os.path.join(primary_out, "provenance.json")
    else:
        path = primary_out + ".provenance.json"
    with open(path, "w") as fh:
        json.dump({"command": resolved.pop("command"), "config": resolved},
                  fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _read_sample(path: str):
    data = np.genfromtxt(path, delimiter=",", names=True)
    names = data.dtype.names
    if names is None or "x" not in names or "y" not in names:
        raise SystemExit(f"{path}: expected a CSV header containing x and y columns")
    from .processes import RegressionSample
    return RegressionSample(x=np.atleast_1d(data["x"]), y=np.atleast_1d(data["y"]))


def cmd_simulate(args) -> int:
    spec = ProcessSpec(phi=args.phi, rho=args.rho, c=args.c)
    sample = generate_sample(spec, bump_line, args.sigma, args.n, args.seed)
    _write_csv(args.out, "t,x,y",
               ([str(t + 1), _fmt(x), _fmt(y)]
                for t, (x, y) in enumerate(zip(sample.x, sample.y))))
    if args.acf_out:
        acf = sample_autocorrelation(sample.x, args.max_lag)
        _write_csv(args.acf_out, "lag,acf",
                   ([str(lag + 1), _fmt(v)] for lag, v in enumerate(acf)))
    _write_provenance(args, args.out)
    return 0


def cmd_estimate(args) -> int:
    sample = _read_sample(args.data)
    xs = np.linspace(args.grid_min, args.grid_max, args.grid_size)
    if args.adaptive:
        model = GoldenshlugerLepskiRegressor(
            density=known_design_density(args.c), kernel=args.kernel,
            bandwidth="adaptive", gamma=args.gamma,
            delta_exponent=args.delta_exponent, half_width=args.half_width)
        model.fit(sample.x, sample.y)
        rows = []
        table_rows = []
        for x in xs:
            sel = model.select_at(float(x))
            rows.append([_fmt(x), _fmt(sel.h_hat), _fmt(sel.estimate), _fmt(args.gamma)])
            for h, a, v in zip(sel.table["h"], sel.table["proxy"], sel.table["penalty"]):
                table_rows.append([_fmt(x), _fmt(h), _fmt(a), _fmt(v)])
        _write_csv(args.out, "x,h_hat,estimate,gamma", rows)
        if args.table:
            _write_csv(args.table, "x,h,A,V", table_rows)
    else:
        if args.h is None:
            raise SystemExit("estimate: provide --h or --adaptive")
        g = known_design_density(args.c)
        k = KernelSpec(args.kernel)
        _write_csv(args.out, "x,h,estimate",
                   ([_fmt(x), _fmt(args.h),
                     _fmt(nw_known_density(sample, g, k, args.h, float(x)))]
                    for x in xs))
    _write_provenance(args, args.out)
    return 0


def cmd_calibrate(args) -> int:
    sample = _read_sample(args.data)
    split = split_sample(sample, args.n, args.q)
    gammas = build_gamma_grid(args.gamma_lo, args.gamma_hi, args.gamma_count)
    result = calibrate(split, gammas, known_design_density(args.c),
                       KernelSpec(args.kernel),
                       delta_exponent=args.delta_exponent,
                       half_width=args.half_width)
    _write_csv(args.out, "gamma,error",
               ([_fmt(gm), _fmt(er)] for gm, er in zip(result.gammas, result.errors)))
    print(f"gamma_star={_fmt(result.gamma_star)}")
    _write_provenance(args, args.out)
    return 0


def cmd_study(args) -> int:
    replicas = 500 if args.full else args.replicas
    reports = []
    for sigma in args.sigma:
        for n in args.n:
            cfg = StudyConfig(n=n, q=args.q, sigma=sigma, replicas=replicas,
                              s=args.s, base_seed=args.seed,
                              gamma_lo=args.gamma_lo, gamma_hi=args.gamma_hi,
                              gamma_count=args.gamma_count,
                              kernel=KernelSpec(args.kernel),
                              process=ProcessSpec(phi=args.phi, rho=args.rho, c=args.c),
                              delta_exponent=args.delta_exponent)
            report = run_study(cfg, workers=args.workers)
            reports.append(report)
            print(f"sigma={_fmt(sigma)} n={n} mise={_fmt(report.mise)} "
                  f"median_I={_fmt(report.median_integrated_error)}")
    os.makedirs(args.out, exist_ok=True)
    export_report(reports, args.out)
    _write_provenance(args, args.out)
    return 0


def _run_checks(args) -> list:
    cfg = StudyConfig(n=args.n, q=args.q, sigma=args.sigma,
                      base_seed=args.seed,
                      kernel=KernelSpec(args.kernel),
                      delta_exponent=args.delta_exponent)
    which = args.which
    reports = []

    def want(name):
        return which in (name, "all")

    if want("lemma-a2"):
        for a in (0.1, 0.3, 0.5, 0.7, 0.9):
            reports.append(checks_mod.check_lemma_a2(
                a, [4, 10, 10**2, 10**4, 10**6], h_count=100))
    if want("constants"):
        reports.append(checks_mod.check_constants_identities(
            draws=100, base_seed=args.seed))
    if want("bias"):
        reports.append(checks_mod.check_bias_bound(
            np.sin, beta=2.0, L=1.0, k=KernelSpec(args.kernel),
            h_list=(0.4, 0.2, 0.1, 0.05), x=0.3))
    if want("variance"):
        params = checks_mod.true_theory_params(
            cfg.process, cfg.regression, cfg.sigma, cfg.n, 0.0,
            a=args.a, gamma=args.gamma, kernel=cfg.kernel)
        reports.append(checks_mod.check_variance_bound(
            cfg, params, h=0.1, x=0.0, replicas=args.replicas or 500,
            base_seed=args.seed))
    if want("rate"):
        reports.append(checks_mod.check_rate(
            cfg, n_list=(500, 2000, 8000), replicas=args.replicas or 200,
            base_seed=args.seed))
    if want("oracle"):
        reports.append(checks_mod.check_oracle_ratio(
            cfg, replicas=args.replicas or 50, x=0.0, a=args.a,
            base_seed=args.seed))
    if want("bernstein"):
        bern_cfg = StudyConfig(n=500, q=cfg.q, sigma=cfg.sigma,
                               base_seed=args.seed, kernel=cfg.kernel)
        params = checks_mod.true_theory_params(
            bern_cfg.process, bern_cfg.regression, bern_cfg.sigma, bern_cfg.n,
            0.0, a=args.a, gamma=args.gamma, kernel=bern_cfg.kernel)
        reports.append(checks_mod.check_bernstein_tail(
            params, bern_cfg, h=0.1, replicas=args.replicas or 5000,
            base_seed=args.seed))
    return reports


def cmd_check(args) -> int:
    reports = _run_checks(args)
    payload = [rep.to_dict() for rep in reports]
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _write_provenance(args, args.out)
    else:
        print(text)
    for rep in reports:
        status = "pass" if rep.passed else "FAIL"
        print(f"{rep.name}: {status}", file=sys.stderr)
    return 0 if all(rep.passed for rep in reports) else 2


def cmd_constants(args) -> int:
    params = checks_mod.TheoryParams(
        beta=args.beta, L=args.L, r_sup=args.r_sup, g_inf=args.g_inf,
        g_sup=args.g_sup, Q=args.Q, sigma=args.sigma, a=args.a,
        gamma=args.gamma, kernel=KernelSpec(args.kernel))
    table = checks_mod.constants_table(params, args.n, args.h)
    text = json.dumps({k: (v if isinstance(v, str) else float(v))
                       for k, v in table.items()}, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _write_provenance(args, args.out)
    else:
        print(text)
    return 0


def _add_common_process_flags(p):
    p.add_argument("--phi", type=float, default=0.75, help="AR coefficient")
    p.add_argument("--rho", type=float, default=1.0, help="innovation scale")
    p.add_argument("--c", type=float, default=2.0, help="design truncation half-width")


def build_parser() -> _Parser:
    parser = _Parser(prog="glkern",
                     description="Adaptive kernel regression for dependent data")
    parser.add_argument("--config", type=str, default=None,
                        help="JSON file with default values for any flag")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a dependent regression sample")
    p.add_argument("--n", type=int, default=2000, help="number of observations")
    p.add_argument("--sigma", type=float, default=0.5)
    _add_common_process_flags(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default="sample.csv")
    p.add_argument("--acf-out", type=str, default=None)
    p.add_argument("--max-lag", type=int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate the regression function from a CSV")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--kernel", type=str, default="gaussian")
    p.add_argument("--h", type=float, default=None, help="fixed bandwidth")
    p.add_argument("--adaptive", action="store_true",
                   help="select a bandwidth per evaluation point")
    p.add_argument("--gamma", type=float, default=0.005)
    p.add_argument("--delta-exponent", type=float, default=DELTA_EXPONENT_EMPIRICAL)
    p.add_argument("--half-width", type=float, default=0.5)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--grid-min", type=float, default=-1.0)
    p.add_argument("--grid-max", type=float, default=1.0)
    p.add_argument("--grid-size", type=int, default=21)
    p.add_argument("--out", type=str, default="estimates.csv")
    p.add_argument("--table", type=str, default=None,
                   help="optional long-format proxy/penalty table CSV")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("calibrate", help="calibrate gamma on a gapped holdout")
    p.add_argument("--data", type=str, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=int, default=100)
    p.add_argument("--kernel", type=str, default="gaussian")
    p.add_argument("--gamma-lo", type=float, default=5e-8)
    p.add_argument("--gamma-hi", type=float, default=0.05)
    p.add_argument("--gamma-count", type=int, default=21)
    p.add_argument("--delta-exponent", type=float, default=DELTA_EXPONENT_EMPIRICAL)
    p.add_argument("--half-width", type=float, default=0.5)
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--out", type=str, default="calibration.csv")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("study", help="Monte Carlo study over (sigma, n) cells")
    p.add_argument("--n", type=int, action="append", default=None)
    p.add_argument("--sigma", type=float, action="append", default=None)
    p.add_argument("--q", type=int, default=100)
    p.add_argument("--replicas", type=int, default=50)
    p.add_argument("--full", action="store_true", help="use 500 replicas")
    p.add_argument("--s", type=int, default=21)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--kernel", type=str, default="gaussian")
    p.add_argument("--gamma-lo", type=float, default=5e-8)
    p.add_argument("--gamma-hi", type=float, default=0.05)
    p.add_argument("--gamma-count", type=int, default=21)
    p.add_argument("--delta-exponent", type=float, default=DELTA_EXPONENT_EMPIRICAL)
    _add_common_process_flags(p)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--out", type=str, default="study-out")
    p.set_defaults(func=cmd_study)

    p = sub.add_parser("check", help="run the numeric bound checks")
    p.add_argument("--which", type=str, default="all",
                   choices=["lemma-a2", "bias", "variance", "rate", "oracle",
                            "bernstein", "constants", "all"])
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--q", type=int, default=100)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--kernel", type=str, default="gaussian")
    p.add_argument("--a", type=float, default=0.75,
                   help="dependence decay rate used for the true constants")
    p.add_argument("--gamma", type=float, default=2.5,
                   help="penalty constant for the constants in the bounds")
    p.add_argument("--delta-exponent", type=float, default=DELTA_EXPONENT_EMPIRICAL)
    p.add_argument("--replicas", type=int, default=None,
                   help="override the per-check default replica counts")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("constants", help="print the bound constants table")
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--r-sup", dest="r_sup", type=float, default=2.0)
    p.add_argument("--g-inf", dest="g_inf", type=float, default=0.4)
    p.add_argument("--g-sup", dest="g_sup", type=float, default=0.42)
    p.add_argument("--Q", type=float, default=0.27)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--a", type=float, default=0.75)
    p.add_argument("--gamma", type=float, default=2.5)
    p.add_argument("--kernel", type=str, default="gaussian")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--out", type=str, default=None)
    p.set_defaults(func=cmd_constants)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, _ = parser.parse_known_args(argv)
    if getattr(args, "config", None):
        with open(args.config) as fh:
            overrides = {k.replace("-", "_"): v for k, v in json.load(fh).items()}
        parser.set_defaults(**overrides)
        # subcommand argument defaults live on the subparsers
        for action in parser._actions:
            if isinstance(action, argparse._SubParsersAction):
                for sub in action.choices.values():
                    sub.set_defaults(**{k: v for k, v in overrides.items()
                                        if any(a.dest == k for a in sub._actions)})
    args = parser.parse_args(argv)
    if hasattr(args, "seed"):
        args.seed = _resolve_seed(args.seed)
    if args.command == "study":
        if args.n is None:
            args.n = [2000]
        if args.sigma is None:
            args.sigma = [0.5]
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"glkern: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
