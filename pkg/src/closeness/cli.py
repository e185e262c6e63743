"""Command-line interface.

Subcommands: ``test``, ``gap``, ``samplesize``, ``simulate``, ``verify``.
Exit status of ``test`` is 0 for Equal and 1 for Far; 2 signals a usage or
data error everywhere.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import os
import re
import sys

from closeness.distributions import (
    DiscreteDistribution,
    FormatError,
    RngStream,
    paired_perturbation,
    read_distribution,
    read_samples,
)
from closeness.errors import ClosenessError
from closeness.gap_oracle import (
    PanelRule,
    QuadratureConfig,
    cf_binomial,
    cf_poisson,
    exact_gap_binomial,
    exact_gap_poisson,
    lower_bound_binomial,
    lower_bound_poisson,
    zolotarev_gap,
)
from closeness.harness import (
    GRID_CHECKS,
    ExperimentSpec,
    GridConfig,
    binomial_rate_check,
    concentration_profile,
    fmt,
    verify_grids,
    write_grid_csv,
    write_trials_csv,
)
from closeness.tester import Decision, TestParams, make_plan, required_samples, run_test, rate_terms

EXIT_EQUAL, EXIT_FAR, EXIT_ERROR = 0, 1, 2
SEED_ENV = "CLOSENESS_SEED"
_KEY_ALIASES = {"eps": "epsilon", "lam": "lambda"}
_KEY_VALUE_OPTIONS = {"k", "n", "p", "q", "epsilon", "delta", "trials", "seed", "tv", "threads", "mu", "lambda"}


class UsageError(Exception):
    pass


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV, "0"))


def _emit(rows, header, as_csv: bool, out=None) -> None:
    out = out or sys.stdout
    if as_csv:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        w.writerows([[fmt(v) for v in row] for row in rows])
        return
    cells = [[fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(header)]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)), file=out)
    for r in cells:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)), file=out)


# -- test ------------------------------------------------------------------

def cmd_test(args) -> int:
    params = TestParams(args.k, args.epsilon, args.delta)
    plan = make_plan(params, args.n)
    need = plan.samples_per_side
    batches = {}
    for side, path in (("p", args.p_samples), ("q", args.q_samples)):
        batch = read_samples(path, k=args.k)
        if batch.n < need:
            raise UsageError(f"{path}: {batch.n} samples, but the test needs 2n = {need} per side (n = {plan.n})")
        if batch.n > need:
            print(f"warning: {path}: using the first {need} of {batch.n} samples", file=sys.stderr)
        batches[side] = batch.head(need)
    verdict = run_test(plan, batches["p"], batches["q"], RngStream(args.seed))
    rows = [
        ("decision", verdict.decision.value),
        ("z", verdict.z_value),
        ("threshold", verdict.threshold),
        ("delta_star", plan.delta_star),
        ("n", plan.n),
        ("samples_per_side", need),
        ("effective_k", plan.effective_k),
    ]
    _emit(rows, ("quantity", "value"), args.csv)
    return EXIT_FAR if verdict.decision is Decision.FAR else EXIT_EQUAL


# -- gap -------------------------------------------------------------------

def _family(args) -> str:
    if args.poisson and args.binomial:
        raise UsageError("choose one of --binomial / --poisson")
    return "poisson" if args.poisson else "binomial"


_DESTS = {"lambda": "lam"}


def _require(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, _DESTS.get(n, n)) is None]
    if missing:
        raise UsageError(f"gap {args.mode} needs {', '.join(missing)}")


def cmd_gap(args) -> int:
    mode = args.mode
    family = {"binomial-exact": "binomial", "poisson-exact": "poisson"}.get(mode) or _family(args)
    config = QuadratureConfig(abs_tolerance=args.tol, panel_rule=PanelRule(args.rule))
    rows = []
    if family == "binomial":
        _require(args, "n", "p", "q")
        header = ("n", "p", "q")
        combos = itertools.product(args.n, args.p, args.q)
    else:
        _require(args, "mu", "lambda")
        header = ("mu", "lambda")
        combos = itertools.product(args.mu, args.lam)
    for combo in combos:
        if mode == "bound":
            b = lower_bound_binomial(*combo) if family == "binomial" else lower_bound_poisson(*combo)
            rows.append((*combo, b.value, b.regime.value))
        elif mode == "zolotarev":
            if family == "binomial":
                n, p, q = combo
                cf_u, cf_v = (lambda t: cf_binomial(n, p, t)), (lambda t: cf_binomial(n, q, t))
            else:
                mu, lam = combo
                cf_u, cf_v = (lambda t: cf_poisson(mu, t)), (lambda t: cf_poisson(lam, t))
            rows.append((*combo, zolotarev_gap(cf_u, cf_v, config)))
        else:
            gap = exact_gap_binomial(*combo) if family == "binomial" else exact_gap_poisson(*combo)
            rows.append((*combo, gap))
    header = header + (("bound", "regime") if mode == "bound" else ("gap",))
    _emit(rows, header, args.csv)
    return 0


# -- samplesize ------------------------------------------------------------

def cmd_samplesize(args) -> int:
    params = TestParams(args.k, args.epsilon, args.delta)
    n = required_samples(params)
    plan = make_plan(params, n)
    terms = rate_terms(args.k, args.epsilon, args.delta)
    rows = [
        ("n", n, ""),
        ("samples_per_side", plan.samples_per_side, ""),
        ("delta_star", plan.delta_star, ""),
        ("threshold", plan.threshold, ""),
    ]
    for name in terms._fields:
        rows.append((name, getattr(terms, name), "dominant" if name == terms.dominant else ""))
    _emit(rows, ("quantity", "value", "note"), args.csv)
    return 0


# -- simulate --------------------------------------------------------------

def _simulation_pair(args) -> tuple[DiscreteDistribution, DiscreteDistribution, bool]:
    if args.p_dist:
        p = read_distribution(args.p_dist)
        q = read_distribution(args.q_dist) if args.q_dist else p
        return p, q, args.q_dist is None
    p = DiscreteDistribution.uniform(args.k)
    if args.null:
        return p, p, True
    tv = args.tv if args.tv is not None else args.epsilon
    return p, paired_perturbation(args.k, tv), False


def cmd_simulate(args) -> int:
    if not (args.null or args.alt or args.p_dist):
        raise UsageError("simulate needs --null, --alt or --p-dist")
    p, q, is_null = _simulation_pair(args)
    k = args.k if args.k is not None else p.k
    params = TestParams(k, args.epsilon, args.delta)
    plan = make_plan(params, args.n)
    spec = ExperimentSpec(p=p, q=q, plan=plan, trials=args.trials, seed=args.seed)
    profile = concentration_profile(spec, threads=args.threads)
    result = profile.result
    if args.out:
        write_trials_csv(args.out, result)
    errors = result.far_count if is_null else result.trials - result.far_count
    passed, p_value = binomial_rate_check(errors, result.trials, params.delta)
    rows = [
        ("hypothesis", "null" if is_null else "alternative"),
        ("trials", result.trials),
        ("n", plan.n),
        ("far_rate", result.far_rate),
        ("error_rate", errors / result.trials),
        ("error_rate_pvalue", p_value),
        ("error_rate_check", "pass" if passed else "fail"),
        ("z_mean", result.z_mean),
        ("z_stddev", result.z_stddev),
        ("delta_star", plan.delta_star),
        ("tail_probability", profile.tail_probability),
        ("mcdiarmid_bound", profile.mcdiarmid_bound),
        ("wall_time_s", result.wall_time),
    ]
    _emit(rows, ("quantity", "value"), args.csv)
    return 0 if passed else 1


# -- verify ----------------------------------------------------------------

def cmd_verify(args) -> int:
    selected = tuple(GRID_CHECKS) if args.all or not args.check else tuple(args.check)
    report = verify_grids(GridConfig(checks=selected))
    if args.out:
        write_grid_csv(args.out, report)
    rows = [(name, rows, bad, margin) for name, (rows, bad, margin) in report.summary().items()]
    _emit(rows, ("check", "points", "violations", "min_margin"), args.csv)
    for v in report.violations[:20]:
        print(f"violation: {v.check} {v.inputs} lhs={fmt(v.lhs)} rhs={fmt(v.rhs)} margin={fmt(v.margin)}",
              file=sys.stderr)
    print(f"{len(report.violations)} violations", file=sys.stderr if args.csv else sys.stdout)
    return 0 if not report.violations else 1


# -- parser ----------------------------------------------------------------

def _expand_key_values(argv):
    """Accept ``key=value`` tokens as ``--key value`` (``eps=0.5`` -> ``--epsilon 0.5``)."""
    out = []
    for tok in argv:
        m = re.fullmatch(r"([A-Za-z_]+)=(.*)", tok)
        key = _KEY_ALIASES.get(m.group(1), m.group(1)) if m else None
        if key in _KEY_VALUE_OPTIONS:
            out.extend([f"--{key}" if len(key) > 1 else f"-{key}", m.group(2)])
        else:
            out.append(tok)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="closeness", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def seeded(p):
        p.add_argument("--seed", type=int, default=_default_seed(), help=f"RNG seed (default: ${SEED_ENV} or 0)")

    def csv_flag(p):
        p.add_argument("--csv", action="store_true", help="machine-readable CSV on stdout")

    t = sub.add_parser("test", help="run the closeness test on two sample files")
    t.add_argument("--p-samples", required=True)
    t.add_argument("--q-samples", required=True)
    t.add_argument("-k", type=int, required=True)
    t.add_argument("--epsilon", type=float, required=True)
    t.add_argument("--delta", type=float, required=True)
    t.add_argument("-n", type=int, help="override the per-batch sample size")
    seeded(t)
    csv_flag(t)
    t.set_defaults(func=cmd_test)

    g = sub.add_parser("gap", help="expectation gaps and their lower bounds")
    g.add_argument("mode", choices=("binomial-exact", "poisson-exact", "zolotarev", "bound"))
    g.add_argument("--binomial", action="store_true")
    g.add_argument("--poisson", action="store_true")
    g.add_argument("-n", type=int, nargs="+")
    g.add_argument("-p", type=float, nargs="+")
    g.add_argument("-q", type=float, nargs="+")
    g.add_argument("--mu", type=float, nargs="+")
    g.add_argument("--lambda", dest="lam", type=float, nargs="+")
    g.add_argument("--tol", type=float, default=1e-8, help="quadrature absolute tolerance")
    g.add_argument("--rule", choices=[r.value for r in PanelRule], default=PanelRule.GAUSS_KRONROD.value)
    csv_flag(g)
    g.set_defaults(func=cmd_gap)

    s = sub.add_parser("samplesize", help="certified per-batch sample size")
    s.add_argument("-k", type=int, required=True)
    s.add_argument("--epsilon", type=float, required=True)
    s.add_argument("--delta", type=float, required=True)
    csv_flag(s)
    s.set_defaults(func=cmd_samplesize)

    m = sub.add_parser("simulate", help="Monte Carlo error rates of the tester")
    hyp = m.add_mutually_exclusive_group()
    hyp.add_argument("--null", action="store_true", help="p = q = uniform(k)")
    hyp.add_argument("--alt", action="store_true", help="q = paired perturbation of uniform(k) at TV --tv")
    m.add_argument("--p-dist", help="distribution file for p (overrides --null/--alt)")
    m.add_argument("--q-dist", help="distribution file for q (default: same as p)")
    m.add_argument("-k", type=int)
    m.add_argument("--epsilon", type=float, required=True)
    m.add_argument("--delta", type=float, required=True)
    m.add_argument("--tv", type=float, help="TV distance for --alt (default: epsilon)")
    m.add_argument("--trials", type=int, default=200)
    m.add_argument("-n", type=int, help="override the per-batch sample size")
    m.add_argument("--threads", type=int, default=None, help="worker threads (default: all cores)")
    m.add_argument("--out", help="per-trial CSV path")
    seeded(m)
    csv_flag(m)
    m.set_defaults(func=cmd_simulate)

    v = sub.add_parser("verify", help="run the inequality verification grids")
    v.add_argument("--all", action="store_true")
    v.add_argument("--check", action="append", choices=GRID_CHECKS)
    v.add_argument("--out", help="per-grid-point CSV path")
    csv_flag(v)
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    argv = _expand_key_values(sys.argv[1:] if argv is None else list(argv))
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "simulate" and args.k is None and not args.p_dist:
        parser.error("simulate needs -k unless --p-dist is given")
    try:
        return args.func(args)
    except (UsageError, FormatError, ClosenessError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
