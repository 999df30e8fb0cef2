"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data or parse error, 4 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import shlex
import subprocess
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import report as rpt
from .binomial_ci import CiMethod, TrialTally, confidence_interval, error_margin
from .metrics import (
    NoSuccessError,
    cets,
    classify_mode,
    optimize_cets,
    r_c_from_bounds,
    r_c_interval,
    success_curve,
)
from .planner import (
    DEFAULT_N_CAP,
    PlanConfig,
    adaptive_repeats,
    exact_n_root_find,
    n_for_target,
    relative_error_bound,
    scaling_function,
    worst_case_n,
    worst_case_n_simplified,
)
from .rng import RngSpec, default_seed
from .sim import (
    DEFAULT_COMPARE_NS,
    DEFAULT_COMPARE_PAIRS,
    adaptive_relerr_experiment,
    bernoulli_oracle,
    chunked_beta_check,
    compare_grid,
)
from .special import NumericalError
from .walksat import (
    BACKEND,
    DimacsParseError,
    WalksatConfig,
    generate_random_ksat,
    read_dimacs,
    run_experiment,
    to_dimacs,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


# ----------------------------------------------------------------- helpers


def _probability(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not a probability")
    return v


def _open_unit(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"{text} must lie strictly between 0 and 1")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{text} must be a positive integer")
    return v


def _method(text: str) -> CiMethod:
    try:
        return CiMethod.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _p_list(text: str) -> list[float]:
    """``0.1..0.9`` (step 0.1), ``0.1..0.9:0.2`` or ``0.1,0.5,0.9``."""
    if ".." in text:
        body, _, step = text.partition(":")
        lo, hi = (float(x) for x in body.split(".."))
        step_v = float(step) if step else 0.1
        count = int(round((hi - lo) / step_v)) + 1
        values = [round(lo + k * step_v, 10) for k in range(count)]
    else:
        values = [float(x) for x in text.split(",") if x.strip()]
    if not values or any(not 0.0 < v < 1.0 for v in values):
        raise argparse.ArgumentTypeError(f"bad probability list {text!r}")
    return values


def _pairs(text: str) -> list[tuple[float, float]]:
    out = []
    for chunk in text.split(","):
        a, _, b = chunk.partition(":")
        p1, p2 = float(a), float(b)
        if not 0.0 <= p2 < p1 <= 1.0:
            raise argparse.ArgumentTypeError(f"pair {chunk!r} needs 0 <= p2 < p1 <= 1")
        out.append((p1, p2))
    return out


def _int_list(text: str) -> list[int]:
    values = [int(x) for x in text.split(",") if x.strip()]
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"bad count list {text!r}")
    return values


def _generate_spec(text: str) -> dict:
    spec = {}
    for part in text.split(","):
        key, _, value = part.partition("=")
        spec[key.strip()] = int(value)
    missing = {"k", "vars", "clauses"} - spec.keys()
    if missing:
        raise argparse.ArgumentTypeError(f"--generate needs k=,vars=,clauses=; missing {sorted(missing)}")
    return spec


def _emit(report: dict, output: str | None) -> None:
    text = rpt.dumps(report)
    if output and output != "-":
        Path(output).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _seed(args) -> RngSpec:
    return RngSpec(args.seed if args.seed is not None else default_seed())


def _collect_warnings(caught) -> list[str]:
    return [str(w.message) for w in caught]


# ---------------------------------------------------------------- commands


def cmd_analyze(args) -> dict:
    if args.successes > args.trials:
        raise UsageError("--successes cannot exceed --trials")
    tally = TrialTally(args.trials, args.successes)
    est = confidence_interval(tally, args.method, args.alpha)
    r = r_c_interval(est, args.c)
    ce = cets(args.i, args.e_itr, est, args.c)
    margin = error_margin(tally, args.alpha)
    table = r_c_from_bounds(tally.ratio, max(0.0, tally.ratio - margin),
                            min(1.0, tally.ratio + margin), args.c)
    z2_margin = 2.0 / math.sqrt(args.trials + 4.0) * math.sqrt(tally.ratio * (1 - tally.ratio))
    table_z2 = r_c_from_bounds(tally.ratio, max(0.0, tally.ratio - z2_margin),
                               min(1.0, tally.ratio + z2_margin), args.c)
    flags = []
    if est.degenerate:
        flags.append("degenerate-interval")
    if args.successes == args.trials:
        flags.append("all-success")
    if args.successes == 0:
        flags.append("no-success")
    results = {
        "success": est.as_dict(),
        "r_c": r.as_dict(),
        "cets": ce.as_dict(),
        "relative_width": (est.width / est.point) if est.point > 0 else math.inf,
        "margin_form": {"epsilon": margin, "r_c": table.as_dict(),
                        "note": "n_s/n +- Agresti-Coull margin, exact z"},
        "rounded_z2": {"epsilon": z2_margin, "r_c": table_z2.as_dict(), "note": "z = 2"},
        "flags": flags,
    }
    return rpt.make_report("analyze", vars_for(args), results)


def cmd_plan(args) -> dict:
    kind = args.plan_kind
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if kind == "worst-case":
            if not 0.0 < args.epsilon < 0.5:
                raise UsageError("--epsilon must lie in (0, 0.5)")
            exact = worst_case_n(args.epsilon, args.alpha)
            simplified = worst_case_n_simplified(args.epsilon)
            z_rounded = worst_case_n(args.epsilon, z=1.96, subtract_z2=False)
            if args.simplified:
                n, variant = simplified, "simplified: ceil(1/eps^2 - 4)"
            else:
                n, variant = exact, "exact: ceil((z/(2 eps))^2 - z^2)"
            results = {"n": n, "variant": variant, "exact_z": exact, "simplified_z2": simplified,
                       "quoted_z1.96_without_z2": z_rounded}
        elif kind == "target":
            if not 0.0 < args.epsilon < 1.0:
                raise UsageError("--epsilon must lie in (0, 1)")
            n = n_for_target(args.p_hat, args.epsilon, args.alpha)
            results = {"n": n, "variant": "ceil(z^2 p(1-p)/eps^2) - ceil(z^2)",
                       "worst_case": worst_case_n(args.epsilon, args.alpha)}
        elif kind == "relative":
            if not 0.0 < args.p_hat < 1.0:
                raise UsageError("--p-hat must lie in (0, 1)")
            cfg = PlanConfig(alpha=args.alpha, e_t=args.target, use_scaling=args.scaled)
            n = relative_error_bound(args.p_hat, cfg)
            results = {"n": n, "variant": "scaled" if args.scaled else "unscaled",
                       "scale": scaling_function(args.p_hat) if args.scaled else 1.0,
                       "unscaled": relative_error_bound(args.p_hat, PlanConfig(args.alpha, args.target))}
        else:
            if not 0.0 < args.p_hat < 1.0:
                raise UsageError("--p-hat must lie in (0, 1)")
            n = exact_n_root_find(args.p_hat, args.target, args.alpha, args.c, args.n_cap)
            results = {"n": n, "variant": "root-find on e(R_c) with margin interval"}
    results["flags"] = _collect_warnings(caught)
    return rpt.make_report("plan", vars_for(args), results)


class SubprocessOracle:
    """Runs an external solver once per repeat; success is a given exit code."""

    def __init__(self, template: str, success_exit: int, timeout: float, rng: RngSpec,
                 parallel: int = 1) -> None:
        if not template.strip():
            raise UsageError("--cmd must not be empty")
        self.template = template
        self.success_exit = success_exit
        self.timeout = timeout
        self.rng = rng
        self.parallel = parallel
        self.calls = 0
        self.timeouts = 0

    def _one(self, repeat: int) -> bool:
        seed = self.rng.derive(repeat).seed64() & 0x7FFFFFFF
        argv = shlex.split(self.template.format(seed=seed, repeat=repeat))
        try:
            proc = subprocess.run(argv, stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL,
                                  timeout=self.timeout)
        except subprocess.TimeoutExpired:
            self.timeouts += 1
            return False
        return proc.returncode == self.success_exit

    def __call__(self, batch: int) -> int:
        ids = range(self.calls, self.calls + batch)
        self.calls += batch
        if self.parallel > 1:
            with ThreadPoolExecutor(self.parallel) as pool:
                return sum(pool.map(self._one, ids))
        return sum(self._one(r) for r in ids)


class WalksatOracle:
    def __init__(self, formula, cfg: WalksatConfig) -> None:
        self.formula = formula
        self.cfg = cfg
        self.calls = 0

    def __call__(self, batch: int) -> int:
        from .walksat import walksat_skc_run

        hits = 0
        for r in range(self.calls, self.calls + batch):
            cfg = WalksatConfig(self.cfg.w, self.cfg.max_flips, self.cfg.seed.derive(r))
            hits += walksat_skc_run(self.formula, cfg, r).first_success_iter is not None
        self.calls += batch
        return hits


def _trace_sink(path: str | None):
    if path == "-":
        fh = sys.stdout
    elif path:
        fh = open(path, "w")
    else:
        fh = sys.stderr

    def sink(entry) -> None:
        fh.write(json.dumps(entry.as_dict()) + "\n")
        fh.flush()

    return sink, (fh if path not in (None, "-") else None)


def cmd_adaptive(args) -> dict:
    sources = [args.synthetic_p is not None, args.cmd is not None,
               args.cnf is not None or args.generate is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one oracle: --synthetic-p, --cmd, or --cnf/--generate")
    rng = _seed(args)
    cfg = PlanConfig(alpha=args.alpha, e_t=args.target, n_init=args.n_init,
                     use_scaling=args.scaled, n_cap=args.n_cap)
    extra = {}
    if args.synthetic_p is not None:
        oracle = bernoulli_oracle(args.synthetic_p, rng)
        source = "synthetic"
    elif args.cmd is not None:
        oracle = SubprocessOracle(args.cmd, args.success_exit, args.timeout, rng, args.parallel)
        source = "subprocess"
    else:
        formula = _load_formula(args, rng)
        oracle = WalksatOracle(formula, WalksatConfig(args.w, args.max_flips, rng.derive(1)))
        source = "walksat"
    sink, handle = _trace_sink(args.trace)
    try:
        result = adaptive_repeats(oracle, cfg, on_round=sink)
    finally:
        if handle is not None:
            handle.close()
    if isinstance(oracle, SubprocessOracle):
        extra = {"timeouts": oracle.timeouts, "invocations": oracle.calls}
    est = result.final_estimate
    results = {
        "source": source,
        "plan": result.as_dict(),
        "r_c": r_c_interval(est, args.c).as_dict(),
        "postcondition": {
            "final_n": result.final_n,
            "bound_at_final_p": result.bound_value,
            "holds": result.capped or (result.bound_value is not None
                                       and result.final_n >= result.bound_value),
        },
        **extra,
    }
    prov = {"rng": rng.as_dict()}
    if source == "walksat":
        prov["walksat_backend"] = BACKEND
    return rpt.make_report("adaptive", vars_for(args), results, prov)


def cmd_simulate(args) -> dict:
    rng = _seed(args)
    kind = args.sim_kind
    if kind == "compare":
        rows = compare_grid(args.pairs, args.ns, args.trials, args.c, args.alpha, rng,
                            args.method, args.workers)
        _write(args.csv, rpt.rows_csv(rpt.COMPARE_HEADER,
                                      ((r.p1, r.p2, r.n, r.frac_correct_order, r.frac_no_overlap)
                                       for r in rows)))
        results = {"rows": [r.as_dict() for r in rows]}
    elif kind == "relerr":
        cfg = PlanConfig(alpha=args.alpha, e_t=args.target, n_init=args.n_init,
                         use_scaling=args.scaled, n_cap=args.n_cap)
        stats = [adaptive_relerr_experiment(p, cfg, args.c, args.trials, rng.derive(k), args.workers)
                 for k, p in enumerate(args.p)]
        long_rows = ((s.p_true, t, e) for s in stats for t, e in enumerate(s.rel_errors))
        _write(args.csv, rpt.rows_csv(rpt.RELERR_HEADER, long_rows))
        results = {"stats": [dict(s.as_dict(), fraction_within_target=s.fraction_within(args.target))
                             for s in stats]}
    else:
        gen = rng.generator()
        sample = (gen.random(args.draws) < args.p).astype(np.int8)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            rep = chunked_beta_check(sample, args.chunk_size, args.alpha)
        results = rep.as_dict()
        results["flags"] = _collect_warnings(caught)
    return rpt.make_report("simulate", vars_for(args), results, {"rng": rng.as_dict()})


def _load_formula(args, rng: RngSpec):
    if getattr(args, "cnf", None):
        return read_dimacs(args.cnf)
    spec = args.generate
    return generate_random_ksat(spec["k"], spec["vars"], spec["clauses"], rng.derive(0))


def cmd_walksat(args) -> dict:
    if args.cnf is None and args.generate is None:
        raise UsageError("give a CNF file or --generate k=..,vars=..,clauses=..")
    if args.cnf is not None and args.generate is not None:
        raise UsageError("give either a CNF file or --generate, not both")
    rng = _seed(args)
    formula = _load_formula(args, rng)
    if args.generate is not None and args.write_cnf:
        Path(args.write_cnf).write_text(to_dimacs(formula, [f"generated {args.generate}"]))
        Path(args.write_cnf).with_suffix(".json").write_text(json.dumps(
            {"generator": "uniform random k-SAT", **args.generate,
             "rng": rng.derive(0).as_dict()}, indent=2) + "\n")
    cfg = WalksatConfig(args.w, args.max_flips, rng.derive(1))
    records = run_experiment(formula, cfg, args.repeats, workers=args.workers)
    curve = success_curve(records, args.max_flips)
    _write(args.records, rpt.records_csv(records))
    _write(args.curve, rpt.curve_csv(curve))
    est = confidence_interval(curve.tally(args.max_flips), args.method, args.alpha)
    results = {
        "num_vars": formula.num_vars,
        "num_clauses": formula.num_clauses,
        "successes": est.tally.n_s,
        "repeats": est.tally.n,
        "success": est.as_dict(),
        "r_c": r_c_interval(est, args.c).as_dict(),
        "witnesses_verified": _verify(formula, records),
    }
    return rpt.make_report("walksat", vars_for(args), results,
                           {"rng": rng.as_dict(), "walksat_backend": BACKEND})


def _verify(formula, records) -> bool:
    from .walksat import count_unsat

    return all(count_unsat(formula, r.witness) == 0
               for r in records if r.first_success_iter is not None)


def cmd_cets(args) -> dict:
    if (args.curve is None) == (args.records is None):
        raise UsageError("give exactly one of --curve or --records")
    if args.curve is not None:
        if args.first is not None:
            raise UsageError("--first needs --records")
        curve = rpt.parse_curve(Path(args.curve).read_text())
    else:
        records = rpt.parse_records(Path(args.records).read_text())
        if args.first is not None:
            records = records[: args.first]
        max_iter = args.max_iter
        if max_iter is None:
            raise UsageError("--records needs --max-iter (the censoring budget)")
        curve = success_curve(records, max_iter)
    i_star, est = optimize_cets(curve, args.c, args.e_itr, args.method, args.alpha)
    results = {
        "i_star": i_star,
        "max_iter": curve.max_iter,
        "n": curve.n,
        "cets_opt": est.as_dict(),
        "ci_width": est.width,
        "mode": classify_mode(i_star, curve.max_iter),
        "p_hat_at_i_star": curve.p_hat(i_star),
    }
    return rpt.make_report("cets", vars_for(args), results)


def vars_for(args) -> dict:
    skip = {"func", "output"}
    out = {}
    for k, v in vars(args).items():
        if k in skip:
            continue
        if isinstance(v, CiMethod):
            v = v.value
        out[k] = v
    return out


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="repeatstat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=False):
        p.add_argument("--output", "-o", help="write the JSON report here (default stdout)")
        p.add_argument("--alpha", type=_open_unit, default=0.05)
        if seed:
            p.add_argument("--seed", type=lambda s: int(s, 0),
                           help="master seed (default $REPEATSTAT_SEED)")

    p = sub.add_parser("analyze", help="CI, R_c and CETS for one success tally")
    common(p)
    p.add_argument("--successes", type=int, required=True)
    p.add_argument("--trials", type=_positive_int, required=True)
    p.add_argument("--method", type=_method, default=CiMethod.AGRESTI_COULL)
    p.add_argument("--c", type=_open_unit, default=0.99)
    p.add_argument("--e-itr", type=_positive_float, default=1.0)
    p.add_argument("--i", type=_positive_int, default=1)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("plan", help="sample-size planning")
    psub = p.add_subparsers(dest="plan_kind", required=True)
    q = psub.add_parser("worst-case")
    common(q)
    q.add_argument("--epsilon", type=float, required=True)
    q.add_argument("--simplified", action="store_true", help="use the z = 2 shortcut")
    q = psub.add_parser("target")
    common(q)
    q.add_argument("--p-hat", type=_probability, required=True)
    q.add_argument("--epsilon", type=float, required=True)
    q = psub.add_parser("relative")
    common(q)
    q.add_argument("--p-hat", type=float, required=True)
    q.add_argument("--target", type=_positive_float, required=True)
    q.add_argument("--scaled", action="store_true")
    q = psub.add_parser("exact")
    common(q)
    q.add_argument("--p-hat", type=float, required=True)
    q.add_argument("--target", type=_positive_float, required=True)
    q.add_argument("--c", type=_open_unit, default=0.99)
    q.add_argument("--n-cap", type=_positive_int, default=DEFAULT_N_CAP)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("adaptive", help="adaptive repeat controller")
    common(p, seed=True)
    p.add_argument("--synthetic-p", type=_probability)
    p.add_argument("--cmd", help="solver command template; {seed} and {repeat} are substituted")
    p.add_argument("--cnf", help="DIMACS file solved with the built-in WalkSAT")
    p.add_argument("--generate", type=_generate_spec)
    p.add_argument("--w", type=_probability, default=0.5)
    p.add_argument("--max-flips", type=_positive_int, default=5000)
    p.add_argument("--success-exit", type=int, default=0)
    p.add_argument("--timeout", type=_positive_float, default=60.0)
    p.add_argument("--parallel", type=_positive_int, default=1)
    p.add_argument("--target", type=_positive_float, default=0.1)
    p.add_argument("--n-init", type=_positive_int, default=100)
    p.add_argument("--n-cap", type=_positive_int, default=DEFAULT_N_CAP)
    p.add_argument("--scaled", action="store_true")
    p.add_argument("--c", type=_open_unit, default=0.99)
    p.add_argument("--trace", help="JSON-lines trace destination ('-' for stdout, default stderr)")
    p.set_defaults(func=cmd_adaptive)

    p = sub.add_parser("simulate", help="synthetic Monte Carlo studies")
    ssub = p.add_subparsers(dest="sim_kind", required=True)
    q = ssub.add_parser("compare")
    common(q, seed=True)
    q.add_argument("--pairs", type=_pairs, default=list(DEFAULT_COMPARE_PAIRS))
    q.add_argument("--ns", type=_int_list, default=list(DEFAULT_COMPARE_NS))
    q.add_argument("--trials", type=_positive_int, default=1000)
    q.add_argument("--c", type=_open_unit, default=0.99)
    q.add_argument("--method", type=_method, default=CiMethod.MARGIN)
    q.add_argument("--workers", type=_positive_int, default=1)
    q.add_argument("--csv")
    q = ssub.add_parser("relerr")
    common(q, seed=True)
    q.add_argument("--p", type=_p_list, default=_p_list("0.1..0.9"))
    q.add_argument("--target", type=_positive_float, default=0.1)
    q.add_argument("--n-init", type=_positive_int, default=100)
    q.add_argument("--n-cap", type=_positive_int, default=DEFAULT_N_CAP)
    q.add_argument("--scaled", action="store_true")
    q.add_argument("--trials", type=_positive_int, default=1000)
    q.add_argument("--c", type=_open_unit, default=0.99)
    q.add_argument("--workers", type=_positive_int, default=1)
    q.add_argument("--csv")
    q = ssub.add_parser("chunked")
    common(q, seed=True)
    q.set_defaults(alpha=0.10)
    q.add_argument("--p", type=_probability, default=0.5)
    q.add_argument("--draws", type=_positive_int, default=10_000)
    q.add_argument("--chunk-size", type=_positive_int, default=100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("walksat", help="WalkSAT-SKC experiment")
    common(p, seed=True)
    p.add_argument("cnf", nargs="?", help="DIMACS CNF file")
    p.add_argument("--generate", type=_generate_spec)
    p.add_argument("--write-cnf", help="save the generated instance (plus a .json sidecar)")
    p.add_argument("--w", type=_probability, default=0.5)
    p.add_argument("--max-flips", type=_positive_int, default=5000)
    p.add_argument("--repeats", type=_positive_int, default=100)
    p.add_argument("--workers", type=_positive_int, default=1)
    p.add_argument("--method", type=_method, default=CiMethod.AGRESTI_COULL)
    p.add_argument("--c", type=_open_unit, default=0.99)
    p.add_argument("--records", help="write run records CSV")
    p.add_argument("--curve", help="write success curve CSV")
    p.set_defaults(func=cmd_walksat)

    p = sub.add_parser("cets", help="optimise CETS over iteration budgets")
    common(p)
    p.add_argument("--curve", help="success curve CSV (iter,successes,n)")
    p.add_argument("--records", help="run records CSV (repeat_id,first_success_iter)")
    p.add_argument("--max-iter", type=_positive_int)
    p.add_argument("--first", type=_positive_int, help="use only the first N records")
    p.add_argument("--c", type=_open_unit, default=0.99)
    p.add_argument("--e-itr", type=_positive_float, default=1.0)
    p.add_argument("--method", type=_method, default=CiMethod.AGRESTI_COULL)
    p.set_defaults(func=cmd_cets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"repeatstat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"repeatstat: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DimacsParseError, NoSuccessError, ValueError, OSError) as exc:
        print(f"repeatstat: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    _emit(report, args.output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
