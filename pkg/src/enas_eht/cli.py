"""Command-line front end: counting, transition, bound, simulation, and compare runs.

All randomness flows from one --seed; sub-streams derive from labeled
SeedSequence entropy (seed, operator code, q, lambda, trial), so every
subcommand is deterministic given its full flag set.

Exit codes: 0 success, 2 validation errors, 1 runtime errors or lower-bound
violations reported by compare.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from .benchio import BenchmarkFormatError, FitnessLandscape, distance_landscape, load_tabular_benchmark
from .drift import (
    DistanceDistribution,
    case_study_bounds,
    class_gamma_weights,
    eht_lower_bound_m1,
    eht_lower_bound_m2,
    eht_lower_bound_m3,
    eht_lower_bound_m4,
    empirical_class_gamma_weights,
    empirical_distance_distribution,
    gaussian_fit_distribution,
    uniform_initial_distribution,
)
from .genotype import DistanceProfile, Genotype, SearchSpaceParams, derive_params, count_solutions_at_distance, count_population_class, count_population_subspace, population_space_size
from .operators import MutationOp, make_rng
from .simulator import RunConfig, run_trials, sample_distance_gamma
from .transition import exact_enumeration_oracle, step_distribution
from .simulator import mc_transition_oracle

SCHEMA_COMMENT = "# schema=v1"
DEFAULT_SWEEP = "1:100:4"
OP_CODES = {"m1": 1, "m2": 2, "m3": 3, "m4": 4}


class ValidationError(ValueError):
    pass


def _parse_sweep(text: str) -> list[int]:
    try:
        start, stop, step = (int(v) for v in text.split(":"))
    except ValueError as exc:
        raise ValidationError(f"bad sweep {text!r}: expected START:STOP:STEP") from exc
    if start < 1 or stop < start or step < 1:
        raise ValidationError(f"bad sweep bounds {text!r}")
    return list(range(start, stop + 1, step))


def _resolve_landscape(spec: str, p: SearchSpaceParams, seed: int) -> FitnessLandscape:
    if spec == "distance":
        rng = make_rng([seed, 7])
        target = Genotype(
            edges=tuple(int(b) for b in rng.integers(0, 2, size=p.n1)),
            ops=tuple(int(o) for o in rng.integers(0, p.L + 1, size=p.n2)),
        )
        return distance_landscape(p, target)
    if spec.startswith("table:"):
        _, land = load_tabular_benchmark(spec[len("table:") :], p)
        return land
    raise ValidationError(f"unknown landscape {spec!r} (expected 'distance' or 'table:PATH')")


def _open_out(path: Optional[str]):
    if path is None:
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_rows(path: Optional[str], comments: list[str], header: list[str], rows: list[list]) -> None:
    fh, close = _open_out(path)
    try:
        for c in comments:
            fh.write(c + "\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if close:
            fh.close()


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(float(v))  # plain-float repr even for numpy scalars
    return str(v)


def _series(ops: list[str], qs: list[int]) -> list[tuple[str, int]]:
    """Expand operator codes to (code, q) points; non-q operators carry q=0."""
    out = []
    for code in ops:
        if code == "m3":
            out.extend(("m3", q) for q in qs)
        else:
            out.append((code, 0))
    return out


def cmd_count(args) -> int:
    p = derive_params(args.v, args.L)
    lam = args.lam
    rows = []
    chi0 = population_space_size(p, lam) - sum(count_population_subspace(p, lam, i) for i in range(1, p.n + 1))
    rows.append([0, 1, chi0] + [""] * lam)
    for d in range(1, p.n + 1):
        gammas = [count_population_class(p, lam, d, g) for g in range(1, lam + 1)]
        rows.append([d, count_solutions_at_distance(p, d), sum(gammas)] + gammas)
    header = ["d", "C_d", "chi_d"] + [f"gamma_{g}" for g in range(1, lam + 1)]
    _write_rows(args.out, [SCHEMA_COMMENT], header, rows)
    return 0


def cmd_transition(args) -> int:
    p = derive_params(args.v, args.L)
    prof = DistanceProfile(d1=args.d1, d2=args.d2)
    if not (0 <= args.d1 <= p.n1 and 0 <= args.d2 <= p.n2):
        raise ValidationError(f"infeasible profile (d1={args.d1}, d2={args.d2})")
    op = MutationOp.from_code(args.op, q=args.q or 0)
    dist = step_distribution(p, op, prof)
    analytic = dist.as_floats()
    header = ["d_y", "probability"]
    oracle: dict[int, float] = {}
    if args.oracle == "exact":
        x, opt = _profile_witness(p, prof)
        oracle = exact_enumeration_oracle(x, p, op, opt).as_floats()
        header.append("oracle_probability")
    elif args.oracle == "mc":
        x, opt = _profile_witness(p, prof)
        oracle = mc_transition_oracle(x, p, op, opt, max(args.trials, 10**4), [args.seed, 11])
        header.append("oracle_probability")
    keys = sorted(set(analytic) | set(oracle))
    rows = []
    for d_y in keys:
        row = [d_y, _fmt(analytic.get(d_y, 0.0))]
        if args.oracle != "none":
            row.append(_fmt(oracle.get(d_y, 0.0)))
        rows.append(row)
    _write_rows(args.out, [SCHEMA_COMMENT], header, rows)
    return 0


def _profile_witness(p: SearchSpaceParams, prof: DistanceProfile) -> tuple[Genotype, Genotype]:
    """A concrete (x, optimum) pair realizing the profile (any choice is distance-equivalent)."""
    opt = Genotype(edges=(0,) * p.n1, ops=(0,) * p.n2)
    edges = tuple(1 if k < prof.d1 else 0 for k in range(p.n1))
    ops = tuple(1 if k < prof.d2 else 0 for k in range(p.n2))
    return Genotype(edges=edges, ops=ops), opt


def _pi_t_for_lambda(args, p: SearchSpaceParams, lam: int):
    """Resolve (pi_t, one-slot weights) for one sweep point."""
    if args.pi_t == "uniform":
        return uniform_initial_distribution(p, lam, conditioned=True), class_gamma_weights(p, lam)
    if args.pi_t.startswith("empirical:"):
        path = args.pi_t[len("empirical:") :]
        with open(path, "r", encoding="utf-8") as fh:
            samples = [int(line.strip()) for line in fh if line.strip() and not line.startswith("#")]
        return empirical_distance_distribution(samples, p.n), class_gamma_weights(p, lam)
    if args.pi_t == "gaussian-fit":
        landscape = _resolve_landscape(args.landscape, p, args.seed)
        cfg = RunConfig(
            params=p,
            lam=lam,
            op=MutationOp.from_code("m1"),
            landscape=landscape,
            max_generations=args.max_gens,
            seed=(args.seed, 101, lam),
        )
        pairs = sample_distance_gamma(cfg, args.trials)
        pi_t = gaussian_fit_distribution([d for d, _ in pairs], p.n)
        weights = empirical_class_gamma_weights(pairs, p, lam)
        return pi_t, weights
    raise ValidationError(f"unknown pi-t source {args.pi_t!r}")


def cmd_eht_bound(args) -> int:
    p = derive_params(args.v, args.L)
    lams = [args.lam] if args.lam is not None else _parse_sweep(args.lambda_sweep)
    ops = [args.op] if args.op else ["m1", "m2", "m3", "m4"]
    qs = [args.q] if args.q else [1, 2, 3, 4, 5]
    points = _series(ops, qs)
    rows = []
    for lam in lams:
        pi_t, weights = _pi_t_for_lambda(args, p, lam)
        pi0 = uniform_initial_distribution(p, lam, conditioned=False)
        for code, q in points:
            if code == "m1":
                rep = eht_lower_bound_m1(p, lam, pi_t, pi0, weights)
            elif code == "m2":
                rep = eht_lower_bound_m2(p, lam, pi_t, pi0, weights)
            elif code == "m3":
                rep = eht_lower_bound_m3(p, lam, q, pi_t, pi0)
            else:
                rep = eht_lower_bound_m4(p, lam, pi_t, pi0)
            rows.append([code, q, lam, _fmt(rep.expected_initial_distance), _fmt(rep.average_drift_upper), _fmt(rep.eht_lower_bound)])
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    header = ["operator", "q", "lambda", "E_d0", "avg_drift_upper", "eht_lower_bound"]
    _write_rows(args.out, [SCHEMA_COMMENT], header, rows)
    return 0


def _simulate_point(payload) -> list:
    p, code, q, lam, landscape, trials, max_gens, seed = payload
    cfg = RunConfig(
        params=p,
        lam=lam,
        op=MutationOp.from_code(code, q=q),
        landscape=landscape,
        max_generations=max_gens,
        seed=(seed, OP_CODES[code], q, lam),
    )
    stats = run_trials(cfg, trials)
    return [code, q, lam, trials, _fmt(stats.mean), _fmt(stats.std), stats.censored_count]


def cmd_simulate(args) -> int:
    p = derive_params(args.v, args.L)
    lams = [args.lam] if args.lam is not None else _parse_sweep(args.lambda_sweep)
    ops = [args.op] if args.op else ["m1", "m2", "m3", "m4"]
    qs = [args.q] if args.q else [1, 2, 3, 4, 5]
    landscape = _resolve_landscape(args.landscape, p, args.seed)
    payloads = [
        (p, code, q, lam, landscape, args.trials, args.max_gens, args.seed)
        for code, q in _series(ops, qs)
        for lam in lams
    ]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_simulate_point, payloads))
    else:
        rows = [_simulate_point(pl) for pl in payloads]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    header = ["operator", "q", "lambda", "trials", "mean_generations", "std", "censored"]
    _write_rows(args.out, [SCHEMA_COMMENT, f"# max_gens={args.max_gens}"], header, rows)
    return 0


def _read_csv(path: str, required: list[str]) -> tuple[list[dict], dict]:
    meta = {}
    with open(path, "r", encoding="utf-8") as fh:
        lines = []
        for line in fh:
            if line.startswith("#"):
                stripped = line[1:].strip()
                if "=" in stripped:
                    k, _, v = stripped.partition("=")
                    meta[k.strip()] = v.strip()
                continue
            lines.append(line)
    reader = csv.DictReader(io.StringIO("".join(lines)))
    rows = list(reader)
    missing = [c for c in required if not rows or c not in rows[0]]
    if missing:
        raise ValidationError(f"{path}: missing columns {missing}")
    return rows, meta


def cmd_compare(args) -> int:
    theory, _ = _read_csv(args.theory, ["operator", "q", "lambda", "E_d0", "avg_drift_upper", "eht_lower_bound"])
    empirical, meta = _read_csv(
        args.empirical, ["operator", "q", "lambda", "trials", "mean_generations", "std", "censored"]
    )
    max_gens = int(meta["max_gens"]) if "max_gens" in meta else None
    emp_by_key = {(r["operator"], r["q"], r["lambda"]): r for r in empirical}
    rows = []
    violations = 0
    for t in theory:
        key = (t["operator"], t["q"], t["lambda"])
        if key not in emp_by_key:
            raise ValidationError(f"empirical CSV has no row for {key}")
        e = emp_by_key[key]
        bound = float(t["eht_lower_bound"])
        trials = int(e["trials"])
        censored = int(e["censored"])
        mean = float(e["mean_generations"])
        if censored == 0:
            reference = mean
        elif max_gens is not None:
            # conservative lower bound on the true mean: censored trials ran
            # at least max_gens generations without hitting
            uncensored_sum = 0.0 if math.isnan(mean) else mean * (trials - censored)
            reference = (uncensored_sum + censored * max_gens) / trials
        else:
            reference = float("inf")
        violation = int(bound > reference * 1.05)
        violations += violation
        rows.append(
            [t["operator"], t["q"], t["lambda"], t["E_d0"], t["avg_drift_upper"], t["eht_lower_bound"],
             e["trials"], e["mean_generations"], e["std"], e["censored"], violation]
        )
    rows.sort(key=lambda r: (r[0], int(r[1]), int(r[2])))
    header = ["operator", "q", "lambda", "E_d0", "avg_drift_upper", "eht_lower_bound",
              "trials", "mean_generations", "std", "censored", "violation"]
    _write_rows(args.out, [SCHEMA_COMMENT, f"# violations={violations}"], header, rows)
    if violations:
        print(f"compare: {violations} lower-bound violation(s)", file=sys.stderr)
        return 1
    return 0


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--v", type=int, default=7)
    sub.add_argument("--L", type=int, default=2)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", type=str, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="enas-eht", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    c = subs.add_parser("count", help="exact distance-class and population-class counts")
    _add_common(c)
    c.add_argument("--lambda", dest="lam", type=int, default=1)
    c.set_defaults(fn=cmd_count)

    t = subs.add_parser("transition", help="analytic mutation step distribution for one profile")
    _add_common(t)
    t.add_argument("--op", choices=["m1", "m2", "m3", "m4"], required=True)
    t.add_argument("--q", type=int, default=None)
    t.add_argument("--d1", type=int, required=True)
    t.add_argument("--d2", type=int, required=True)
    t.add_argument("--oracle", choices=["none", "exact", "mc"], default="none")
    t.add_argument("--trials", type=int, default=10**6)
    t.set_defaults(fn=cmd_transition)

    b = subs.add_parser("eht-bound", help="theorem lower bounds over a lambda sweep")
    _add_common(b)
    b.add_argument("--lambda", dest="lam", type=int, default=None)
    b.add_argument("--lambda-sweep", type=str, default=DEFAULT_SWEEP)
    b.add_argument("--op", choices=["m1", "m2", "m3", "m4"], default=None)
    b.add_argument("--q", type=int, default=None)
    b.add_argument("--pi-t", dest="pi_t", type=str, default="gaussian-fit")
    b.add_argument("--trials", type=int, default=1000)
    b.add_argument("--max-gens", type=int, default=3000)
    b.add_argument("--landscape", type=str, default="distance")
    b.set_defaults(fn=cmd_eht_bound)

    s = subs.add_parser("simulate", help="empirical hitting times over a lambda sweep")
    _add_common(s)
    s.add_argument("--lambda", dest="lam", type=int, default=None)
    s.add_argument("--lambda-sweep", type=str, default=DEFAULT_SWEEP)
    s.add_argument("--op", choices=["m1", "m2", "m3", "m4"], default=None)
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--max-gens", type=int, default=1000)
    s.add_argument("--landscape", type=str, default="distance")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(fn=cmd_simulate)

    m = subs.add_parser("compare", help="join bound and simulation CSVs; flag violations")
    m.add_argument("--theory", type=str, required=True)
    m.add_argument("--empirical", type=str, required=True)
    m.add_argument("--out", type=str, default=None)
    m.set_defaults(fn=cmd_compare)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValidationError, BenchmarkFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
