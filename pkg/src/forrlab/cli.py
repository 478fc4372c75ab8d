"""Command-line front end.

Subcommands: gen (sample an instance), eval (exact forrelation), qsim
(one-query quantum outcome), adv (classical adversary experiments),
verify (construction checks), rorr (orthogonal-matrix experiments).

Machine-readable JSON goes to stdout, human summaries to stderr.  Exit
codes: 0 pass, 1 check failure, 2 usage error.  All randomness derives
from --seed; repeated runs are byte-identical.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
from pathlib import Path

import numpy as np

from . import adversary, quantum_sim, verifier
from .boolfun import TruthTable, forrelation
from .instances import HFamilySpec, materialize, params_from_json, params_to_json, sample_params
from .rorrelation import (
    hadamard_normalized,
    l1_concentration,
    max_rorr,
    rorr,
    sample_haar_orthogonal,
)
from .seeds import derive_seed


class UsageError(Exception):
    pass


def _emit(obj, human: str) -> None:
    print(json.dumps(obj, sort_keys=True))
    print(human, file=sys.stderr)


def _threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get("FORRLAB_THREADS")
    if env:
        return int(env)
    return os.cpu_count() or 1


def _load_params(path: str):
    with open(path) as fh:
        return params_from_json(json.load(fh))


def cmd_gen(args) -> int:
    if args.n % 2 or args.n < 2:
        raise UsageError("--n must be even and >= 2")
    family = HFamilySpec.parse(args.family, args.n // 2)
    rng = random.Random(derive_seed(args.seed, "gen"))
    params = sample_params(args.n, args.variant, family, args.label, rng)
    obj = params_to_json(params)
    text = json.dumps(obj, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.tables:
        if args.n > 26:
            raise UsageError("--tables requires n <= 26")
        f, g = materialize(params)
        Path(args.tables + ".f.tt").write_text(f.to_file_text())
        Path(args.tables + ".g.tt").write_text(g.to_file_text())
    note = " (naive variant: origin probe distinguishes it)" if args.variant == "naive" else ""
    print(
        f"gen: n={args.n} variant={args.variant} family={args.family} "
        f"label={args.label}{note}",
        file=sys.stderr,
    )
    return 0


def cmd_eval(args) -> int:
    if args.instance:
        params = _load_params(args.instance)
        if params.n > 26:
            raise UsageError("instance too large to materialize")
        f, g = materialize(params)
    else:
        if not (args.f and args.g):
            raise UsageError("need --instance or both --f and --g")
        f = TruthTable.from_file_text(Path(args.f).read_text())
        g = TruthTable.from_file_text(Path(args.g).read_text())
        if f.n != g.n:
            raise UsageError(f"arity mismatch: {f.n} vs {g.n}")
    forr = forrelation(f, g)
    _emit(
        {"schema": 1, "n": f.n, "forr": str(forr), "decimal": float(forr)},
        f"forr = {forr} ({float(forr)})",
    )
    return 0


def cmd_qsim(args) -> int:
    params = _load_params(args.instance)
    if params.n > 26:
        raise UsageError("instance too large to materialize")
    f, g = materialize(params)
    prob = quantum_sim.accept_probability(f, g)
    obj = {"schema": 1, "n": f.n, "accept_prob": str(prob), "decimal": float(prob)}
    if args.shots:
        rng = random.Random(derive_seed(args.seed, "qsim"))
        accepts = sum(
            quantum_sim.sample_outcome(f, g, rng) == "accept" for _ in range(args.shots)
        )
        obj["shots"] = args.shots
        obj["accepts"] = accepts
    _emit(obj, f"accept_prob = {prob} ({float(prob)})")
    return 0


def cmd_adv(args) -> int:
    if args.n % 2 or args.n < 2:
        raise UsageError("--n must be even and >= 2")
    strategy = adversary.strategy_by_name(args.strategy)
    family = HFamilySpec.parse(args.family, args.n // 2)
    report = adversary.run_experiment(
        strategy, args.n, args.variant, family, args.d, args.trials,
        seed=args.seed, threads=_threads(args),
    )
    if args.csv:
        path = Path(args.csv)
        line = report.csv_row() + "\n"
        if path.exists():
            with path.open("a") as fh:
                fh.write(line)
        else:
            path.write_text(adversary.AdvantageReport.CSV_HEADER + "\n" + line)
    _emit(
        report.to_json(),
        f"{report.strategy} n={report.n} D={report.d}: advantage "
        f"{report.advantage:+.4f} +- {report.ci:.4f}",
    )
    return 0


def cmd_verify(args) -> int:
    mode = "exhaustive" if args.exhaustive else "sampled"
    if args.lemma == "all":
        reports = verifier.run_all(
            args.n, mode, seed=args.seed, samples=args.samples, trials=args.trials
        )
    elif args.lemma == "extremality":
        reports = [verifier.verify_extremality(args.n, mode, args.samples, args.seed)]
    elif args.lemma == "sketch":
        reports = [
            verifier.verify_extremality(args.n, mode, args.samples, args.seed, variant="sketch")
        ]
    elif args.lemma == "marginal-uniformity":
        reports = [verifier.verify_marginal_uniformity(args.n)]
    elif args.lemma == "row-rank":
        reports = [verifier.verify_row_rank_fraction(args.n, mode, args.samples, args.seed)]
    elif args.lemma == "collision":
        reports = [
            verifier.verify_collision_lemma(args.n, mode=mode, samples=args.samples, seed=args.seed)
        ]
    elif args.lemma == "pairwise":
        reports = [
            verifier.verify_pairwise_collisions(args.n, mode=mode, samples=args.samples, seed=args.seed)
        ]
    elif args.lemma == "conditional":
        reports = [
            verifier.verify_conditional_uniformity(args.n, trials=args.trials, seed=args.seed, mode=mode)
        ]
    else:
        raise UsageError(f"unknown check {args.lemma!r}")

    print(json.dumps([r.to_json() for r in reports], sort_keys=True))
    ok = True
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.lemma} n={r.n} [{r.mode}]: {r.observed}", file=sys.stderr)
        ok &= r.passed
    return 0 if ok else 1


def cmd_rorr(args) -> int:
    rng = np.random.default_rng(derive_seed(args.seed, "rorr"))
    if args.op == "l1":
        report = l1_concentration(args.dim, args.samples, rng)
        _emit(
            report.to_json(),
            f"l1: N={report.dim} mean {report.mean_ratio:.4f} max {report.max_ratio:.4f} "
            f"exceedances {report.exceedances}",
        )
        return 0
    if args.op == "max":
        values = []
        for _ in range(args.draws):
            u = hadamard_normalized(args.dim.bit_length() - 1) if args.hadamard \
                else sample_haar_orthogonal(args.dim, rng)
            if args.dump_csv:
                np.savetxt(args.dump_csv, u, delimiter=",")
            _, _, value = max_rorr(u, args.mode, restarts=args.restarts, rng=rng)
            values.append(value)
        obj = {
            "schema": 1,
            "N": args.dim,
            "mode": args.mode,
            "draws": args.draws,
            "hadamard": bool(args.hadamard),
            "max": max(values),
            "min": min(values),
            "values": values,
        }
        _emit(obj, f"max rorr over {args.draws} draws: max {max(values):.6f}")
        return 0
    if args.op == "check":
        n = args.dim.bit_length() - 1
        if 1 << n != args.dim:
            raise UsageError("--N must be a power of two")
        h = hadamard_normalized(n)
        worst = 0.0
        hrng = random.Random(derive_seed(args.seed, "rorr-check"))
        for _ in range(args.samples):
            f = TruthTable(n, hrng.getrandbits(1 << n))
            g = TruthTable(n, hrng.getrandbits(1 << n))
            worst = max(worst, abs(rorr(h, f, g) - float(forrelation(f, g))))
        ok = worst <= 1e-9
        _emit(
            {"schema": 1, "N": args.dim, "samples": args.samples, "worst": worst, "pass": ok},
            f"hadamard check worst deviation {worst:.2e}",
        )
        return 0 if ok else 1
    raise UsageError(f"unknown rorr op {args.op!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forrlab",
        description="Exact forrelation laboratory: generate extremal instances, "
        "evaluate them, simulate the one-query quantum test, run classical "
        "adversaries, and verify the construction.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    common.add_argument("--threads", type=int, default=0,
                        help="worker pool size (default: FORRLAB_THREADS or cpu count)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_text, parents=[common])

    p = add_parser("gen", "sample an instance and write its parameter JSON")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=["standard", "sketch", "naive"], default="standard")
    p.add_argument("--family", default="uniform", help="uniform | table | poly:d | prf")
    p.add_argument("--label", choices=["yes", "no"], default="yes")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--tables", metavar="PREFIX", help="also write PREFIX.{f,g}.tt truth tables")
    p.set_defaults(func=cmd_gen)

    p = add_parser("eval", "exact forrelation of an instance or table pair")
    p.add_argument("--instance")
    p.add_argument("--f")
    p.add_argument("--g")
    p.set_defaults(func=cmd_eval)

    p = add_parser("qsim", "accept probability of the one-query quantum test")
    p.add_argument("--instance", required=True)
    p.add_argument("--shots", type=int, default=0)
    p.set_defaults(func=cmd_qsim)

    p = add_parser("adv", "measure a classical strategy's advantage")
    p.add_argument("--strategy", required=True,
                   choices=[s.name for s in adversary.builtin_strategies()])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--variant", choices=["standard", "sketch", "naive"], default="standard")
    p.add_argument("--family", default="uniform")
    p.add_argument("--d", type=int, required=True, help="query budget")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--csv", help="append the report as a CSV row to this file")
    p.set_defaults(func=cmd_adv)

    p = add_parser("verify", "run construction checks")
    p.add_argument("--lemma", default="all",
                   choices=["all", "extremality", "sketch", "marginal-uniformity",
                            "row-rank", "collision", "pairwise", "conditional"])
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--trials", type=int, default=100_000)
    p.set_defaults(func=cmd_verify)

    p = add_parser("rorr", "orthogonal-matrix correlation experiments")
    p.add_argument("--op", choices=["max", "l1", "check"], required=True)
    p.add_argument("--N", dest="dim", type=int, required=True)
    p.add_argument("--draws", type=int, default=1)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--mode", choices=["exhaustive", "local-search"], default="exhaustive")
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--hadamard", action="store_true",
                   help="use the normalized Hadamard matrix instead of a Haar draw")
    p.add_argument("--dump-csv", help="write the (last) sampled matrix as CSV")
    p.set_defaults(func=cmd_rorr)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
