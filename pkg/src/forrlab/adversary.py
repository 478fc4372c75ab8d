"""Classical query adversaries and the advantage-measurement harness.

A strategy sees only an oracle and a query budget (black-box model: no
access to the sampled parameters).  The harness runs labeled trials with an
even yes/no split, derives per-trial seeds from the master seed so runs are
reproducible and order-independent, and reports

    advantage = Pr[guess yes | yes instance] - Pr[guess yes | no instance]

with a two-sided 99% Hoeffding confidence half-width.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boolfun import TruthTable, forrelation
from .f2linalg import BitVector
from .instances import BudgetExceededError, HFamilySpec, Oracle, sample_instance
from .seeds import derive_seed

HOEFFDING_ALPHA = 0.01


class Strategy:
    """Base class: subclasses answer "yes"/"no" from oracle queries alone."""

    name = "abstract"

    def run(self, oracle: Oracle, budget: int, rng: random.Random) -> str:
        raise NotImplementedError


def _coin(rng: random.Random) -> str:
    return "yes" if rng.getrandbits(1) else "no"


class OriginProbe(Strategy):
    """Query both functions at the all-zero point; answer yes iff they agree.

    Breaks the shift-free (naive) construction outright; against the
    shifted construction the matching pair of answers sits at an unknown
    point, so this degrades to (nearly) coin flipping.
    """

    name = "origin-probe"

    def run(self, oracle: Oracle, budget: int, rng: random.Random) -> str:
        if budget < 2:
            return _coin(rng)
        zero = BitVector.zero(oracle.n)
        return "yes" if oracle.query_f(zero) * oracle.query_g(zero) == 1 else "no"


class RandomCorrelator(Strategy):
    """Average f(x) g(y) (-1)^<x,y> over budget/2 independent random pairs."""

    name = "random-correlator"

    def run(self, oracle: Oracle, budget: int, rng: random.Random) -> str:
        pairs = budget // 2
        if pairs == 0:
            return _coin(rng)
        n = oracle.n
        total = 0
        for _ in range(pairs):
            x = rng.getrandbits(n)
            y = rng.getrandbits(n)
            term = oracle.query_f(BitVector(n, x)) * oracle.query_g(BitVector(n, y))
            if (x & y).bit_count() & 1:
                term = -term
            total += term
        if total == 0:
            return _coin(rng)
        return "yes" if total > 0 else "no"


class CollisionHunter(Strategy):
    """Correlate every queried x against every queried y.

    Spends half the budget on random f points and half on random g points,
    then sums f(x) g(y) (-1)^<x,y> over the full bipartite grid, hoping the
    hidden matched pair(s) tilt the pattern.
    """

    name = "collision-hunter"

    def run(self, oracle: Oracle, budget: int, rng: random.Random) -> str:
        k = budget // 2
        m = budget - k
        if k == 0 or m == 0:
            return _coin(rng)
        n = oracle.n
        xs = [rng.getrandbits(n) for _ in range(k)]
        ys = [rng.getrandbits(n) for _ in range(m)]
        fx = np.array([oracle.query_f(BitVector(n, x)) for x in xs], dtype=np.int64)
        gy = np.array([oracle.query_g(BitVector(n, y)) for y in ys], dtype=np.int64)
        xa = np.array(xs, dtype=np.uint64)
        ya = np.array(ys, dtype=np.uint64)
        par = (np.bitwise_count(xa[:, None] & ya[None, :]) & 1).astype(np.int64)
        total = int(np.sum(fx[:, None] * gy[None, :] * (1 - 2 * par)))
        if total == 0:
            return _coin(rng)
        return "yes" if total > 0 else "no"


class FullRead(Strategy):
    """Read both truth tables in full and evaluate forrelation exactly."""

    name = "full-read"

    def run(self, oracle: Oracle, budget: int, rng: random.Random) -> str:
        n = oracle.n
        if budget < 1 << (n + 1):
            return _coin(rng)
        size = 1 << n
        f_signs = [oracle.query_f(BitVector(n, x)) for x in range(size)]
        g_signs = [oracle.query_g(BitVector(n, y)) for y in range(size)]
        forr = forrelation(TruthTable.from_signs(f_signs), TruthTable.from_signs(g_signs))
        if forr.num == 0:
            return _coin(rng)
        return "yes" if forr.num > 0 else "no"


def builtin_strategies() -> list[Strategy]:
    return [OriginProbe(), RandomCorrelator(), CollisionHunter(), FullRead()]


def strategy_by_name(name: str) -> Strategy:
    for s in builtin_strategies():
        if s.name == name:
            return s
    raise ValueError(f"unknown strategy {name!r}")


def family_label(family: HFamilySpec) -> str:
    return f"poly:{family.degree}" if family.kind == "poly" else family.kind


def hoeffding_ci(trials: int, alpha: float = HOEFFDING_ALPHA) -> float:
    return 2.0 * math.sqrt(math.log(2.0 / alpha) / (2.0 * trials))


@dataclass(frozen=True)
class AdvantageReport:
    strategy: str
    n: int
    variant: str
    family: str
    d: int
    trials: int
    p_yes: float
    p_no: float
    advantage: float
    ci: float
    budget_violations: int = 0

    CSV_HEADER = "strategy,n,variant,family,D,trials,p_yes,p_no,advantage,ci"

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "strategy": self.strategy,
            "n": self.n,
            "variant": self.variant,
            "family": self.family,
            "D": self.d,
            "trials": self.trials,
            "p_yes": self.p_yes,
            "p_no": self.p_no,
            "advantage": self.advantage,
            "ci": self.ci,
            "budget_violations": self.budget_violations,
        }

    def csv_row(self) -> str:
        return (
            f"{self.strategy},{self.n},{self.variant},{self.family},{self.d},"
            f"{self.trials},{self.p_yes:.6f},{self.p_no:.6f},"
            f"{self.advantage:.6f},{self.ci:.6f}"
        )


def _run_trial(
    strategy: Strategy,
    n: int,
    variant: str,
    family: HFamilySpec,
    d: int,
    seed: int,
    index: int,
) -> tuple[str, str | None]:
    label = "yes" if index % 2 == 0 else "no"
    inst_rng = random.Random(derive_seed(seed, f"inst:{index}"))
    strat_rng = random.Random(derive_seed(seed, f"strat:{index}"))
    oracle = sample_instance(n, variant, family, label, inst_rng, limit=d)
    try:
        guess = strategy.run(oracle, d, strat_rng)
    except BudgetExceededError:
        return label, None
    if guess not in ("yes", "no"):
        raise ValueError(f"strategy returned {guess!r}")
    return label, guess


def _run_range(args) -> tuple[int, int, int, int, int]:
    strategy, n, variant, family, d, seed, lo, hi = args
    yes_trials = yes_hits = no_trials = no_hits = violations = 0
    for i in range(lo, hi):
        label, guess = _run_trial(strategy, n, variant, family, d, seed, i)
        if guess is None:
            violations += 1
            continue
        if label == "yes":
            yes_trials += 1
            yes_hits += guess == "yes"
        else:
            no_trials += 1
            no_hits += guess == "yes"
    return yes_trials, yes_hits, no_trials, no_hits, violations


def run_experiment(
    strategy: Strategy,
    n: int,
    variant: str,
    family: HFamilySpec,
    d: int,
    trials: int,
    seed: int,
    threads: int = 1,
) -> AdvantageReport:
    """Measure distinguishing advantage over ``trials`` labeled instances."""
    if d < 0 or trials < 1:
        raise ValueError("need d >= 0 and trials >= 1")
    if threads > 1:
        chunk = max(1, trials // (threads * 4))
        jobs = [
            (strategy, n, variant, family, d, seed, lo, min(lo + chunk, trials))
            for lo in range(0, trials, chunk)
        ]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_range, jobs))
    else:
        parts = [_run_range((strategy, n, variant, family, d, seed, 0, trials))]

    yes_trials = sum(p[0] for p in parts)
    yes_hits = sum(p[1] for p in parts)
    no_trials = sum(p[2] for p in parts)
    no_hits = sum(p[3] for p in parts)
    violations = sum(p[4] for p in parts)

    p_yes = yes_hits / yes_trials if yes_trials else 0.0
    p_no = no_hits / no_trials if no_trials else 0.0
    return AdvantageReport(
        strategy=strategy.name,
        n=n,
        variant=variant,
        family=family_label(family),
        d=d,
        trials=trials,
        p_yes=p_yes,
        p_no=p_no,
        advantage=p_yes - p_no,
        ci=hoeffding_ci(trials),
        budget_violations=violations,
    )
