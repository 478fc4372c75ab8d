"""Acceptance suite: one test per criterion, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines as the
criteria execute.  Every tolerance is pinned here: exact (zero-tolerance)
checks compare dyadic rationals or integer counts, statistical checks use
3-sigma binomial bands or chi-square at significance 0.001, and float
cross-checks use the stated 1e-12 / 1e-9 windows.
"""
import math
import random

import numpy as np
import pytest

from forrlab.adversary import (
    FullRead,
    OriginProbe,
    builtin_strategies,
    hoeffding_ci,
    run_experiment,
)
from forrlab.boolfun import Dyadic, TruthTable, forrelation
from forrlab.instances import HFamilySpec, materialize, sample_params
from forrlab.quantum_sim import accept_probability, statevector_accept_probability
from forrlab.rorrelation import (
    hadamard_normalized,
    l1_concentration,
    max_over_g,
    max_rorr,
    rorr,
    sample_haar_orthogonal,
)
from forrlab.verifier import (
    verify_collision_lemma,
    verify_conditional_uniformity,
    verify_extremality,
    verify_marginal_uniformity,
    verify_pairwise_collisions,
    verify_row_rank_fraction,
)

SAMPLED_ARITIES = (4, 6, 8, 10)
SAMPLES_PER_ARITY = 10_000


def report(num: int, name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {num:2d}] {name}: {status}  {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


@pytest.fixture(scope="module")
def extremality_sweep():
    """Shared sweep for criteria 1 and 2: exhaustive n=2 plus 10^4 samples
    at each n in {4, 6, 8, 10}, cycling all applicable h families."""
    reports = {2: verify_extremality(2, "exhaustive")}
    for n in SAMPLED_ARITIES:
        reports[n] = verify_extremality(n, "sampled", SAMPLES_PER_ARITY, seed=100 + n)
    return reports


def test_criterion_01_extremality_exact(extremality_sweep):
    ok = True
    checked = 0
    for n, rep in extremality_sweep.items():
        ok &= rep.details["failures"] == 0
        checked += rep.details["checked"]
        if n == 2:
            ok &= rep.details["checked"] == 192  # 96 parameter settings x 2 labels
    report(1, "extremality-exact", ok,
           f"{checked} instances, zero forrelation mismatches")


def test_criterion_02_bentness(extremality_sweep):
    bent_failures = sum(r.details["bent_failures"] for r in extremality_sweep.values())
    report(2, "bentness-of-yes-instances", bent_failures == 0,
           f"{bent_failures} non-bent yes instances")


def test_criterion_03_quantum_simulator():
    rng = random.Random(42)
    exact_ok = True
    for n in (4, 8):
        for label, want in (("yes", Dyadic(1, 0)), ("no", Dyadic(0, 0))):
            for _ in range(100):
                p = sample_params(n, "standard", HFamilySpec("uniform", n // 2), label, rng)
                exact_ok &= accept_probability(*materialize(p)) == want
    worst = 0.0
    for fb in range(16):
        for gb in range(16):
            f, g = TruthTable(2, fb), TruthTable(2, gb)
            worst = max(worst, abs(float(accept_probability(f, g))
                                   - statevector_accept_probability(f, g)))
    report(3, "quantum-simulator", exact_ok and worst <= 1e-12,
           f"yes/no exact, statevector worst deviation {worst:.2e}")


def test_criterion_04_marginal_uniformity():
    rep = verify_marginal_uniformity(4)
    counts_ok = (
        rep.passed
        and rep.details["full_row_rank"] == 210
        and rep.details["count_per_matrix"] == 96
        and rep.details["invertible"] == 20160
    )
    report(4, "marginal-uniformity-n4", counts_ok,
           "each of 210 full-row-rank halves appears exactly 96 times in 20160")


def test_criterion_05_row_rank_fraction():
    rep4 = verify_row_rank_fraction(4, "exhaustive")
    exact_ok = rep4.passed and rep4.details["count"] == 210 \
        and rep4.details["formula_fraction"] == "105/128"
    rep2 = verify_row_rank_fraction(2, "exhaustive")
    exact_ok &= rep2.passed and rep2.details["count"] == 3
    sampled_ok = True
    zs = []
    for n in (8, 12):
        rep = verify_row_rank_fraction(n, "sampled", samples=1_000_000, seed=200 + n)
        sampled_ok &= rep.passed
        zs.append(rep.details["z"])
    report(5, "row-rank-fraction", exact_ok and sampled_ok,
           f"n=4 exact 210/256; sampled z-scores {zs[0]:.2f}, {zs[1]:.2f}")


def test_criterion_06_cross_collision():
    ok = True
    for n in (2, 4):
        rep = verify_collision_lemma(n, mode="exhaustive", seed=7)
        ok &= rep.passed and len(rep.details["pairs"]) >= 10
    rep12 = verify_collision_lemma(12, mode="sampled", samples=1_000_000, seed=8)
    ok &= rep12.passed
    worst_z = max(p["z"] for p in rep12.details["pairs"])
    report(6, "cross-collision-probability", ok,
           f"n=2,4 exact; n=12 within 3 sigma of 2^-6 (worst z {worst_z:.2f})")


def test_criterion_07_pairwise_collision_bound():
    rep = verify_pairwise_collisions(4, mode="exhaustive")
    ok = rep.passed and rep.details["classes"] == 15
    report(7, "pairwise-collision-bound", ok,
           f"all 15 classes, worst {rep.details['worst_fraction']} <= 3/4")


def test_criterion_08_conditional_uniformity():
    rep = verify_conditional_uniformity(8, xs=[1, 2], ys=[3, 4], trials=100_000, seed=9)
    ok = rep.passed
    report(8, "conditional-uniformity", ok,
           f"chi2 {rep.details['chi2']:.1f} <= {rep.details['critical']:.1f}, "
           f"not-E {rep.details['not_e_frequency']:.3f} <= {rep.details['not_e_bound']:.1f}")


def test_criterion_09_adversary_barrier():
    n = 16
    budget = int(2 ** (n / 4) / (6 * math.sqrt(n)))  # the hard-regime budget (= 0 here)
    fam = HFamilySpec("uniform", n // 2)
    barrier_ok = True
    worst = 0.0
    for strategy in builtin_strategies():
        rep = run_experiment(strategy, n, "standard", fam, budget, 10_000, seed=300)
        barrier_ok &= abs(rep.advantage) <= 0.05 + rep.ci
        worst = max(worst, abs(rep.advantage))

    full = run_experiment(FullRead(), 8, "standard", HFamilySpec("uniform", 4),
                          1 << 9, 500, seed=301)
    probe = run_experiment(OriginProbe(), 8, "naive", HFamilySpec("uniform", 4),
                           2, 10_000, seed=302)
    converse_ok = full.advantage == 1.0 and probe.advantage == 1.0
    report(9, "adversary-barrier", barrier_ok and converse_ok,
           f"D={budget}: worst |advantage| {worst:.4f} <= {0.05 + hoeffding_ci(10_000):.4f}; "
           f"full-read {full.advantage:.1f}, naive origin-probe {probe.advantage:.1f}")


def test_criterion_10_sketch_values():
    rng = random.Random(43)
    ok = verify_extremality(2, "exhaustive", variant="sketch").passed
    for n in (4, 6, 8):
        fams = [HFamilySpec("uniform", n // 2), HFamilySpec("table", n // 2)]
        for i in range(200):
            fam = fams[i % 2]
            p = sample_params(n, "sketch", fam, "yes", rng)
            ok &= forrelation(*materialize(p)) == Dyadic(1, 0)
            p = sample_params(n, "sketch", fam, "no", rng)
            ok &= forrelation(*materialize(p)) == Dyadic(1, n // 2)
    report(10, "sketch-values", ok, "yes = 1 and no = 2^(-n/2), exact, n in {2,4,6,8}")


def test_criterion_11_rorrelation():
    rng = np.random.default_rng(44)

    brute_ok = True
    for _ in range(10):
        u = sample_haar_orthogonal(4, rng)
        for fb in range(16):
            f = TruthTable(2, fb)
            _, value = max_over_g(u, f)
            brute = max(rorr(u, f, TruthTable(2, gb)) for gb in range(16))
            brute_ok &= abs(value - brute) <= 1e-12

    h = hadamard_normalized(2)
    hadamard_ok = all(
        abs(rorr(h, TruthTable(2, fb), TruthTable(2, gb))
            - float(forrelation(TruthTable(2, fb), TruthTable(2, gb)))) <= 1e-9
        for fb in range(16) for gb in range(16)
    )

    values = []
    for _ in range(100):
        u = sample_haar_orthogonal(16, rng)
        values.append(max_rorr(u, "exhaustive")[2])
    haar_ok = max(values) < 1.0

    rep = l1_concentration(256, 100_000, rng)
    orng = np.random.default_rng(45)
    oracle_total = 0.0
    for _ in range(10):
        vecs = orng.standard_normal((10_000, 256))
        oracle_total += float((np.abs(vecs).sum(axis=1) / np.linalg.norm(vecs, axis=1)).sum())
    oracle_mean = oracle_total / 100_000 / math.sqrt(256)
    l1_ok = rep.exceedances == 0 and abs(rep.mean_ratio - oracle_mean) <= 0.01

    report(11, "rorrelation", brute_ok and hadamard_ok and haar_ok and l1_ok,
           f"brute/hadamard exact; Haar N=16 max {max(values):.4f} < 1 over 100 draws; "
           f"l1 mean {rep.mean_ratio:.4f} vs oracle {oracle_mean:.4f}, 0 exceedances")
