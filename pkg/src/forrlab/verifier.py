"""Exhaustive and Monte-Carlo verification of the construction's guarantees.

Each verifier checks one quantitative claim about the instance family:

- extremality: sampled/exhaustive instances hit forrelation exactly +-1
  (or exactly 1 and 2^{-n/2} for the sketch variant), with the yes
  functions bent;
- marginal-uniformity: the half-matrix marginals A2 and B1 are exactly
  uniform over full-row-rank rectangular matrices, and their exact total
  variation distance from fully uniform is within (n/2) 2^{-n/2};
- row-rank: the full-row-rank counting formula and its lower bound;
- collision: the shifted cross-collision probability is exactly 2^{-n/2};
- pairwise: same-side collision probabilities obey the
  (n/2 + 1) 2^{-n/2} bound;
- conditional: fixing a query set, outcomes conditioned on distinct
  implicit h-inputs are uniform over all 2^l patterns.

Exhaustive modes assert exact rational equalities; sampled modes use
3-sigma binomial bands or a chi-square test at significance 0.001.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.stats import chi2

from . import _kernels
from .boolfun import Dyadic, wht
from .f2linalg import (
    BitMatrix,
    BitVector,
    hard_matrices_from,
    invert,
    mat_vec,
    rank,
    sample_hard_matrices,
)
from .instances import (
    HardParams,
    HFamilySpec,
    TableH,
    _apply_rows,
    _f_bit,
    _g_bit,
    materialize,
    params_to_json,
    sample_params,
)
from .seeds import derive_seed

CHI_SQUARE_ALPHA = 0.001


@dataclass
class VerifyReport:
    lemma: str
    n: int
    mode: str
    expected: str
    observed: str
    passed: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "schema": 1,
            "lemma": self.lemma,
            "n": self.n,
            "mode": self.mode,
            "expected": self.expected,
            "observed": self.observed,
            "pass": self.passed,
            "details": self.details,
        }


def chi_square_uniform(counts, alpha: float = CHI_SQUARE_ALPHA) -> tuple[float, float, bool]:
    """Pearson chi-square test against the uniform distribution."""
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    expected = total / counts.size
    stat = float(np.sum((counts - expected) ** 2) / expected)
    critical = float(chi2.ppf(1.0 - alpha, counts.size - 1))
    return stat, critical, stat <= critical


def invertible_count(n: int) -> int:
    out = 1
    for i in range(1, n + 1):
        out *= (1 << n) - (1 << (i - 1))
    return out


def full_row_rank_count_formula(rows: int, cols: int) -> int:
    out = 1
    for i in range(1, rows + 1):
        out *= (1 << cols) - (1 << (i - 1))
    return out


@lru_cache(maxsize=None)
def enumerate_invertible(n: int) -> tuple[tuple[int, ...], ...]:
    """All invertible n x n matrices as row tuples (practical for n <= 4)."""
    if n > 4:
        raise ValueError("exhaustive enumeration capped at n = 4")
    total = 1 << (n * n)
    vals = np.arange(total, dtype=np.uint64)
    cands = np.empty((total, n), dtype=np.uint64)
    mask = (1 << n) - 1
    for j in range(n):
        cands[:, j] = (vals >> np.uint64(j * n)) & np.uint64(mask)
    keys = np.empty(total, dtype=np.uint64)
    cnt = _kernels.invertible_key_scan(cands, n, keys)
    out = []
    for key in keys[:cnt]:
        k = int(key)
        out.append(tuple((k >> (j * n)) & mask for j in range(n)))
    return tuple(out)


@lru_cache(maxsize=None)
def enumerate_full_row_rank(rows: int, cols: int) -> tuple[tuple[int, ...], ...]:
    if rows * cols > 16:
        raise ValueError("exhaustive enumeration capped at 16 matrix bits")
    out = []
    for v in range(1 << (rows * cols)):
        mask = (1 << cols) - 1
        rt = tuple((v >> (j * cols)) & mask for j in range(rows))
        if rank(BitMatrix(rows, cols, rt)) == rows:
            out.append(rt)
    return tuple(out)


def _spectrum_check(params: HardParams) -> tuple[Dyadic, bool]:
    """Forrelation of the materialized pair and bentness of the f side."""
    f, g = materialize(params)
    spectrum = wht(f)
    total = int(np.dot(spectrum.coeffs, g.signs_array()))
    forr = Dyadic(total, 3 * params.n // 2)
    bent = bool(np.all(np.abs(spectrum.coeffs) == 1 << (params.n // 2)))
    return forr, bent


def _expected_forr(variant: str, label: str, n: int) -> Dyadic:
    if variant == "sketch":
        return Dyadic(1, 0) if label == "yes" else Dyadic(1, n // 2)
    return Dyadic(1, 0) if label == "yes" else Dyadic(-1, 0)


def _applicable_families(n: int) -> list[HFamilySpec]:
    m = n // 2
    fams = [HFamilySpec("uniform", m), HFamilySpec("prf", m)]
    if m <= 20:
        fams.append(HFamilySpec("table", m))
    fams.append(HFamilySpec("poly", m, min(2, m)))
    return fams


def verify_extremality(
    n: int,
    mode: str = "sampled",
    samples: int = 10_000,
    seed: int = 0,
    variant: str = "standard",
    check_bent: bool = True,
) -> VerifyReport:
    """Every instance must hit its exact forrelation value, zero tolerance."""
    failures = 0
    bent_failures = 0
    checked = 0
    first_bad: dict | None = None

    if mode == "exhaustive":
        if n != 2:
            raise ValueError("exhaustive extremality enumerates h; only n = 2")
        for rows in enumerate_invertible(2):
            a_mat = BitMatrix(2, 2, rows)
            for a_bits in range(4):
                if variant in ("sketch", "naive") and a_bits != 0:
                    continue
                mats = hard_matrices_from(a_mat, BitVector(2, a_bits))
                for h_bits in range(4):
                    for label in ("yes", "no"):
                        params = HardParams(mats, TableH(1, h_bits), variant, label)
                        forr, bent = _spectrum_check(params)
                        checked += 1
                        if forr != _expected_forr(variant, label, n):
                            failures += 1
                            if first_bad is None:
                                first_bad = params_to_json(params)
                        if check_bent and label == "yes" and not bent:
                            bent_failures += 1
    else:
        rng = random.Random(derive_seed(seed, f"extremality:{variant}:{n}"))
        fams = _applicable_families(n)
        for i in range(samples):
            label = "yes" if i % 2 == 0 else "no"
            params = sample_params(n, variant, fams[i % len(fams)], label, rng)
            forr, bent = _spectrum_check(params)
            checked += 1
            if forr != _expected_forr(variant, label, n):
                failures += 1
                if first_bad is None:
                    first_bad = params_to_json(params)
            if check_bent and label == "yes" and not bent:
                bent_failures += 1

    passed = failures == 0 and bent_failures == 0
    details = {"checked": checked, "failures": failures, "bent_failures": bent_failures}
    if first_bad is not None:
        details["counterexample"] = first_bad
    return VerifyReport(
        lemma="extremality" if variant != "sketch" else "sketch-values",
        n=n,
        mode=mode,
        expected="exact forrelation per label, bent yes-instances",
        observed=f"{failures} value failures, {bent_failures} bent failures in {checked}",
        passed=passed,
        details=details,
    )


def verify_marginal_uniformity(n: int) -> VerifyReport:
    """Half-matrix marginals are exactly flat on full-row-rank matrices."""
    if n not in (2, 4):
        raise ValueError("marginal uniformity is exhaustive-only; n in {2, 4}")
    half = n // 2
    inv = enumerate_invertible(n)
    frr = set(enumerate_full_row_rank(half, n))
    upper_hist: dict[tuple[int, ...], int] = {}
    lower_hist: dict[tuple[int, ...], int] = {}
    for rows in inv:
        up, lo = rows[:half], rows[half:]
        upper_hist[up] = upper_hist.get(up, 0) + 1
        lower_hist[lo] = lower_hist.get(lo, 0) + 1

    expected_count = len(inv) // len(frr)
    flat = True
    for hist in (upper_hist, lower_hist):
        if set(hist) != frr:
            flat = False
            break
        if any(c != expected_count for c in hist.values()):
            flat = False
            break

    # exact total variation distance to the fully uniform marginal
    total_halves = 1 << (half * n)
    tvd = Fraction(total_halves - len(frr), total_halves)
    tvd_bound = Fraction(half, 1 << half)
    passed = flat and tvd <= tvd_bound

    return VerifyReport(
        lemma="marginal-uniformity",
        n=n,
        mode="exhaustive",
        expected=f"every full-row-rank half appears exactly {expected_count} times; "
        f"tvd <= {tvd_bound}",
        observed=f"flat={flat}, support={len(upper_hist)}/{len(frr)}, tvd={tvd}",
        passed=passed,
        details={
            "invertible": len(inv),
            "full_row_rank": len(frr),
            "count_per_matrix": expected_count,
            "tvd": str(tvd),
            "tvd_bound": str(tvd_bound),
        },
    )


def verify_row_rank_fraction(
    n: int, mode: str = "exhaustive", samples: int = 1_000_000, seed: int = 0
) -> VerifyReport:
    """Full-row-rank fraction of uniform n/2 x n matrices: formula and bound."""
    half = n // 2
    numer = full_row_rank_count_formula(half, n)
    total = 1 << (half * n)
    exact = Fraction(numer, total)
    bound = 1 - Fraction(half, 1 << half)
    details: dict = {"formula_fraction": str(exact), "lower_bound": str(bound)}

    if mode == "exhaustive":
        if n not in (2, 4):
            raise ValueError("exhaustive row-rank check only for n in {2, 4}")
        observed_count = len(enumerate_full_row_rank(half, n))
        passed = observed_count == numer and exact >= bound
        observed = f"count {observed_count}/{total}"
        details["count"] = observed_count
    else:
        rng = np.random.default_rng(derive_seed(seed, f"rowrank:{n}"))
        cands = rng.integers(0, 1 << n, size=(samples, half), dtype=np.uint64)
        hits = _kernels.full_row_rank_count(cands, n)
        p_hat = hits / samples
        p = float(exact)
        sigma = (p * (1 - p) / samples) ** 0.5
        z = abs(p_hat - p) / sigma
        passed = z <= 3.0 and exact >= bound
        observed = f"fraction {p_hat:.6f} (z = {z:.2f})"
        details.update({"samples": samples, "hits": hits, "z": z})

    return VerifyReport(
        lemma="row-rank",
        n=n,
        mode=mode,
        expected=f"fraction {exact} >= {bound}",
        observed=observed,
        passed=passed,
        details=details,
    )


def default_collision_pairs(n: int, count: int = 10, seed: int = 0) -> list[tuple[int, int]]:
    """Fixed (x, y) probe pairs including the zero-vector corners."""
    rng = random.Random(derive_seed(seed, f"pairs:{n}"))
    pairs = [(0, 0), (0, 1), (1, 0), (1, (1 << n) - 1)]
    while len(pairs) < count:
        cand = (rng.getrandbits(n), rng.getrandbits(n))
        if cand not in pairs:
            pairs.append(cand)
    return pairs[:count]


def verify_collision_lemma(
    n: int,
    pairs: list[tuple[int, int]] | None = None,
    mode: str = "exhaustive",
    samples: int = 1_000_000,
    seed: int = 0,
) -> VerifyReport:
    """Pr[A2 x = B1 y + B1 a] is exactly 2^{-n/2} for every fixed (x, y)."""
    half = n // 2
    target = Fraction(1, 1 << half)
    if pairs is None:
        pairs = default_collision_pairs(n, 10 if mode == "exhaustive" else 2, seed)

    if mode == "exhaustive":
        if n not in (2, 4):
            raise ValueError("exhaustive collision check only for n in {2, 4}")
        inv = enumerate_invertible(n)
        denom = len(inv) * (1 << n)
        collisions = [0] * len(pairs)
        xvs = [BitVector(n, x) for x, _ in pairs]
        yvs = [BitVector(n, y) for _, y in pairs]
        for rows in inv:
            a_mat = BitMatrix(n, n, rows)
            b1 = invert(a_mat.transpose()).upper_half()
            lower = a_mat.lower_half()
            hist: dict[int, int] = {}
            for a_bits in range(1 << n):
                v = mat_vec(b1, BitVector(n, a_bits)).bits
                hist[v] = hist.get(v, 0) + 1
            for i in range(len(pairs)):
                want = mat_vec(lower, xvs[i]).bits ^ mat_vec(b1, yvs[i]).bits
                collisions[i] += hist.get(want, 0)
        passed = True
        worst: tuple | None = None
        per_pair = []
        for (x, y), c in zip(pairs, collisions):
            frac = Fraction(c, denom)
            per_pair.append({"x": x, "y": y, "fraction": str(frac)})
            if frac != target:
                passed = False
                worst = (x, y, str(frac))
        observed = f"{len(pairs)} pairs all exactly {target}" if passed else f"mismatch {worst}"
        details = {"pairs": per_pair, "settings_per_pair": denom}
    else:
        passed = True
        per_pair = []
        worst_z = 0.0
        for idx, (x, y) in enumerate(pairs):
            done = cross = 0
            rng = np.random.default_rng(derive_seed(seed, f"collision:{n}:{idx}"))
            while done < samples:
                want = samples - done
                batch = max(10_000, int(want * 3.8) + 128)
                cands = rng.integers(0, 1 << n, size=(batch, n), dtype=np.uint64)
                avals = rng.integers(0, 1 << n, size=want, dtype=np.uint64)
                d, c, _, _, _ = _kernels.hard_sample_scan(
                    cands, avals, np.uint64(x), np.uint64(y),
                    np.uint64(0), np.uint64(0), n, want,
                )
                done += d
                cross += c
            p = float(target)
            sigma = (p * (1 - p) / samples) ** 0.5
            z = abs(cross / samples - p) / sigma
            worst_z = max(worst_z, z)
            per_pair.append({"x": x, "y": y, "fraction": cross / samples, "z": z})
            if z > 3.0:
                passed = False
        observed = f"worst z = {worst_z:.2f} over {len(pairs)} pairs"
        details = {"pairs": per_pair, "samples": samples}

    return VerifyReport(
        lemma="collision",
        n=n,
        mode=mode,
        expected=f"collision probability exactly {target}",
        observed=observed,
        passed=passed,
        details=details,
    )


def verify_pairwise_collisions(
    n: int,
    mode: str = "exhaustive",
    samples: int = 1_000_000,
    seed: int = 0,
    diffs: list[int] | None = None,
) -> VerifyReport:
    """Same-side collisions: Pr[A2 d = 0], Pr[B1 d = 0] <= (n/2 + 1) 2^{-n/2}."""
    half = n // 2
    bound = Fraction(half + 1, 1 << half)

    if mode == "exhaustive":
        if n not in (2, 4):
            raise ValueError("exhaustive pairwise check only for n in {2, 4}")
        inv = enumerate_invertible(n)
        a2_zero = {d: 0 for d in range(1, 1 << n)}
        b1_zero = {d: 0 for d in range(1, 1 << n)}
        for rows in inv:
            a_mat = BitMatrix(n, n, rows)
            b_mat = invert(a_mat.transpose())
            lower = a_mat.lower_half()
            upper = b_mat.upper_half()
            for d in range(1, 1 << n):
                dv = BitVector(n, d)
                if mat_vec(lower, dv).bits == 0:
                    a2_zero[d] += 1
                if mat_vec(upper, dv).bits == 0:
                    b1_zero[d] += 1
        worst = max(
            max(a2_zero.values(), default=0), max(b1_zero.values(), default=0)
        )
        worst_frac = Fraction(worst, len(inv))
        passed = worst_frac <= bound
        observed = f"worst probability {worst_frac} over all {(1 << n) - 1} difference classes"
        details = {
            "classes": (1 << n) - 1,
            "worst_fraction": str(worst_frac),
            "invertible": len(inv),
        }
    else:
        if diffs is None:
            rng0 = random.Random(derive_seed(seed, f"pairwise:{n}"))
            diffs = [rng0.getrandbits(n) | 1, rng0.getrandbits(n) | 1]
        passed = True
        rows_out = []
        for idx, d in enumerate(diffs):
            rng = np.random.default_rng(derive_seed(seed, f"pairwise:{n}:{idx}"))
            done = a2z = b1z = 0
            while done < samples:
                want = samples - done
                batch = max(10_000, int(want * 3.8) + 128)
                cands = rng.integers(0, 1 << n, size=(batch, n), dtype=np.uint64)
                avals = rng.integers(0, 1 << n, size=want, dtype=np.uint64)
                got, _, az, bz, _ = _kernels.hard_sample_scan(
                    cands, avals, np.uint64(0), np.uint64(0),
                    np.uint64(d), np.uint64(d), n, want,
                )
                done += got
                a2z += az
                b1z += bz
            p_bound = float(bound)
            sigma = (p_bound * (1 - p_bound) / samples) ** 0.5
            limit = p_bound + 3 * sigma
            ok = a2z / samples <= limit and b1z / samples <= limit
            passed = passed and ok
            rows_out.append({"d": d, "a2": a2z / samples, "b1": b1z / samples})
        observed = f"{len(diffs)} difference classes sampled"
        details = {"diffs": rows_out, "samples": samples}

    return VerifyReport(
        lemma="pairwise",
        n=n,
        mode=mode,
        expected=f"probability <= {bound}",
        observed=observed,
        passed=passed,
        details=details,
    )


def _implicit_inputs(params: HardParams, xs: list[int], ys: list[int]) -> list[int]:
    d = params._derived
    ins = [_apply_rows(d["a2"], x) for x in xs]
    ins += [_apply_rows(d["b1"], y) ^ d["b1a"] for y in ys]
    return ins


def verify_conditional_uniformity(
    n: int,
    xs: list[int] | None = None,
    ys: list[int] | None = None,
    trials: int = 100_000,
    seed: int = 0,
    mode: str = "sampled",
) -> VerifyReport:
    """Conditioned on distinct implicit h-inputs, outcomes are uniform bits.

    Uses the explicit-table family so h really is uniform.  The sampled
    mode chi-square tests the 2^l outcome patterns; the exhaustive mode
    (n = 2) checks the counts are exactly flat.
    """
    if xs is None or ys is None:
        if n == 2:
            xs, ys = [1], [2]
        else:
            xs, ys = [1, 2], [3, 4]
    ell = len(xs) + len(ys)
    not_e_bound = min(1.0, 3.0 * ell * ell * n * 2 ** (-n / 2))

    patterns = [0] * (1 << ell)
    not_e = 0
    total = 0

    def record(params: HardParams) -> None:
        nonlocal not_e, total
        total += 1
        ins = _implicit_inputs(params, xs, ys)
        if len(set(ins)) != ell:
            not_e += 1
            return
        bits = 0
        pos = 0
        for x in xs:
            bits |= _f_bit(params, x) << pos
            pos += 1
        for y in ys:
            bits |= _g_bit(params, y) << pos
            pos += 1
        patterns[bits] += 1

    if mode == "exhaustive":
        if n != 2:
            raise ValueError("exhaustive conditional check only for n = 2")
        for rows in enumerate_invertible(2):
            a_mat = BitMatrix(2, 2, rows)
            for a_bits in range(4):
                mats = hard_matrices_from(a_mat, BitVector(2, a_bits))
                for h_bits in range(1 << (1 << (n // 2))):
                    record(HardParams(mats, TableH(n // 2, h_bits), "standard", "yes"))
        kept = sum(patterns)
        flat = len(set(patterns)) == 1 if kept else False
        passed = flat and not_e / total <= not_e_bound
        observed = f"patterns {patterns}, not-E {not_e}/{total}"
        details = {"patterns": patterns, "not_e": not_e, "total": total}
    else:
        rng = random.Random(derive_seed(seed, f"conditional:{n}"))
        m = n // 2
        for _ in range(trials):
            mats = sample_hard_matrices(n, rng)
            record(HardParams(mats, TableH(m, rng.getrandbits(1 << m)), "standard", "yes"))
        kept = sum(patterns)
        stat, critical, chi_ok = chi_square_uniform(patterns)
        not_e_freq = not_e / total
        passed = chi_ok and not_e_freq <= not_e_bound
        observed = (
            f"chi2 {stat:.1f} (critical {critical:.1f}), "
            f"not-E {not_e_freq:.4f} <= {not_e_bound:.4f}"
        )
        details = {
            "patterns": patterns,
            "kept": kept,
            "chi2": stat,
            "critical": critical,
            "not_e_frequency": not_e_freq,
            "not_e_bound": not_e_bound,
        }

    return VerifyReport(
        lemma="conditional",
        n=n,
        mode=mode,
        expected=f"uniform over {1 << ell} patterns given distinct h-inputs",
        observed=observed,
        passed=passed,
        details=details,
    )


def run_all(
    n: int,
    mode: str = "exhaustive",
    seed: int = 0,
    samples: int = 10_000,
    trials: int = 100_000,
) -> list[VerifyReport]:
    """Run every applicable verifier at one arity; used by the CLI."""
    reports = []
    if mode == "exhaustive":
        if n == 2:
            reports.append(verify_extremality(2, "exhaustive"))
            reports.append(verify_extremality(2, "exhaustive", variant="sketch"))
            reports.append(verify_conditional_uniformity(2, mode="exhaustive"))
        else:
            reports.append(verify_extremality(n, "sampled", samples, seed))
            reports.append(
                verify_extremality(n, "sampled", samples, seed, variant="sketch")
            )
        if n in (2, 4):
            reports.append(verify_marginal_uniformity(n))
            reports.append(verify_row_rank_fraction(n, "exhaustive"))
            reports.append(verify_collision_lemma(n, mode="exhaustive", seed=seed))
            reports.append(verify_pairwise_collisions(n, mode="exhaustive"))
    else:
        reports.append(verify_extremality(n, "sampled", samples, seed))
        reports.append(verify_extremality(n, "sampled", samples, seed, variant="sketch"))
        reports.append(verify_row_rank_fraction(n, "sampled", max(samples, 100_000), seed))
        reports.append(verify_collision_lemma(n, mode="sampled", samples=max(samples, 100_000), seed=seed))
        reports.append(verify_pairwise_collisions(n, mode="sampled", samples=max(samples, 100_000), seed=seed))
        reports.append(verify_conditional_uniformity(n, trials=trials, seed=seed))
    return reports
