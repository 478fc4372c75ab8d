"""Samplers and oracles for the extremal forrelation instance families.

An instance is a pair of n-bit functions built from an invertible matrix A,
its inverse-transpose B, an affine shift a (with derived shift b), and a
function h on n/2 bits:

    standard   f(x) = <A1x, A2x> + <x, a> + h(A2 x)
               g(y) = <B1y, B2y> + <y, b> + h(B1 y + B1 a) + <B1 a, B2 a>
               label "no" flips the sign of g only.
    sketch     drops the affine shift; label "yes" keeps the inner-product
               masking (forrelation exactly 1), label "no" keeps only the
               h terms (forrelation exactly 2^{-n/2}).
    naive      standard with a = b = 0; still extremal, but the matching
               f(0), g(0) answers leak the label to a two-query probe.

Oracles answer point queries lazily in O(n^2 / wordsize) time, so instances
at n = 64 and beyond need no table materialization.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .boolfun import TruthTable, _check_arity
from .f2linalg import (
    BitMatrix,
    BitVector,
    HardMatrices,
    hard_matrices_from,
    mat_vec,
    sample_hard_matrices,
    sample_invertible,
)
from .seeds import MASK64, splitmix64

VARIANTS = ("standard", "sketch", "naive")
LABELS = ("yes", "no")
H_KINDS = ("uniform", "table", "poly", "prf")

POLY_MONOMIAL_CAP = 1 << 20


class BudgetExceededError(RuntimeError):
    """A strategy queried an oracle past its query budget."""


def _splitmix64_np(x: np.ndarray) -> np.ndarray:
    x = x + np.uint64(0x9E3779B97F4A7C15)
    x = (x ^ (x >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    x = (x ^ (x >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return x ^ (x >> np.uint64(31))


def _parity(vals: np.ndarray) -> np.ndarray:
    return (np.bitwise_count(vals) & np.uint64(1)).astype(np.uint64)


class KeyedMixerH:
    """Keyed 64-bit mixer: h(u) = bit 0 of splitmix64(key XOR splitmix64(u)).

    Bit-exact across implementations; stands in for a uniformly random h in
    lazy mode (kind "uniform") and for a keyed pseudorandom family (kind
    "prf").  Cryptographic strength is explicitly not a goal.
    """

    def __init__(self, kind: str, m: int, key: int):
        if kind not in ("uniform", "prf"):
            raise ValueError(kind)
        self.kind = kind
        self.m = m
        self.key = key & MASK64

    def __call__(self, u: int) -> int:
        return splitmix64(self.key ^ splitmix64(u)) & 1

    def eval_all(self, us: np.ndarray) -> np.ndarray:
        mixed = _splitmix64_np(np.uint64(self.key) ^ _splitmix64_np(us))
        return (mixed & np.uint64(1)).astype(np.uint64)

    def to_json(self) -> dict:
        field_name = "seed" if self.kind == "uniform" else "key"
        return {"kind": self.kind, field_name: self.key}


class TableH:
    """Explicit truth table of h; the only mode with genuinely uniform h."""

    def __init__(self, m: int, table_bits: int):
        if table_bits < 0 or table_bits >> (1 << m):
            raise ValueError("table bits outside 2^m entries")
        self.kind = "table"
        self.m = m
        self.table_bits = table_bits

    def __call__(self, u: int) -> int:
        return (self.table_bits >> u) & 1

    @cached_property
    def _bits_array(self) -> np.ndarray:
        size = 1 << self.m
        raw = self.table_bits.to_bytes((size + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return bits[:size].astype(np.uint64)

    def eval_all(self, us: np.ndarray) -> np.ndarray:
        return self._bits_array[us.astype(np.int64)]

    def to_json(self) -> dict:
        width = max(1, ((1 << self.m) + 3) // 4)
        return {"kind": "table", "table": format(self.table_bits, f"0{width}x")}


class PolyH:
    """Random F2 polynomial of degree <= d: XOR of the stored monomials."""

    def __init__(self, m: int, degree: int, monomials: tuple[int, ...]):
        self.kind = "poly"
        self.m = m
        self.degree = degree
        self.monomials = monomials

    def __call__(self, u: int) -> int:
        acc = 0
        for mask in self.monomials:
            if mask & u == mask:
                acc ^= 1
        return acc

    def eval_all(self, us: np.ndarray) -> np.ndarray:
        acc = np.zeros_like(us)
        for mask in self.monomials:
            m64 = np.uint64(mask)
            acc ^= ((us & m64) == m64).astype(np.uint64)
        return acc

    def to_json(self) -> dict:
        return {"kind": "poly", "degree": self.degree, "coeffs": list(self.monomials)}


@dataclass(frozen=True)
class HFamilySpec:
    """Which family h is drawn from: kind, input arity m = n/2, poly degree."""

    kind: str
    m: int
    degree: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in H_KINDS:
            raise ValueError(f"unknown h family {self.kind!r}")
        if self.kind == "poly":
            if self.degree is None or not 0 <= self.degree <= self.m:
                raise ValueError("poly degree must satisfy 0 <= d <= m")
            count = sum(math.comb(self.m, k) for k in range(self.degree + 1))
            if count > POLY_MONOMIAL_CAP:
                raise ValueError("too many monomials for the poly family")
        elif self.degree is not None:
            raise ValueError("degree only applies to the poly family")
        if self.kind == "table" and self.m > 26:
            raise ValueError("explicit h table too large")

    def sample(self, rng: random.Random):
        if self.kind == "uniform":
            return KeyedMixerH("uniform", self.m, rng.getrandbits(64))
        if self.kind == "prf":
            return KeyedMixerH("prf", self.m, rng.getrandbits(64))
        if self.kind == "table":
            return TableH(self.m, rng.getrandbits(1 << self.m))
        monomials = []
        for k in range(self.degree + 1):
            for combo in itertools.combinations(range(self.m), k):
                if rng.getrandbits(1):
                    mask = 0
                    for i in combo:
                        mask |= 1 << i
                    monomials.append(mask)
        return PolyH(self.m, self.degree, tuple(monomials))

    @classmethod
    def parse(cls, text: str, m: int) -> HFamilySpec:
        """Parse a CLI family string: uniform | table | poly:d | prf."""
        if text.startswith("poly:"):
            return cls("poly", m, int(text.split(":", 1)[1]))
        return cls(text, m)


def h_from_json(obj: dict, m: int):
    kind = obj["kind"]
    if kind == "uniform":
        return KeyedMixerH("uniform", m, int(obj["seed"]))
    if kind == "prf":
        return KeyedMixerH("prf", m, int(obj["key"]))
    if kind == "table":
        return TableH(m, int(obj["table"], 16))
    if kind == "poly":
        return PolyH(m, int(obj["degree"]), tuple(int(c) for c in obj["coeffs"]))
    raise ValueError(f"unknown h kind {kind!r}")


@dataclass(frozen=True)
class HardParams:
    """A fully sampled instance: matrices, h, construction variant, label."""

    matrices: HardMatrices
    h: object
    variant: str
    label: str

    def __post_init__(self) -> None:
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")
        n = self.matrices.n
        if n % 2:
            raise ValueError("arity must be even")
        if self.h.m != n // 2:
            raise ValueError("h arity must be n/2")
        if self.variant in ("sketch", "naive") and self.matrices.a.bits != 0:
            raise ValueError(f"{self.variant} variant requires a = 0")

    @property
    def n(self) -> int:
        return self.matrices.n

    @cached_property
    def _derived(self) -> dict:
        mats = self.matrices
        a1 = mats.A.upper_half().row_bits
        a2 = mats.A.lower_half().row_bits
        b1 = mats.B.upper_half().row_bits
        b2 = mats.B.lower_half().row_bits
        b1a = mat_vec(mats.B.upper_half(), mats.a).bits
        b2a = mat_vec(mats.B.lower_half(), mats.a).bits
        return {
            "a1": a1,
            "a2": a2,
            "b1": b1,
            "b2": b2,
            "a_bits": mats.a.bits,
            "b_bits": mats.b.bits,
            "b1a": b1a,
            "base_bit": (b1a & b2a).bit_count() & 1,
        }


def _apply_rows(rows: tuple[int, ...], x: int) -> int:
    out = 0
    for i, r in enumerate(rows):
        out |= ((r & x).bit_count() & 1) << i
    return out


def _f_bit(p: HardParams, x: int) -> int:
    d = p._derived
    u2 = _apply_rows(d["a2"], x)
    if p.variant == "sketch" and p.label == "no":
        return p.h(u2)
    u1 = _apply_rows(d["a1"], x)
    bit = ((u1 & u2).bit_count() & 1) ^ p.h(u2)
    if p.variant == "standard":
        bit ^= (d["a_bits"] & x).bit_count() & 1
    return bit


def _g_bit(p: HardParams, y: int) -> int:
    d = p._derived
    v1 = _apply_rows(d["b1"], y)
    if p.variant == "sketch":
        if p.label == "no":
            return p.h(v1)
        v2 = _apply_rows(d["b2"], y)
        return ((v1 & v2).bit_count() & 1) ^ p.h(v1)
    v2 = _apply_rows(d["b2"], y)
    bit = ((v1 & v2).bit_count() & 1) ^ p.h(v1 ^ d["b1a"]) ^ d["base_bit"]
    bit ^= (d["b_bits"] & y).bit_count() & 1
    if p.label == "no":
        bit ^= 1
    return bit


def eval_f(p: HardParams, x: BitVector) -> int:
    """Value of the first oracle at x, in {+1, -1}."""
    if x.n != p.n:
        raise ValueError("dimension mismatch")
    return -1 if _f_bit(p, x.bits) else 1


def eval_g(p: HardParams, y: BitVector) -> int:
    """Value of the second oracle at y, in {+1, -1}."""
    if y.n != p.n:
        raise ValueError("dimension mismatch")
    return -1 if _g_bit(p, y.bits) else 1


def _apply_rows_all(rows: tuple[int, ...], xs: np.ndarray) -> np.ndarray:
    out = np.zeros_like(xs)
    for i, r in enumerate(rows):
        out |= _parity(xs & np.uint64(r)) << np.uint64(i)
    return out


def materialize(p: HardParams, cap: int | None = None) -> tuple[TruthTable, TruthTable]:
    """Explicit truth tables for both oracles, vectorized over all 2^n points."""
    _check_arity(p.n, cap)
    d = p._derived
    xs = np.arange(1 << p.n, dtype=np.uint64)

    u2 = _apply_rows_all(d["a2"], xs)
    v1 = _apply_rows_all(d["b1"], xs)
    if p.variant == "sketch":
        hf = p.h.eval_all(u2)
        hg = p.h.eval_all(v1)
        if p.label == "no":
            f_bits, g_bits = hf, hg
        else:
            u1 = _apply_rows_all(d["a1"], xs)
            v2 = _apply_rows_all(d["b2"], xs)
            f_bits = _parity(u1 & u2) ^ hf
            g_bits = _parity(v1 & v2) ^ hg
    else:
        u1 = _apply_rows_all(d["a1"], xs)
        v2 = _apply_rows_all(d["b2"], xs)
        f_bits = _parity(u1 & u2) ^ p.h.eval_all(u2)
        g_bits = _parity(v1 & v2) ^ p.h.eval_all(v1 ^ np.uint64(d["b1a"]))
        if p.variant == "standard":
            f_bits ^= _parity(xs & np.uint64(d["a_bits"]))
            g_bits ^= _parity(xs & np.uint64(d["b_bits"]))
        if d["base_bit"]:
            g_bits ^= np.uint64(1)
        if p.label == "no":
            g_bits ^= np.uint64(1)

    def pack(bits: np.ndarray) -> TruthTable:
        packed = np.packbits(bits.astype(np.uint8), bitorder="little").tobytes()
        return TruthTable(p.n, int.from_bytes(packed, "little"))

    return pack(f_bits), pack(g_bits)


@dataclass
class Oracle:
    """Query access to one sampled instance, with query accounting.

    Counters only increase; answers are deterministic.  When ``limit`` is
    set, any query past the budget raises BudgetExceededError.  Cloning
    resets the counters.
    """

    params: HardParams
    limit: int | None = None
    queries_f: int = field(default=0)
    queries_g: int = field(default=0)

    @property
    def n(self) -> int:
        return self.params.n

    def _charge(self) -> None:
        if self.limit is not None and self.queries_f + self.queries_g >= self.limit:
            raise BudgetExceededError(f"query budget {self.limit} exhausted")

    def query_f(self, x: BitVector) -> int:
        self._charge()
        self.queries_f += 1
        return eval_f(self.params, x)

    def query_g(self, y: BitVector) -> int:
        self._charge()
        self.queries_g += 1
        return eval_g(self.params, y)

    @property
    def total_queries(self) -> int:
        return self.queries_f + self.queries_g

    def clone(self) -> Oracle:
        return Oracle(self.params, self.limit)


def sample_params(
    n: int,
    variant: str,
    family: HFamilySpec,
    label: str,
    rng: random.Random,
) -> HardParams:
    """Draw matrices and h for one labeled instance."""
    if n % 2 or n < 2:
        raise ValueError("arity must be even and >= 2")
    if family.m != n // 2:
        raise ValueError("h family arity must be n/2")
    if variant == "standard":
        mats = sample_hard_matrices(n, rng)
    elif variant in ("sketch", "naive"):
        mats = hard_matrices_from(sample_invertible(n, rng), BitVector.zero(n))
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return HardParams(mats, family.sample(rng), variant, label)


def sample_instance(
    n: int,
    variant: str,
    family: HFamilySpec,
    label: str,
    rng: random.Random,
    limit: int | None = None,
) -> Oracle:
    return Oracle(sample_params(n, variant, family, label, rng), limit)


def params_to_json(p: HardParams) -> dict:
    """Instance parameter file; B and b are recomputed on load, not stored."""
    return {
        "schema": 1,
        "n": p.n,
        "variant": p.variant,
        "label": p.label,
        "A": p.matrices.A.to_json()["data"],
        "a": p.matrices.a.to_hex(),
        "h": p.h.to_json(),
    }


def params_from_json(obj: dict) -> HardParams:
    n = int(obj["n"])
    a_mat = BitMatrix(n, n, tuple(int(r, 16) for r in obj["A"]))
    a_vec = BitVector.from_hex(n, obj["a"])
    mats = hard_matrices_from(a_mat, a_vec)
    return HardParams(mats, h_from_json(obj["h"], n // 2), obj["variant"], obj["label"])
