"""Truth tables of +-1 valued Boolean functions and their exact transforms.

All spectral arithmetic is integer-only: the spectrum keeps the unnormalized
coefficients 2^n * fhat(y), and forrelation values come out as exact dyadic
rationals.  Nothing here touches floating point, so +-1 results really are
+-1 and not 0.999...
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

# Explicit tables above this arity would need >0.5 GiB of i64 scratch per
# transform; callers may override per call.
DEFAULT_ARITY_CAP = 26


def _check_arity(n: int, cap: int | None) -> None:
    cap = DEFAULT_ARITY_CAP if cap is None else cap
    if n > cap:
        raise ValueError(f"arity {n} above explicit-table cap {cap}")


@dataclass(frozen=True)
class TruthTable:
    """+-1 valued function of n bits; bit x of ``neg_bits`` set means -1 at x."""

    n: int
    neg_bits: int

    def __post_init__(self) -> None:
        if self.neg_bits < 0 or self.neg_bits >> (1 << self.n):
            raise ValueError("table bits outside 2^n entries")

    @classmethod
    def from_signs(cls, signs) -> TruthTable:
        signs = list(signs)
        size = len(signs)
        n = size.bit_length() - 1
        if 1 << n != size:
            raise ValueError("table length must be a power of two")
        bits = 0
        for i, s in enumerate(signs):
            if s == -1:
                bits |= 1 << i
            elif s != 1:
                raise ValueError("signs must be +-1")
        return cls(n, bits)

    @classmethod
    def from_bits(cls, n: int, func_bits: int) -> TruthTable:
        """Build from the 0/1 function bits (bit set means value 1, sign -1)."""
        return cls(n, func_bits)

    def sign(self, x: int) -> int:
        return -1 if (self.neg_bits >> x) & 1 else 1

    def signs_array(self, cap: int | None = None) -> np.ndarray:
        """Expand to an int64 array of +-1 values."""
        _check_arity(self.n, cap)
        size = 1 << self.n
        raw = self.neg_bits.to_bytes((size + 7) // 8, "little")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")
        return 1 - 2 * bits[:size].astype(np.int64)

    @classmethod
    def from_signs_array(cls, arr: np.ndarray) -> TruthTable:
        size = arr.size
        n = size.bit_length() - 1
        if 1 << n != size:
            raise ValueError("table length must be a power of two")
        neg = (np.asarray(arr) == -1).astype(np.uint8)
        packed = np.packbits(neg, bitorder="little").tobytes()
        return cls(n, int.from_bytes(packed, "little"))

    def negate(self) -> TruthTable:
        return TruthTable(self.n, self.neg_bits ^ ((1 << (1 << self.n)) - 1))

    def to_file_text(self) -> str:
        """Two-line text form: arity header plus hex digits, bit=1 meaning -1."""
        if self.n < 2:
            raise ValueError("file form needs arity >= 2")
        width = (1 << self.n) // 4
        return f"n={self.n}\n{format(self.neg_bits, f'0{width}x')}\n"

    @classmethod
    def from_file_text(cls, text: str) -> TruthTable:
        lines = text.strip().splitlines()
        if len(lines) != 2 or not lines[0].startswith("n="):
            raise ValueError("bad truth-table file")
        n = int(lines[0][2:])
        digits = lines[1].strip()
        if len(digits) != (1 << n) // 4:
            raise ValueError("hex digit count does not match arity")
        return cls(n, int(digits, 16))


@dataclass(frozen=True)
class Spectrum:
    """Unnormalized Walsh-Hadamard coefficients: coeffs[y] = 2^n * fhat(y)."""

    n: int
    coeffs: np.ndarray

    def parseval_ok(self) -> bool:
        return int(np.dot(self.coeffs, self.coeffs)) == 1 << (2 * self.n)


@dataclass(frozen=True)
class Dyadic:
    """Exact value num / 2^exp, kept in reduced form (num odd, or 0/2^0)."""

    num: int
    exp: int

    def __post_init__(self) -> None:
        num, exp = self.num, self.exp
        if exp < 0:
            num <<= -exp
            exp = 0
        if num == 0:
            exp = 0
        else:
            while num % 2 == 0 and exp > 0:
                num //= 2
                exp -= 1
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "exp", exp)

    def __float__(self) -> float:
        return self.num / (1 << self.exp)

    def __str__(self) -> str:
        return f"{self.num}/{1 << self.exp}"

    def __eq__(self, other) -> bool:
        if isinstance(other, Dyadic):
            return self.num == other.num and self.exp == other.exp
        if isinstance(other, int):
            return self.exp == 0 and self.num == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.num, self.exp))

    def halve_shifted(self) -> Dyadic:
        """(1 + value) / 2, the acceptance probability of a bias +-value coin."""
        return Dyadic(self.num + (1 << self.exp), self.exp + 1)


def butterfly(values: np.ndarray) -> np.ndarray:
    """Unnormalized Hadamard butterfly on an int64 array of power-of-two size.

    Self-inverse up to the 2^n factor: butterfly(butterfly(v)) == 2^n * v.
    """
    a = np.asarray(values, dtype=np.int64).copy()
    size = a.size
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        top = a[:, 0, :].copy()
        a[:, 0, :] = top + a[:, 1, :]
        a[:, 1, :] = top - a[:, 1, :]
        a = a.reshape(size)
        h *= 2
    return a


def wht(t: TruthTable, cap: int | None = None) -> Spectrum:
    """Integer Walsh-Hadamard transform via the in-place butterfly."""
    _check_arity(t.n, cap)
    return Spectrum(t.n, butterfly(t.signs_array(cap)))


def forrelation(f: TruthTable, g: TruthTable, cap: int | None = None) -> Dyadic:
    """Correlation of g with the Fourier transform of f, exact in [-1, 1].

    Equals 2^{-3n/2} * sum_y coeffs_f[y] * g(y); n must be even so the
    normalization is a power of two.
    """
    if f.n != g.n:
        raise ValueError("arity mismatch")
    if f.n % 2:
        raise ValueError("arity must be even for a dyadic result")
    spectrum = wht(f, cap)
    total = int(np.dot(spectrum.coeffs, g.signs_array(cap)))
    return Dyadic(total, 3 * f.n // 2)


def forrelation_brute(f: TruthTable, g: TruthTable) -> Dyadic:
    """Independent double-sum evaluation, O(4^n); for cross-checks only."""
    if f.n != g.n:
        raise ValueError("arity mismatch")
    if f.n % 2:
        raise ValueError("arity must be even for a dyadic result")
    total = 0
    size = 1 << f.n
    for x in range(size):
        fx = f.sign(x)
        for y in range(size):
            total += fx * g.sign(y) * (-1 if (x & y).bit_count() & 1 else 1)
    return Dyadic(total, 3 * f.n // 2)


def is_bent(t: TruthTable, cap: int | None = None) -> bool:
    """True iff every unnormalized coefficient has magnitude 2^{n/2}."""
    if t.n % 2:
        warnings.warn("bentness needs even arity; returning False", stacklevel=2)
        return False
    target = 1 << (t.n // 2)
    return bool(np.all(np.abs(wht(t, cap).coeffs) == target))


def dual_from_bent(t: TruthTable, cap: int | None = None) -> TruthTable:
    """The unique g with forrelation(f, g) = 1, namely g(y) = coeffs[y] / 2^{n/2}."""
    if t.n % 2:
        raise ValueError("dual needs even arity")
    spectrum = wht(t, cap)
    target = 1 << (t.n // 2)
    if not np.all(np.abs(spectrum.coeffs) == target):
        raise ValueError("input is not bent")
    return TruthTable.from_signs_array(spectrum.coeffs // target)
