"""Bit-packed linear algebra over F2.

Vectors and matrix rows are Python ints used as bitsets: coordinate i of a
vector is bit i, so the truth-table index of x is the integer whose bit i
equals coordinate i.  Coordinates 0..n/2-1 form the first half x1 of a
vector, n/2..n-1 the second half x2.  Matrix halves split by rows: the
upper half is the first rows/2 rows.
"""
from __future__ import annotations

import random
from dataclasses import dataclass


class SingularMatrixError(ValueError):
    """Raised when a matrix that must be invertible is rank deficient."""


def _hex_width(nbits: int) -> int:
    return max(1, (nbits + 3) // 4)


@dataclass(frozen=True)
class BitVector:
    """Vector over F2; bit i of ``bits`` is coordinate i."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("negative dimension")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError("bits outside declared dimension")

    @classmethod
    def from_coords(cls, coords) -> BitVector:
        coords = list(coords)
        bits = 0
        for i, c in enumerate(coords):
            if c & 1:
                bits |= 1 << i
        return cls(len(coords), bits)

    @classmethod
    def zero(cls, n: int) -> BitVector:
        return cls(n, 0)

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __xor__(self, other: BitVector) -> BitVector:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return BitVector(self.n, self.bits ^ other.bits)

    def dot(self, other: BitVector) -> int:
        """Inner product mod 2."""
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return (self.bits & other.bits).bit_count() & 1

    def first_half(self) -> BitVector:
        h = self.n // 2
        return BitVector(h, self.bits & ((1 << h) - 1))

    def second_half(self) -> BitVector:
        h = self.n // 2
        return BitVector(self.n - h, self.bits >> h)

    def to_hex(self) -> str:
        return format(self.bits, f"0{_hex_width(self.n)}x")

    @classmethod
    def from_hex(cls, n: int, text: str) -> BitVector:
        return cls(n, int(text, 16))


@dataclass(frozen=True)
class BitMatrix:
    """Rectangular matrix over F2, stored as one int bitset per row."""

    rows: int
    cols: int
    row_bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.row_bits) != self.rows:
            raise ValueError("row count mismatch")
        mask = (1 << self.cols) - 1
        for r in self.row_bits:
            if r < 0 or r & ~mask:
                raise ValueError("row exceeds declared column count")

    @classmethod
    def from_rows(cls, rows_as_lists) -> BitMatrix:
        rows = [BitVector.from_coords(r) for r in rows_as_lists]
        cols = rows[0].n if rows else 0
        return cls(len(rows), cols, tuple(r.bits for r in rows))

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols, (0,) * rows)

    def entry(self, i: int, j: int) -> int:
        return (self.row_bits[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.row_bits[i])

    def upper_half(self) -> BitMatrix:
        if self.rows % 2:
            raise ValueError("odd row count has no half split")
        h = self.rows // 2
        return BitMatrix(h, self.cols, self.row_bits[:h])

    def lower_half(self) -> BitMatrix:
        if self.rows % 2:
            raise ValueError("odd row count has no half split")
        h = self.rows // 2
        return BitMatrix(h, self.cols, self.row_bits[h:])

    def transpose(self) -> BitMatrix:
        out = []
        for j in range(self.cols):
            bits = 0
            for i in range(self.rows):
                bits |= ((self.row_bits[i] >> j) & 1) << i
            out.append(bits)
        return BitMatrix(self.cols, self.rows, tuple(out))

    def to_json(self) -> dict:
        w = _hex_width(self.cols)
        return {
            "rows": self.rows,
            "cols": self.cols,
            "data": [format(r, f"0{w}x") for r in self.row_bits],
        }

    @classmethod
    def from_json(cls, obj: dict) -> BitMatrix:
        return cls(obj["rows"], obj["cols"], tuple(int(h, 16) for h in obj["data"]))


def vstack(top: BitMatrix, bottom: BitMatrix) -> BitMatrix:
    if top.cols != bottom.cols:
        raise ValueError("column mismatch")
    return BitMatrix(top.rows + bottom.rows, top.cols, top.row_bits + bottom.row_bits)


def mat_vec(m: BitMatrix, v: BitVector) -> BitVector:
    """Matrix-vector product; output coordinate i is parity(row_i AND v)."""
    if m.cols != v.n:
        raise ValueError(f"dimension mismatch: {m.rows}x{m.cols} @ {v.n}")
    bits = 0
    vb = v.bits
    for i, r in enumerate(m.row_bits):
        bits |= ((r & vb).bit_count() & 1) << i
    return BitVector(m.rows, bits)


def mat_mat(lhs: BitMatrix, rhs: BitMatrix) -> BitMatrix:
    if lhs.cols != rhs.rows:
        raise ValueError("dimension mismatch")
    rt = rhs.transpose()
    out = []
    for r in lhs.row_bits:
        bits = 0
        for j, c in enumerate(rt.row_bits):
            bits |= ((r & c).bit_count() & 1) << j
        out.append(bits)
    return BitMatrix(lhs.rows, rhs.cols, tuple(out))


def rank(m: BitMatrix) -> int:
    """Row rank via Gaussian elimination on a scratch copy."""
    work = list(m.row_bits)
    rk = 0
    for col in range(m.cols):
        pivot = None
        for r in range(rk, len(work)):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            continue
        work[rk], work[pivot] = work[pivot], work[rk]
        for r in range(len(work)):
            if r != rk and (work[r] >> col) & 1:
                work[r] ^= work[rk]
        rk += 1
        if rk == len(work):
            break
    return rk


def invert(m: BitMatrix) -> BitMatrix:
    """Inverse of a square matrix; raises SingularMatrixError if singular."""
    if m.rows != m.cols:
        raise ValueError("inverse needs a square matrix")
    n = m.rows
    # augmented rows: low n bits the matrix, high n bits the identity
    work = [m.row_bits[i] | (1 << (n + i)) for i in range(n)]
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if (work[r] >> col) & 1:
                pivot = r
                break
        if pivot is None:
            raise SingularMatrixError(f"singular {n}x{n} matrix")
        work[col], work[pivot] = work[pivot], work[col]
        for r in range(n):
            if r != col and (work[r] >> col) & 1:
                work[r] ^= work[col]
    return BitMatrix(n, n, tuple(w >> n for w in work))


def sample_uniform_matrix(rows: int, cols: int, rng: random.Random) -> BitMatrix:
    return BitMatrix(rows, cols, tuple(rng.getrandbits(cols) for _ in range(rows)))


def sample_uniform_vector(n: int, rng: random.Random) -> BitVector:
    return BitVector(n, rng.getrandbits(n))


def _rows_independent(rows) -> bool:
    """Linear independence over F2 via incremental echelon insertion."""
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            hb = r.bit_length() - 1
            p = pivots.get(hb)
            if p is None:
                pivots[hb] = r
                break
            r ^= p
        if not r:
            return False
    return True


def sample_invertible(n: int, rng: random.Random) -> BitMatrix:
    """Uniformly random invertible n x n matrix, by rejection.

    The invertible fraction exceeds 0.288 for every n, so this takes
    expected <= ~3.5 draws.
    """
    if n < 1:
        raise ValueError("dimension must be positive")
    getrandbits = rng.getrandbits
    while True:
        rows = [getrandbits(n) for _ in range(n)]
        if _rows_independent(rows):
            return BitMatrix(n, n, tuple(rows))


@dataclass(frozen=True)
class HardMatrices:
    """Correlated tuple (A, B, a, b) with B = (A^T)^-1 and the matching shift.

    b is B^T times the half-swapped B applied to a, so that the f/g pair
    built from these parameters is an exact extremal forrelation instance.
    """

    A: BitMatrix
    B: BitMatrix
    a: BitVector
    b: BitVector

    @property
    def n(self) -> int:
        return self.A.rows

    def check(self) -> None:
        """Assert the defining algebraic relations (used by tests)."""
        n = self.n
        ident = BitMatrix.identity(n)
        assert mat_mat(self.A.transpose(), self.B) == ident, "A^T B != I"
        swapped = vstack(self.B.lower_half(), self.B.upper_half())
        expect_b = mat_vec(self.B.transpose(), mat_vec(swapped, self.a))
        assert self.b == expect_b, "b does not match its defining formula"


def hard_matrices_from(a_mat: BitMatrix, a: BitVector) -> HardMatrices:
    """Complete (A, a) into the full (A, B, a, b) tuple."""
    n = a_mat.rows
    if n % 2:
        raise ValueError("dimension must be even")
    if a.n != n:
        raise ValueError("shift dimension mismatch")
    b_mat = invert(a_mat.transpose())
    swapped = vstack(b_mat.lower_half(), b_mat.upper_half())
    b = mat_vec(b_mat.transpose(), mat_vec(swapped, a))
    return HardMatrices(a_mat, b_mat, a, b)


def sample_hard_matrices(n: int, rng: random.Random) -> HardMatrices:
    """Sample A uniform invertible, a uniform, and derive B and b."""
    if n % 2 or n < 2:
        raise ValueError("dimension must be even and >= 2")
    return hard_matrices_from(sample_invertible(n, rng), sample_uniform_vector(n, rng))
