"""Exact dense linear algebra over F_p and Q.

Matrices over F_p are stored as numpy int64 arrays reduced mod p; row
operations are vectorized, and all pivoting is exact (no floating
point anywhere).  Matrices over Q hold ``fractions.Fraction`` entries
with a fast integer path: when every entry is an integer the data is
mirrored into an int64 array so that products and rank/kernel
computations can run through numpy and, for large sizes, through a
multi-modular path with rational reconstruction and exact
verification.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as _gcd
from typing import Sequence

import numpy as np

from .fields import Field, QQ

def _primes_below(n: int, count: int):
    out = []
    k = n
    while len(out) < count:
        k -= 1
        if all(k % d for d in range(2, int(k ** 0.5) + 1)):
            out.append(k)
    return tuple(out)


# primes just under 2**20: squares fit comfortably in int64 row updates
_MM_PRIMES = _primes_below(1 << 20, 8)

# above this column count, integer matrices over Q go multi-modular
_MM_THRESHOLD = 140


class LinalgError(ArithmeticError):
    pass


class InconsistentSystem(LinalgError):
    pass


# ---------------------------------------------------------------------------
# mod-p kernels (numpy int64)
# ---------------------------------------------------------------------------

def _rref_mod(A: np.ndarray, p: int):
    """Reduced row echelon form mod p.  Returns (R, pivot_cols)."""
    R = (A % p).astype(np.int64, copy=True)
    m, n = R.shape
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            R[[r, i]] = R[[i, r]]
        inv = pow(int(R[r, c]), -1, p)
        R[r] = (R[r] * inv) % p
        col = R[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            R[rows] = (R[rows] - np.outer(col[rows], R[r])) % p
        pivots.append(c)
        r += 1
    return R, pivots


def _kernel_from_rref(R: np.ndarray, pivots: list[int], p: int) -> np.ndarray:
    """Columns spanning the kernel, from an RREF mod p."""
    n = R.shape[1]
    free = [c for c in range(n) if c not in set(pivots)]
    K = np.zeros((n, len(free)), dtype=np.int64)
    for j, fc in enumerate(free):
        K[fc, j] = 1
        for i, pc in enumerate(pivots):
            K[pc, j] = (-int(R[i, fc])) % p
    return K


# ---------------------------------------------------------------------------
# Fraction kernels (pure python)
# ---------------------------------------------------------------------------

def _rref_frac(rows: list[list[Fraction]]):
    R = [row[:] for row in rows]
    m = len(R)
    n = len(R[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        if r == m:
            break
        pr = None
        for i in range(r, m):
            if R[i][c] != 0:
                pr = i
                break
        if pr is None:
            continue
        if pr != r:
            R[r], R[pr] = R[pr], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(m):
            if i != r and R[i][c] != 0:
                f = R[i][c]
                Rr = R[r]
                R[i] = [a - f * b for a, b in zip(R[i], Rr)]
        pivots.append(c)
        r += 1
    return R, pivots


def _rational_reconstruct(a: int, m: int):
    """Recover n/d = a (mod m) with |n|, d <= sqrt(m/2); None on failure."""
    from math import isqrt

    a %= m
    bound = isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    if _gcd(r1, abs(s1)) != 1:
        return None
    if s1 < 0:
        return Fraction(-r1, -s1)
    return Fraction(r1, s1)


def _crt_pair(a1: int, m1: int, a2: int, m2: int):
    inv = pow(m1 % m2, -1, m2)
    t = ((a2 - a1) * inv) % m2
    return a1 + m1 * t, m1 * m2


# ---------------------------------------------------------------------------
# ExactMatrix
# ---------------------------------------------------------------------------

class ExactMatrix:
    """Dense exact matrix over F_p or Q.

    Immutable by convention: operations return new matrices.
    """

    __slots__ = ("field", "_mod", "_rows", "shape")

    def __init__(self, field: Field, data, shape=None):
        self.field = field
        if field.is_rational:
            self._mod = None
            self._rows = [[Fraction(x) for x in row] for row in data]
            m = len(self._rows)
            n = len(self._rows[0]) if m else (shape[1] if shape else 0)
            for row in self._rows:
                if len(row) != n:
                    raise LinalgError("ragged matrix")
            self.shape = (m, n)
        else:
            A = np.asarray(data, dtype=np.int64)
            if A.ndim != 2:
                raise LinalgError("matrix data must be 2-d")
            self._mod = A % field.char
            self._rows = None
            self.shape = A.shape

    # -- constructors -------------------------------------------------

    @classmethod
    def zeros(cls, field: Field, m: int, n: int) -> "ExactMatrix":
        if field.is_rational:
            return cls(field, [[Fraction(0)] * n for _ in range(m)], shape=(m, n))
        return cls(field, np.zeros((m, n), dtype=np.int64))

    @classmethod
    def identity(cls, field: Field, n: int) -> "ExactMatrix":
        if field.is_rational:
            return cls(field, [[Fraction(int(i == j)) for j in range(n)] for i in range(n)])
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def from_int_array(cls, field: Field, A: np.ndarray) -> "ExactMatrix":
        if field.is_rational:
            return cls(field, A.tolist())
        return cls(field, A)

    # -- accessors ----------------------------------------------------

    @property
    def nrows(self) -> int:
        return self.shape[0]

    @property
    def ncols(self) -> int:
        return self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        if self.field.is_rational:
            return self._rows[i][j]
        return int(self._mod[i, j])

    def rows(self) -> list[list]:
        if self.field.is_rational:
            return [row[:] for row in self._rows]
        return self._mod.tolist()

    def _int_array(self):
        """int64 view if every entry is an integer of safe magnitude, else None."""
        if not self.field.is_rational:
            return self._mod
        out = np.zeros(self.shape, dtype=np.int64)
        for i, row in enumerate(self._rows):
            for j, x in enumerate(row):
                if x.denominator != 1 or abs(x.numerator) > 2**31:
                    return None
                out[i, j] = x.numerator
        return out

    def is_zero(self) -> bool:
        if self.field.is_rational:
            return all(x == 0 for row in self._rows for x in row)
        return not self._mod.any()

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix) or other.field != self.field:
            return NotImplemented
        if self.shape != other.shape:
            return False
        if self.field.is_rational:
            return self._rows == other._rows
        return bool((self._mod == other._mod).all())

    def __repr__(self):
        return f"ExactMatrix({self.field.name}, {self.shape[0]}x{self.shape[1]})"

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check(other)
        if self.field.is_rational:
            return ExactMatrix(
                self.field,
                [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self._rows, other._rows)],
                shape=self.shape,
            )
        return ExactMatrix(self.field, (self._mod + other._mod) % self.field.char)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + other.scale(-1)

    def scale(self, c) -> "ExactMatrix":
        if self.field.is_rational:
            c = Fraction(c)
            return ExactMatrix(self.field, [[c * x for x in row] for row in self._rows], shape=self.shape)
        return ExactMatrix(self.field, (self._mod * (int(c) % self.field.char)) % self.field.char)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.field != other.field:
            raise LinalgError("field mismatch")
        if self.ncols != other.nrows:
            raise LinalgError(f"shape mismatch {self.shape} @ {other.shape}")
        p = self.field.char
        if p:
            # int64 products are < p**2; accumulate in object if overflow risk
            inner = self.ncols
            if inner * (p - 1) ** 2 < 2**62:
                return ExactMatrix(self.field, (self._mod @ other._mod) % p)
            return ExactMatrix(self.field, (self._mod.astype(object) @ other._mod.astype(object)) % p)
        a = self._int_array()
        b = other._int_array()
        out_shape = (self.nrows, other.ncols)
        if a is not None and b is not None:
            ma = int(np.abs(a).max(initial=0))
            mb = int(np.abs(b).max(initial=0))
            if ma * mb * max(self.ncols, 1) < 2**62:
                return ExactMatrix(self.field, (a @ b).tolist(), shape=out_shape)
            return ExactMatrix(self.field, (a.astype(object) @ b.astype(object)).tolist(), shape=out_shape)
        n, k, m = self.nrows, self.ncols, other.ncols
        bt = [[other._rows[i][j] for i in range(k)] for j in range(m)]
        out = [[sum((ra[t] * cb[t] for t in range(k)), Fraction(0)) for cb in bt] for ra in self._rows]
        return ExactMatrix(self.field, out, shape=(n, m))

    def power(self, k: int) -> "ExactMatrix":
        if self.nrows != self.ncols:
            raise LinalgError("power of non-square matrix")
        out = ExactMatrix.identity(self.field, self.nrows)
        for _ in range(k):
            out = out @ self
        return out

    def transpose(self) -> "ExactMatrix":
        if self.field.is_rational:
            return ExactMatrix(
                self.field,
                [[self._rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
                shape=(self.ncols, self.nrows),
            )
        return ExactMatrix(self.field, self._mod.T.copy())

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_field_rows(other)
        if self.field.is_rational:
            return ExactMatrix(
                self.field,
                [r1 + r2 for r1, r2 in zip(self._rows, other._rows)],
                shape=(self.nrows, self.ncols + other.ncols),
            )
        return ExactMatrix(self.field, np.hstack([self._mod, other._mod]))

    def take_columns(self, cols: Sequence[int]) -> "ExactMatrix":
        if self.field.is_rational:
            return ExactMatrix(
                self.field, [[row[c] for c in cols] for row in self._rows], shape=(self.nrows, len(cols))
            )
        return ExactMatrix(self.field, self._mod[:, list(cols)])

    def take_rows(self, rows: Sequence[int]) -> "ExactMatrix":
        if self.field.is_rational:
            return ExactMatrix(self.field, [self._rows[i][:] for i in rows], shape=(len(rows), self.ncols))
        return ExactMatrix(self.field, self._mod[list(rows), :])

    # -- elimination --------------------------------------------------

    def rref(self):
        """Reduced row echelon form: (R: ExactMatrix, pivot_cols: list)."""
        if self.field.is_rational:
            if not self._rows:
                return ExactMatrix.zeros(self.field, 0, self.ncols), []
            R, piv = _rref_frac(self._rows)
            return ExactMatrix(self.field, R, shape=self.shape), piv
        R, piv = _rref_mod(self._mod, self.field.char)
        return ExactMatrix(self.field, R), piv

    def rank(self) -> int:
        if self.nrows == 0 or self.ncols == 0:
            return 0
        if self.field.is_rational:
            A = self._int_array()
            if A is not None and self.ncols > _MM_THRESHOLD:
                return _int_rank_certified(A)
            _, piv = _rref_frac(self._rows)
            return len(piv)
        _, piv = _rref_mod(self._mod, self.field.char)
        return len(piv)

    def pivot_columns(self) -> list[int]:
        """Indices of a maximal independent set of columns."""
        if self.nrows == 0 or self.ncols == 0:
            return []
        if self.field.is_rational:
            _, piv = _rref_frac(self._rows)
            return piv
        _, piv = _rref_mod(self._mod, self.field.char)
        return piv

    def kernel_basis(self) -> "ExactMatrix":
        """Matrix whose columns span the (right) kernel."""
        m, n = self.shape
        if n == 0:
            return ExactMatrix.zeros(self.field, 0, 0)
        if m == 0:
            return ExactMatrix.identity(self.field, n)
        if self.field.is_rational:
            A = self._int_array()
            if A is not None and n > _MM_THRESHOLD:
                return _int_kernel_certified(self.field, A)
            R, piv = _rref_frac(self._rows)
            free = [c for c in range(n) if c not in set(piv)]
            cols = []
            for fc in free:
                v = [Fraction(0)] * n
                v[fc] = Fraction(1)
                for i, pc in enumerate(piv):
                    v[pc] = -R[i][fc]
                cols.append(v)
            data = [[cols[j][i] for j in range(len(free))] for i in range(n)]
            return ExactMatrix(self.field, data, shape=(n, len(free)))
        R, piv = _rref_mod(self._mod, self.field.char)
        K = _kernel_from_rref(R, piv, self.field.char)
        return ExactMatrix(self.field, K)

    def image_basis(self) -> "ExactMatrix":
        """Columns of self forming a basis of the column space."""
        return self.take_columns(self.pivot_columns())

    def solve_right(self, B: "ExactMatrix") -> "ExactMatrix":
        """Solve self @ X = B exactly; raises InconsistentSystem if unsolvable."""
        if B.field != self.field or B.nrows != self.nrows:
            raise LinalgError("solve_right shape/field mismatch")
        n = self.ncols
        aug = self.hstack(B)
        R, piv = aug.rref()
        for c in piv:
            if c >= n:
                raise InconsistentSystem("no exact solution")
        X = ExactMatrix.zeros(self.field, n, B.ncols)
        if self.field.is_rational:
            for i, c in enumerate(piv):
                for j in range(B.ncols):
                    X._rows[c][j] = R._rows[i][n + j]
        else:
            for i, c in enumerate(piv):
                X._mod[c, :] = R._mod[i, n:]
        return X

    # -- internals ----------------------------------------------------

    def _check(self, other):
        if self.field != other.field or self.shape != other.shape:
            raise LinalgError("shape/field mismatch")

    def _check_field_rows(self, other):
        if self.field != other.field or self.nrows != other.nrows:
            raise LinalgError("shape/field mismatch")


# ---------------------------------------------------------------------------
# multi-modular certified rank / kernel for integer matrices over Q
# ---------------------------------------------------------------------------

def _int_rank_certified(A: np.ndarray) -> int:
    """Exact rank over Q of an integer matrix via the certified kernel."""
    K = _int_kernel_certified(QQ, A)
    return A.shape[1] - K.ncols


def _int_kernel_certified(field: Field, A: np.ndarray) -> ExactMatrix:
    """Kernel over Q of an integer matrix.

    Strategy: RREF mod a prime gives candidate rank r and pivot set; CRT
    over more primes plus rational reconstruction lifts the RREF; the
    resulting kernel is verified exactly, which certifies both the
    kernel and (with rank_p <= rank_Q <= ncols - dim ker) the rank.
    """
    m, n = A.shape
    p0 = _MM_PRIMES[0]
    R0, piv0 = _rref_mod(A, p0)
    r = len(piv0)
    if r == 0:
        return ExactMatrix.identity(field, n)
    free0 = [c for c in range(n) if c not in set(piv0)]
    if not free0:
        # full column rank mod p, hence over Q
        return ExactMatrix.zeros(field, n, 0)

    residues = {(i, c): int(R0[i, c]) for i in range(r) for c in free0}
    modulus = p0
    for extra in range(1, len(_MM_PRIMES)):
        K = _try_lift_kernel(A, piv0, free0, residues, modulus)
        if K is not None:
            return ExactMatrix(field, K, shape=(n, len(free0)))
        p = _MM_PRIMES[extra]
        R, piv = _rref_mod(A, p)
        if piv != piv0:
            if len(piv) > len(piv0):
                # p0 was unlucky; restart from this prime
                return _int_kernel_certified(field, A)  # pragma: no cover
            continue
        for i in range(r):
            for c in free0:
                a, _ = _crt_pair(residues[(i, c)], modulus, int(R[i, c]), p)
                residues[(i, c)] = a
        modulus *= p
    K = _try_lift_kernel(A, piv0, free0, residues, modulus)
    if K is None:
        # fall back to exact Fraction elimination (slow but sure)
        M = ExactMatrix(QQ, A.tolist())
        R, piv = _rref_frac(M._rows)
        free = [c for c in range(n) if c not in set(piv)]
        cols = []
        for fc in free:
            v = [Fraction(0)] * n
            v[fc] = Fraction(1)
            for i, pc in enumerate(piv):
                v[pc] = -R[i][fc]
            cols.append(v)
        data = [[cols[j][i] for j in range(len(cols))] for i in range(n)]
        return ExactMatrix(field, data, shape=(n, len(cols)))
    return ExactMatrix(field, K, shape=(n, len(free0)))


def _try_lift_kernel(A, pivots, free, residues, modulus):
    """Rational-reconstruct kernel vectors and verify A @ K == 0 exactly."""
    n = A.shape[1]
    cols: list[list[Fraction]] = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            q = _rational_reconstruct(-residues[(i, fc)] % modulus, modulus)
            if q is None:
                return None
            v[pc] = q
        cols.append(v)
    Aobj = A.astype(object)
    for v in cols:
        den = 1
        for x in v:
            den = den * x.denominator // _gcd(den, x.denominator)
        w = np.array([int(x * den) for x in v], dtype=object)
        if np.any(Aobj @ w):
            return None
    return [[cols[j][i] for j in range(len(cols))] for i in range(n)]


# ---------------------------------------------------------------------------
# convenience wrappers (the public operation surface)
# ---------------------------------------------------------------------------

def rank(M: ExactMatrix) -> int:
    return M.rank()


def kernel_basis(M: ExactMatrix) -> ExactMatrix:
    return M.kernel_basis()


def image_basis(M: ExactMatrix) -> ExactMatrix:
    return M.image_basis()
