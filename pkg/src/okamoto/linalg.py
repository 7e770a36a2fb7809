"""Exact linear algebra over the rational-function field.

Matrices are immutable grids of :class:`~okamoto.ring.RationalFunction`.
Inverses go through the adjugate (sizes here never exceed a few dozen
entries), kernels and ranks through fraction-free Gaussian elimination with
a documented pivot order: columns are scanned left to right and, within a
column, rows top to bottom; the first nonzero entry is the pivot.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .ring import (
    AlgebraError,
    LaurentPolynomial,
    RationalFunction,
    SubstitutionRule,
    normalize_mod,
    poly_lcm,
    rf_equal_mod,
)

__all__ = ["SymMatrix", "SingularMatrixError", "vector_proportional"]


class SingularMatrixError(AlgebraError):
    """Raised when inverting a matrix whose determinant vanishes."""

    def __init__(self, determinant: RationalFunction):
        super().__init__(f"singular matrix (determinant {determinant})")
        self.determinant = determinant


def _as_rf(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPolynomial):
        return RationalFunction(x)
    if isinstance(x, (int, Fraction)):
        return RationalFunction(x)
    if isinstance(x, str):
        from .ring import parse_expression

        return parse_expression(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to RationalFunction")


class SymMatrix:
    """Rectangular matrix over the rational-function field."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence]):
        grid = tuple(tuple(_as_rf(x) for x in row) for row in entries)
        if not grid or not grid[0]:
            raise AlgebraError("matrix must have at least one row and column")
        width = len(grid[0])
        if any(len(row) != width for row in grid):
            raise AlgebraError("ragged matrix")
        object.__setattr__(self, "rows", len(grid))
        object.__setattr__(self, "cols", width)
        object.__setattr__(self, "entries", grid)

    def __setattr__(self, *_):
        raise AttributeError("SymMatrix is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "SymMatrix":
        return SymMatrix(
            [[1 if i == j else 0 for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> "SymMatrix":
        return SymMatrix([[0] * cols for _ in range(rows)])

    @staticmethod
    def column(values: Sequence) -> "SymMatrix":
        return SymMatrix([[v] for v in values])

    @staticmethod
    def from_columns(columns: Sequence[Sequence]) -> "SymMatrix":
        height = len(columns[0])
        return SymMatrix(
            [[columns[j][i] for j in range(len(columns))] for i in range(height)]
        )

    # -- basic access --------------------------------------------------------

    def __getitem__(self, key):
        i, j = key
        return self.entries[i][j]

    def row(self, i: int) -> tuple[RationalFunction, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[RationalFunction, ...]:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def is_square(self) -> bool:
        return self.rows == self.cols

    def block(self, r0: int, r1: int, c0: int, c1: int) -> "SymMatrix":
        return SymMatrix([row[c0:c1] for row in self.entries[r0:r1]])

    def map_entries(self, fn: Callable[[RationalFunction], RationalFunction]) -> "SymMatrix":
        return SymMatrix([[fn(x) for x in row] for row in self.entries])

    def transpose(self) -> "SymMatrix":
        return SymMatrix(
            [[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)]
        )

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise AlgebraError("shape mismatch in matrix addition")
        return SymMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        return self + other.scale(-1)

    def scale(self, s) -> "SymMatrix":
        s = _as_rf(s)
        return self.map_entries(lambda x: x * s)

    def __mul__(self, other):
        if isinstance(other, SymMatrix):
            if self.cols != other.rows:
                raise AlgebraError("shape mismatch in matrix product")
            cols = list(zip(*other.entries))
            return SymMatrix(
                [
                    [
                        sum(
                            (a * b for a, b in zip(row, col)),
                            RationalFunction.zero(),
                        )
                        for col in cols
                    ]
                    for row in self.entries
                ]
            )
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            a == b for ra, rb in zip(self.entries, other.entries) for a, b in zip(ra, rb)
        )

    def __hash__(self):
        return hash(self.entries)

    def equal_mod(self, other: "SymMatrix", rules: Sequence[SubstitutionRule]) -> bool:
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        return all(
            rf_equal_mod(a, b, rules)
            for ra, rb in zip(self.entries, other.entries)
            for a, b in zip(ra, rb)
        )

    def normalize_mod(self, rules: Sequence[SubstitutionRule]) -> "SymMatrix":
        return self.map_entries(lambda x: normalize_mod(x, rules))

    def is_zero(self) -> bool:
        return all(x.is_zero() for row in self.entries for x in row)

    def is_identity(self) -> bool:
        return self.is_square() and self == SymMatrix.identity(self.rows)

    def trace(self) -> RationalFunction:
        if not self.is_square():
            raise AlgebraError("trace of a non-square matrix")
        return sum(
            (self.entries[i][i] for i in range(self.rows)), RationalFunction.zero()
        )

    # -- determinant / inverse ----------------------------------------------

    def det(self) -> RationalFunction:
        """Determinant via dynamic programming over column subsets."""
        if not self.is_square():
            raise AlgebraError("determinant of a non-square matrix")
        n = self.rows
        # minors[S] = det of rows 0..k-1 on column set S (encoded as bitmask)
        minors = {0: RationalFunction.one()}
        for k in range(n):
            nxt: dict[int, RationalFunction] = {}
            row_sign = 1 if k % 2 == 0 else -1
            for mask, value in minors.items():
                if value.is_zero():
                    continue
                sign = row_sign
                for j in range(n):
                    bit = 1 << j
                    if mask & bit:
                        sign = -sign
                        continue
                    e = self.entries[k][j]
                    if not e.is_zero():
                        acc = nxt.get(mask | bit)
                        term = value * e if sign > 0 else -(value * e)
                        nxt[mask | bit] = term if acc is None else acc + term
            minors = nxt
            if not minors:
                return RationalFunction.zero()
        return minors.get((1 << n) - 1, RationalFunction.zero())

    def inverse(self) -> "SymMatrix":
        """Exact inverse; raises :class:`SingularMatrixError` when det == 0."""
        if not self.is_square():
            raise AlgebraError("inverse of a non-square matrix")
        d = self.det()
        if d.is_zero():
            raise SingularMatrixError(d)
        n = self.rows
        if n == 1:
            return SymMatrix([[d.inverse()]])
        cof = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                sub = SymMatrix(
                    [
                        [self.entries[r][c] for c in range(n) if c != j]
                        for r in range(n)
                        if r != i
                    ]
                )
                m = sub.det()
                cof[i][j] = m if (i + j) % 2 == 0 else -m
        return SymMatrix(
            [[cof[j][i] / d for j in range(n)] for i in range(n)]
        )

    # -- characteristic polynomial -------------------------------------------

    def spectral_variable(self, preferred: str = "x") -> str:
        used = set()
        for row in self.entries:
            for e in row:
                used.update(e.variables())
        name = preferred
        while name in used:
            name += "_"
        return name

    def char_poly(self, var: str | None = None) -> tuple[str, RationalFunction]:
        """Monic characteristic polynomial det(x*1 - M).

        Returns (spectral variable name, polynomial as a rational function
        whose denominator is free of the spectral variable).
        """
        if not self.is_square():
            raise AlgebraError("characteristic polynomial of a non-square matrix")
        x = var or self.spectral_variable()
        xrf = RationalFunction.var(x)
        n = self.rows
        shifted = SymMatrix(
            [
                [
                    (xrf - self.entries[i][j]) if i == j else -self.entries[i][j]
                    for j in range(n)
                ]
                for i in range(n)
            ]
        )
        cp = shifted.det()
        if cp.den.degree_in(x) != 0:
            raise AlgebraError("spectral variable leaked into the denominator")
        return x, cp

    def verify_spectrum(
        self,
        claimed: Sequence[RationalFunction],
        rules: Sequence[SubstitutionRule] = (),
    ) -> bool:
        """True iff char_poly equals the product of (x - lambda) mod rules."""
        if len(claimed) != self.rows:
            raise AlgebraError("claimed spectrum has wrong size")
        x, cp = self.char_poly()
        xrf = RationalFunction.var(x)
        prod = RationalFunction.one()
        for lam in claimed:
            lam = _as_rf(lam)
            if x in lam.variables():
                raise AlgebraError("claimed eigenvalue mentions the spectral variable")
            prod = prod * (xrf - lam)
        return rf_equal_mod(cp, prod, rules)

    # -- elimination: rank and nullspace --------------------------------------

    def _cleared_rows(self) -> list[list[LaurentPolynomial]]:
        out = []
        for row in self.entries:
            scale = None
            for e in row:
                scale = e.den if scale is None else poly_lcm(scale, e.den)
            cleared = []
            for e in row:
                from .ring import poly_div_exact

                cleared.append(e.num * poly_div_exact(scale, e.den))
            out.append(cleared)
        return out

    def _eliminated(self):
        """Fraction-free (Bareiss) forward elimination.

        Returns (matrix rows, pivot list) where pivots are (row, col) pairs.
        Pivot order: columns left to right, first nonzero row from the top.
        """
        m = self._cleared_rows()
        rows, cols = self.rows, self.cols
        pivots: list[tuple[int, int]] = []
        prev = LaurentPolynomial.constant(1)
        r = 0
        from .ring import poly_div_exact

        for c in range(cols):
            pivot_row = None
            for i in range(r, rows):
                if not m[i][c].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            if pivot_row != r:
                m[r], m[pivot_row] = m[pivot_row], m[r]
            pivot = m[r][c]
            for i in range(r + 1, rows):
                if all(x.is_zero() for x in m[i]):
                    continue
                for j in range(cols):
                    if j == c:
                        continue
                    num = m[i][j] * pivot - m[i][c] * m[r][j]
                    m[i][j] = poly_div_exact(num, prev)
                m[i][c] = LaurentPolynomial.constant(0)
            prev = pivot
            pivots.append((r, c))
            r += 1
            if r == rows:
                break
        return m, pivots

    def rank(self) -> int:
        return len(self._eliminated()[1])

    def nullspace(self) -> list["SymMatrix"]:
        """Basis of the right kernel as a list of column vectors.

        The count equals cols - rank; every returned vector v satisfies
        M v = 0 exactly.
        """
        m, pivots = self._eliminated()
        pivot_cols = [c for _, c in pivots]
        free_cols = [c for c in range(self.cols) if c not in pivot_cols]
        basis = []
        for free in free_cols:
            vec = [RationalFunction.zero() for _ in range(self.cols)]
            vec[free] = RationalFunction.one()
            # back-substitute through the pivot rows, bottom-up
            for (r, c) in reversed(pivots):
                s = RationalFunction.zero()
                for j in range(c + 1, self.cols):
                    if not m[r][j].is_zero() and not vec[j].is_zero():
                        s = s + RationalFunction(m[r][j]) * vec[j]
                vec[c] = -s / RationalFunction(m[r][c])
            basis.append(SymMatrix.column(vec))
        return basis

    # -- printing ----------------------------------------------------------

    def __str__(self):
        body = ",\n ".join(
            "[" + ", ".join(str(x) for x in row) + "]" for row in self.entries
        )
        return f"[{body}]"

    def __repr__(self):
        return f"SymMatrix({self.rows}x{self.cols})"

    def to_strings(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.entries]


def vector_proportional(v: SymMatrix, w: SymMatrix) -> bool:
    """True iff the two nonzero column vectors span the same line."""
    if v.rows != w.rows or v.cols != 1 or w.cols != 1:
        raise AlgebraError("expected column vectors of equal height")
    if v.is_zero() or w.is_zero():
        return False
    for i in range(v.rows):
        for j in range(i + 1, v.rows):
            if v[i, 0] * w[j, 0] != v[j, 0] * w[i, 0]:
                return False
    return True
