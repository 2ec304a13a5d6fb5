#!/usr/bin/env python3
"""Exact integer matrices for SL(2), GSp(4) and their congruence subgroups."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import List, Sequence, Tuple, Union

from klingen.foundations import complete_coprime_pair

SP4Z = "Sp4Z"
GAMMA0_4 = "Gamma0_4"
PARAMODULAR_K = "ParamodularK"
GAMMA0_2 = "Gamma0_2"
GROUPS = (SP4Z, GAMMA0_4, PARAMODULAR_K, GAMMA0_2)

Entry = Union[int, Fraction]
Rows = Tuple[Tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class Mat2Z:
    a: int
    b: int
    c: int
    d: int

    @classmethod
    def identity(cls) -> "Mat2Z":
        return cls(1, 0, 0, 1)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def __matmul__(self, other: "Mat2Z") -> "Mat2Z":
        return Mat2Z(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "Mat2Z":
        return Mat2Z(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "Mat2Z":
        det = self.det
        if det not in (1, -1):
            raise ValueError(f"{self} is not invertible over the integers (det {det})")
        return Mat2Z(self.d * det, -self.b * det, -self.c * det, self.a * det)

    def transpose(self) -> "Mat2Z":
        return Mat2Z(self.a, self.c, self.b, self.d)

    def as_tuple(self) -> Tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __str__(self) -> str:
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


S_MATRIX = Mat2Z(0, 1, -1, 0)
T_MATRIX = Mat2Z(1, 1, 0, 1)


def translation(m: int) -> Mat2Z:
    return Mat2Z(1, m, 0, 1)


def _as_rows(rows: Sequence[Sequence[Entry]]) -> Rows:
    if len(rows) != 4 or any(len(row) != 4 for row in rows):
        raise ValueError("symplectic representatives are 4x4 matrices")
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def _matmul(x: Rows, y: Rows) -> Rows:
    return tuple(tuple(sum((x[i][m] * y[m][j] for m in range(4)), Fraction(0)) for j in range(4)) for i in range(4))


def _transpose(x: Rows) -> Rows:
    return tuple(tuple(x[j][i] for j in range(4)) for i in range(4))


J_ROWS = _as_rows(((0, 0, 1, 0), (0, 0, 0, 1), (-1, 0, 0, 0), (0, -1, 0, 0)))


def symplectic_similitude(rows: Rows) -> Fraction:
    """mu with g^T J g = mu J; raises if g is not a symplectic similitude."""
    gram = _matmul(_matmul(_transpose(rows), J_ROWS), rows)
    mu = gram[0][2]
    expected = tuple(tuple(mu * x for x in row) for row in J_ROWS)
    if gram != expected or mu == 0:
        raise ValueError("matrix is not a symplectic similitude")
    return mu


@dataclass(frozen=True)
class SpRep:
    """A 4x4 rational matrix g with g^T J g = similitude * J."""

    rows: Rows
    similitude: Fraction

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Entry]]) -> "SpRep":
        exact = _as_rows(rows)
        return cls(exact, symplectic_similitude(exact))

    @classmethod
    def from_blocks(cls, a: Mat2Z, b: Mat2Z, c: Mat2Z, d: Mat2Z) -> "SpRep":
        return cls.from_rows(
            (
                (a.a, a.b, b.a, b.b),
                (a.c, a.d, b.c, b.d),
                (c.a, c.b, d.a, d.b),
                (c.c, c.d, d.c, d.d),
            )
        )

    def __matmul__(self, other: "SpRep") -> "SpRep":
        return SpRep(_matmul(self.rows, other.rows), self.similitude * other.similitude)

    def entry(self, i: int, j: int) -> Fraction:
        """1-based entry access, matching the usual block displays."""
        return self.rows[i - 1][j - 1]

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.rows for x in row)

    def block(self, name: str) -> Tuple[Tuple[Fraction, Fraction], Tuple[Fraction, Fraction]]:
        offsets = {"A": (0, 0), "B": (0, 2), "C": (2, 0), "D": (2, 2)}
        i, j = offsets[name]
        return (
            (self.rows[i][j], self.rows[i][j + 1]),
            (self.rows[i + 1][j], self.rows[i + 1][j + 1]),
        )

    def is_identity(self) -> bool:
        return all(self.rows[i][j] == (1 if i == j else 0) for i in range(4) for j in range(4))

    def integer_rows(self) -> List[List[int]]:
        if not self.is_integral():
            raise ValueError("matrix has non-integral entries")
        return [[int(x) for x in row] for row in self.rows]


J = SpRep(J_ROWS, Fraction(1))


def _divisible(x: Fraction, n: int) -> bool:
    return x.denominator == 1 and x.numerator % n == 0


def is_member(g: Union[SpRep, Mat2Z], group: str, level: int = 1) -> bool:
    """Exact membership in Sp(4,Z), Gamma_0^4(N), K(N) or Gamma_0^2(N)."""
    if group not in GROUPS:
        raise ValueError(f"unknown group {group!r}; expected one of {', '.join(GROUPS)}")
    if level < 1:
        raise ValueError(f"level must be positive, got {level}")
    if group == GAMMA0_2:
        if not isinstance(g, Mat2Z):
            return False
        return g.det == 1 and g.c % level == 0
    if not isinstance(g, SpRep) or g.similitude != 1:
        return False
    if group == PARAMODULAR_K:
        # (2,4) may carry a 1/N denominator; the N-multiples sit in column 2 and row 4
        for i in range(1, 5):
            for j in range(1, 5):
                x = g.entry(i, j)
                if (i, j) == (2, 4):
                    if not (x * level).denominator == 1:
                        return False
                elif (j == 2 and i in (1, 3)) or (i == 4 and j != 4):
                    if not _divisible(x, level):
                        return False
                elif x.denominator != 1:
                    return False
        return True
    if not g.is_integral():
        return False
    if group == SP4Z:
        return True
    return all(_divisible(x, level) for row in g.block("C") for x in row)


def L_matrix(level: int) -> SpRep:
    if level < 1:
        raise ValueError(f"level must be positive, got {level}")
    return SpRep.from_rows(((1, level, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, -level, 1)))


def double_coset_reps() -> Tuple[SpRep, SpRep, SpRep]:
    """The representatives 1, s_1, r of the Klingen parabolic double cosets."""
    identity = SpRep.from_rows(((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)))
    s1 = SpRep.from_rows(((0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)))
    r = SpRep.from_rows(((1, 0, 0, 0), (1, 1, 0, 0), (0, 0, 1, -1), (0, 0, 0, 1)))
    return identity, s1, r


def epsilon_cd(c: int, d: int) -> SpRep:
    a, b = complete_coprime_pair(c, d)
    zero = Mat2Z(0, 0, 0, 0)
    return SpRep.from_blocks(Mat2Z(d, -c, -b, a), zero, zero, Mat2Z(a, b, c, d))


@dataclass(frozen=True)
class CosetRep:
    """A representative of Gamma_infinity \\ Gamma_0^2(N) with bottom row (c, d)."""

    matrix: Mat2Z

    @property
    def key(self) -> Tuple[int, int]:
        return (self.matrix.c, self.matrix.d)

    def translate(self, m: int) -> "CosetRep":
        """(1 m; 0 1) * matrix: the same coset, a different representative."""
        return CosetRep(translation(m) @ self.matrix)


def normalize_pair(c: int, d: int) -> Tuple[int, int]:
    if c < 0 or (c == 0 and d < 0):
        return -c, -d
    return c, d


def coset_reps(level: int, height: int) -> List[CosetRep]:
    """Normalized bottom rows (c, d), N | c, 0 <= c <= M, |d| <= M."""
    if height < 1:
        raise ValueError(f"coset height must be >= 1, got {height}")
    if level < 1:
        raise ValueError(f"level must be positive, got {level}")
    reps = [CosetRep(Mat2Z.identity())]
    for c in range(level, height + 1, level):
        for d in range(-height, height + 1):
            if gcd(c, d) != 1:
                continue
            a, b = complete_coprime_pair(c, d)
            reps.append(CosetRep(Mat2Z(a, b, c, d)))
    return reps


def embed_h11(g1: Mat2Z, g2: Mat2Z) -> SpRep:
    if g1.det != g2.det:
        raise ValueError(f"similitudes differ: det g1 = {g1.det}, det g2 = {g2.det}")
    return SpRep.from_rows(
        (
            (g1.a, 0, -g1.b, 0),
            (0, g2.a, 0, g2.b),
            (-g1.c, 0, g1.d, 0),
            (0, g2.c, 0, g2.d),
        )
    )


def moebius(gamma: Mat2Z, tau: complex, k: int = 1) -> Tuple[complex, complex]:
    """(gamma<tau>, j(gamma, tau)^k) with j = c tau + d.

    The default k = 1 returns the bare automorphy factor.
    """
    if tau.imag <= 0:
        raise ValueError(f"tau must lie in the upper half-plane, got {tau}")
    j = gamma.c * tau + gamma.d
    return (gamma.a * tau + gamma.b) / j, j**k


def sp4_generators() -> List[SpRep]:
    """J together with translations and Levi elements; generates Sp(4,Z)."""
    one, zero = Mat2Z.identity(), Mat2Z(0, 0, 0, 0)
    generators = [J]
    for sym in (Mat2Z(1, 0, 0, 0), Mat2Z(0, 0, 0, 1), Mat2Z(0, 1, 1, 0)):
        generators.append(SpRep.from_blocks(one, sym, zero, one))
    for levi in (T_MATRIX, S_MATRIX):
        generators.append(SpRep.from_blocks(levi, zero, zero, levi.inverse().transpose()))
    return generators


_GAMMA0_GENERATORS = {
    1: (T_MATRIX, S_MATRIX),
    2: (T_MATRIX, Mat2Z(1, -1, 2, -1)),
    3: (T_MATRIX, Mat2Z(-1, 1, -3, 2)),
    4: (T_MATRIX, Mat2Z(1, 0, 4, 1), -Mat2Z.identity()),
}


def gamma0_generators(level: int) -> List[Mat2Z]:
    """Generators of Gamma_0^2(N) for N <= 4; a spanning sample of elements otherwise."""
    if level < 1:
        raise ValueError(f"level must be positive, got {level}")
    if level in _GAMMA0_GENERATORS:
        return list(_GAMMA0_GENERATORS[level])
    elements = [T_MATRIX, Mat2Z(1, 0, level, 1)]
    for d in range(2, level):
        if gcd(level, d) == 1:
            a, b = complete_coprime_pair(level, d)
            elements.append(Mat2Z(a, b, level, d))
    return elements
