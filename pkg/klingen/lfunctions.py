#!/usr/bin/env python3
"""L-values with explicit truncation bounds.

Every numeric engine returns an LValue whose tail_bound covers the omitted
terms under the Deligne-shape bound |a(n)| <= sigma_0(n) n^((k-1)/2); for
ingested coefficient files that bound is assumed, not proved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, gcd
from typing import Optional, Sequence, Union

import mpmath
import numpy as np

from klingen.foundations import (
    DirichletKronecker,
    generalized_bernoulli,
    is_fundamental_discriminant,
    prime_divisors,
    squarefree_decomposition,
    zeta_neg_odd,
)
from klingen.qseries import square_index_coefficients
from klingen.quadforms import DiscriminantSplit
from klingen.summation import exact_sum

Coefficients = Union[Sequence[Union[int, Fraction, float]], np.ndarray]
# r_T(m) <= C sqrt(m) + 4 with C = 4 sqrt(4 n1 / det(2T)) on a reduced form, at most 8 * 3^(-1/4)
THETA_COUNT_CONSTANT = 8.0 * 3.0**-0.25


@dataclass(frozen=True)
class LValue:
    value: complex
    tail_bound: float
    cutoff: int

    def __post_init__(self) -> None:
        if self.tail_bound < 0:
            raise ValueError(f"tail_bound must be non-negative, got {self.tail_bound}")

    @property
    def real(self) -> float:
        return self.value.real

    def contains(self, target: float, slack: float = 0.0) -> bool:
        return abs(self.value - target) <= self.tail_bound + slack

    def scaled(self, factor: float) -> "LValue":
        return LValue(self.value * factor, self.tail_bound * abs(factor), self.cutoff)


@dataclass(frozen=True)
class ExactPiMultiple:
    """coeff * sqrt(sqrt_factor) * pi^pi_power, sqrt_factor squarefree."""

    coeff: Fraction
    pi_power: int
    sqrt_factor: int = 1

    def __post_init__(self) -> None:
        if self.pi_power < 0:
            raise ValueError(f"pi_power must be non-negative, got {self.pi_power}")
        if self.sqrt_factor < 1 or squarefree_decomposition(self.sqrt_factor)[0] != 1:
            raise ValueError(f"sqrt_factor must be a positive squarefree integer, got {self.sqrt_factor}")

    def __mul__(self, other: "ExactPiMultiple") -> "ExactPiMultiple":
        g = gcd(self.sqrt_factor, other.sqrt_factor)
        return ExactPiMultiple(
            self.coeff * other.coeff * g,
            self.pi_power + other.pi_power,
            (self.sqrt_factor // g) * (other.sqrt_factor // g),
        )

    def scale(self, factor: Fraction) -> "ExactPiMultiple":
        return ExactPiMultiple(self.coeff * factor, self.pi_power, self.sqrt_factor)

    def to_mpf(self) -> mpmath.mpf:
        value = mpmath.mpf(self.coeff.numerator) / self.coeff.denominator
        return value * mpmath.sqrt(self.sqrt_factor) * mpmath.pi**self.pi_power

    def __float__(self) -> float:
        return float(self.to_mpf())

    def __str__(self) -> str:
        root = f"*sqrt({self.sqrt_factor})" if self.sqrt_factor != 1 else ""
        return f"({self.coeff}){root}*pi^{self.pi_power}"


def dirichlet_L_exact(D: int, s: int) -> ExactPiMultiple:
    """L(s, chi_D) for a negative fundamental discriminant and odd s >= 1.

    Functional equation for odd real characters:
    L(s, chi) = (-1)^(1 + (s-1)/2) (sqrt(f)/2) (2 pi / f)^s B_{s,chi} / s!.
    """
    if D >= 0 or not is_fundamental_discriminant(D):
        raise ValueError(f"{D} is not a negative fundamental discriminant")
    if s < 1 or s % 2 == 0:
        raise ValueError(f"parity mismatch: chi_{D} is odd, so s must be odd and positive, got {s}")
    chi = DirichletKronecker(D)
    f = chi.modulus
    sign = -1 if ((s - 1) // 2) % 2 == 0 else 1
    coeff = Fraction(sign, 2) * Fraction(2, f) ** s * generalized_bernoulli(chi, s) / factorial(s)
    square, core = squarefree_decomposition(f)
    return ExactPiMultiple(coeff * square, s, core)


def _character_values(chi: DirichletKronecker, n: np.ndarray) -> np.ndarray:
    table = np.array(chi.table(), dtype=float)
    return table[n % chi.modulus]


def dirichlet_L_numeric(D: int, s: float, cutoff: int) -> LValue:
    if s <= 1:
        raise ValueError(f"dirichlet_L_numeric needs s > 1, got {s}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    chi = DirichletKronecker(D)
    n = np.arange(1, cutoff + 1, dtype=np.int64)
    terms = _character_values(chi, n) * np.power(n.astype(float), -float(s))
    return LValue(complex(exact_sum(terms)), chi.modulus * float(cutoff) ** (-float(s)), cutoff)


def _float_array(values: Coefficients) -> np.ndarray:
    if isinstance(values, np.ndarray):
        return values.astype(float)
    return np.array([float(v) for v in values], dtype=float)


def rankin_naive(
    a: Coefficients,
    b: Coefficients,
    s: float,
    v: int,
    k: int,
    cutoff: Optional[int] = None,
    theta_constant: float = THETA_COUNT_CONSTANT,
) -> LValue:
    """sum_{n <= cutoff} a(n) b(v^2 n) n^{-s} with an integral-comparison tail.

    The tail uses |a(n)| <= 2 n^{k/2} and |b(m)| <= C_T sqrt(m) + 4. The
    default C_T holds for every positive definite form; pass
    theta_window_constant(T) for a sharper one.
    """
    if v < 1:
        raise ValueError(f"twist index v must be positive, got {v}")
    if s <= (k + 3) / 2:
        raise ValueError(f"rankin_naive needs s > (k+3)/2 = {(k + 3) / 2} for absolute convergence, got {s}")
    a_arr = _float_array(a)
    b_arr = _float_array(b)
    available = min(len(a_arr) - 1, (len(b_arr) - 1) // (v * v))
    if cutoff is None:
        cutoff = available
    if cutoff < 1 or cutoff > available:
        raise ValueError(
            f"insufficient coefficient data: cutoff {cutoff} needs a(n) to {cutoff} "
            f"and b(m) to {v * v * cutoff}; have {len(a_arr) - 1} and {len(b_arr) - 1}"
        )
    n = np.arange(1, cutoff + 1, dtype=np.int64)
    terms = a_arr[1 : cutoff + 1] * b_arr[v * v * n] * np.power(n.astype(float), -float(s))
    value = exact_sum(terms)
    if not np.any(a_arr[1:]):
        return LValue(complex(value), 0.0, cutoff)
    exponent = s - (k + 1) / 2
    tail = 2.0 * (theta_constant * v + 4.0) * float(cutoff) ** (1.0 - exponent) / (exponent - 1.0)
    return LValue(complex(value), tail, cutoff)


def riemann_zeta(s: float, cutoff: int) -> LValue:
    if s <= 1:
        raise ValueError(f"riemann_zeta needs s > 1, got {s}")
    n = np.arange(1, cutoff + 1, dtype=float)
    value = exact_sum(np.power(n, -float(s)))
    return LValue(complex(value), float(cutoff) ** (1.0 - s) / (s - 1.0), cutoff)


def sym2_L(a: Sequence[Union[int, Fraction]], k: int, s: float, cutoff: int) -> LValue:
    """zeta(2s - 2k + 2) * sum_{n <= cutoff} a(n^2) n^{-s}.

    a(n^2) comes from the Hecke recursion, so only a(p) for p <= cutoff is
    needed; |a(n^2)| <= sigma_0(n^2) n^{k-1} <= 2 n^k bounds the tail.
    """
    if s <= k + 1:
        raise ValueError(f"sym2_L needs s > k + 1 = {k + 1} for absolute convergence, got {s}")
    if cutoff < 1:
        raise ValueError(f"cutoff must be positive, got {cutoff}")
    if not any(a[1:]):
        return LValue(0j, 0.0, cutoff)
    squares = square_index_coefficients(a, k, cutoff)
    a_sq = np.array([float(x) for x in squares[1:]], dtype=float)
    n = np.arange(1, cutoff + 1, dtype=float)
    series = exact_sum(a_sq * np.power(n, -float(s)))
    series_tail = 2.0 * float(cutoff) ** (k + 1.0 - s) / (s - k - 1.0)
    zeta = riemann_zeta(2.0 * s - 2.0 * k + 2.0, cutoff)
    z = zeta.value.real
    value = z * series
    bound = abs(z) * series_tail + abs(series) * zeta.tail_bound + zeta.tail_bound * series_tail
    return LValue(complex(value), bound, cutoff)


def phi_scalar(split: DiscriminantSplit, v: int, k: int) -> Fraction:
    """(f_T / v)^(2k-3) prod_{p | f_T/v} (1 - p^(1-k) chi_{-Delta}(p))."""
    if v < 1 or split.f_T % v:
        raise ValueError(f"v = {v} does not divide f_T = {split.f_T}")
    quotient = split.f_T // v
    chi = split.character
    value = Fraction(quotient) ** (2 * k - 3)
    for p in prime_divisors(quotient):
        value *= 1 - Fraction(chi(p), p ** (k - 1))
    return value


def factorial_ratio(k: int) -> int:
    """(2k-2)! / (k-1)!, the rational part of (2k-2)!/((2 pi)^(k-1) (k-1)!)."""
    return factorial(2 * k - 2) // factorial(k - 1)


def weighted_average_constant(k: int, sym2: LValue, rankin_square: LValue, rankin_hexagonal: LValue) -> LValue:
    """zeta(k-1) * (2 + c_k [2^(2k-3) L(chi_-4) L(f x theta_1) + 2 3^(k-3/2) L(chi_-3) L(f x theta_2)]).

    c_k = (-1)^(k/2) (k-1)! (2 pi)^(k-1) / ((2k-2)! L(2k-2, Sym^2 f)). The
    bound propagates the relative bounds of the three numeric L-values.
    """
    if k % 2 or k < 6:
        raise ValueError(f"weighted average needs even k >= 6, got {k}")
    chi4 = float(dirichlet_L_exact(-4, k - 1))
    chi3 = float(dirichlet_L_exact(-3, k - 1))
    c_k = (-1) ** (k // 2) * float(mpmath.mpf(2 * mpmath.pi) ** (k - 1) / factorial_ratio(k))
    c_k /= sym2.value.real
    square = 2.0 ** (2 * k - 3) * chi4 * rankin_square.value.real
    hexagonal = 2.0 * 3.0 ** (k - 1.5) * chi3 * rankin_hexagonal.value.real
    bracket = square + hexagonal
    inner = 2.0 + c_k * bracket
    zeta = float(mpmath.zeta(k - 1))
    relative = sym2.tail_bound / abs(sym2.value.real)
    bracket_bound = abs(2.0 ** (2 * k - 3) * chi4) * rankin_square.tail_bound + abs(
        2.0 * 3.0 ** (k - 1.5) * chi3
    ) * rankin_hexagonal.tail_bound
    bound = zeta * (abs(c_k) * bracket_bound + abs(c_k * bracket) * relative)
    return LValue(complex(zeta * inner), bound, min(sym2.cutoff, rankin_square.cutoff))


def weighted_average_from_extraction(k: int, af11: float) -> float:
    """zeta(k-1) (4 / zeta(1-k) + A_f(1,1))."""
    return float(mpmath.zeta(k - 1)) * (4.0 / float(zeta_neg_odd(k)) + af11)


def l_value_relative(value: LValue) -> float:
    magnitude = abs(value.value)
    return math.inf if magnitude == 0 else value.tail_bound / magnitude
