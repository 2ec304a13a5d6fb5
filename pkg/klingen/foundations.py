#!/usr/bin/env python3
"""Exact integer/rational number theory shared by every other module."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd, isqrt
from typing import Dict, List, Tuple

from sympy import factorint, jacobi_symbol


_BERNOULLI_TABLE: List[Fraction] = [Fraction(1)]


def bernoulli(n: int) -> Fraction:
    """Return B_n with the convention B_1 = -1/2.

    Uses the recurrence sum_{j<=n} C(n+1, j) B_j = 0 and keeps a growing
    table, so repeated calls for increasing n stay linear in new work.
    """
    if n < 0:
        raise ValueError(f"Bernoulli index must be >= 0, got {n}")
    if n >= 3 and n % 2 == 1:
        return Fraction(0)
    table = _BERNOULLI_TABLE
    for m in range(len(table), n + 1):
        if m >= 3 and m % 2 == 1:
            table.append(Fraction(0))
            continue
        total = Fraction(0)
        for j in range(m):
            if table[j]:
                total += comb(m + 1, j) * table[j]
        table.append(-total / (m + 1))
    return table[n]


def zeta_neg_odd(k: int) -> Fraction:
    """zeta(1 - k) = -B_k / k for even k >= 2."""
    if k < 2 or k % 2 != 0:
        raise ValueError(f"zeta(1-k) is only provided for even k >= 2, got k={k}")
    return -bernoulli(k) / k


@lru_cache(maxsize=4096)
def _factor(n: int) -> Tuple[Tuple[int, int], ...]:
    return tuple(sorted(factorint(n).items()))


def factorization(n: int) -> Dict[int, int]:
    if n < 1:
        raise ValueError(f"factorization needs a positive integer, got {n}")
    return dict(_factor(n))


def prime_divisors(n: int) -> List[int]:
    return [p for p, _e in _factor(abs(n))] if n else []


def divisor_sum(k: int, n: int) -> int:
    """sigma_k(n) = sum of d^k over the positive divisors d of n."""
    if n < 1:
        raise ValueError(f"divisor_sum needs n >= 1, got {n}")
    if k < 0:
        raise ValueError(f"divisor_sum needs k >= 0, got {k}")
    total = 1
    for p, e in _factor(n):
        if k == 0:
            total *= e + 1
        else:
            pk = p**k
            total *= (pk ** (e + 1) - 1) // (pk - 1)
    return total


def divisor_count(n: int) -> int:
    return divisor_sum(0, n)


def divisors(n: int) -> List[int]:
    found = [1]
    for p, e in _factor(n):
        found = [d * p**i for d in found for i in range(e + 1)]
    return sorted(found)


def squarefree_decomposition(n: int) -> Tuple[int, int]:
    """Write n = f^2 * s with s squarefree; returns (f, s)."""
    if n < 1:
        raise ValueError(f"squarefree_decomposition needs n >= 1, got {n}")
    f, s = 1, 1
    for p, e in _factor(n):
        f *= p ** (e // 2)
        if e % 2:
            s *= p
    return f, s


def is_discriminant(D: int) -> bool:
    return D % 4 in (0, 1) and D != 0


def is_fundamental_discriminant(D: int) -> bool:
    if D == 1 or not is_discriminant(D):
        return False
    if D % 4 == 1:
        return squarefree_decomposition(abs(D))[0] == 1
    m = D // 4
    if m % 4 not in (2, 3):
        return False
    return squarefree_decomposition(abs(m))[0] == 1


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for a discriminant D."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    sign = 1
    if n < 0:
        n = -n
        if D < 0:
            sign = -1
    twos = 0
    while n % 2 == 0:
        n //= 2
        twos += 1
    if twos:
        if D % 2 == 0:
            return 0
        if D % 8 in (3, 5) and twos % 2 == 1:
            sign = -sign
    if n == 1:
        return sign
    return sign * int(jacobi_symbol(D % n, n))


@dataclass(frozen=True)
class DirichletKronecker:
    """The real character n -> (D/n) attached to a discriminant D."""

    discriminant: int

    def __post_init__(self) -> None:
        if not is_discriminant(self.discriminant):
            raise ValueError(f"{self.discriminant} is not a discriminant (must be 0 or 1 mod 4)")

    @property
    def modulus(self) -> int:
        return abs(self.discriminant)

    @property
    def parity(self) -> int:
        """chi(-1): -1 for odd characters, +1 for even ones."""
        return -1 if self.discriminant < 0 else 1

    def __call__(self, n: int) -> int:
        return kronecker(self.discriminant, n)

    def table(self) -> List[int]:
        """Values chi(0), ..., chi(|D| - 1); chi is periodic mod |D|."""
        return [self(a) for a in range(self.modulus)]


def complete_coprime_pair(c: int, d: int) -> Tuple[int, int]:
    """Return (a, b) with a*d - b*c = 1.

    Normalisation: 0 <= a < |c| when c != 0; (d, 0) when c == 0; (0, -c)
    when d == 0. The pair is unique under this rule.
    """
    if gcd(c, d) != 1:
        raise ValueError(f"({c}, {d}) is not a coprime pair")
    if c == 0:
        return d, 0
    if d == 0:
        return 0, -c
    modulus = abs(c)
    a = pow(d, -1, modulus) if modulus > 1 else 0
    b, remainder = divmod(a * d - 1, c)
    if remainder:
        raise RuntimeError(f"internal error completing ({c}, {d})")
    return a, b


def bernoulli_polynomial(n: int, x: Fraction) -> Fraction:
    return sum(
        (comb(n, j) * bernoulli(j) * x ** (n - j) for j in range(n + 1)),
        Fraction(0),
    )


def generalized_bernoulli(chi: DirichletKronecker, n: int) -> Fraction:
    """B_{n,chi} = f^(n-1) * sum_{a=1}^{f} chi(a) B_n(a/f), f = |D|."""
    if n < 1:
        raise ValueError(f"generalized Bernoulli index must be >= 1, got {n}")
    f = chi.modulus
    if (-1) ** n * chi.parity == -1:
        return Fraction(0)
    total = Fraction(0)
    for a in range(1, f + 1):
        value = chi(a)
        if value:
            total += value * bernoulli_polynomial(n, Fraction(a, f))
    return total * Fraction(f) ** (n - 1)


def integer_sqrt_exact(n: int) -> int:
    """Return r with r*r == n, or raise."""
    r = isqrt(n)
    if r * r != n:
        raise ValueError(f"{n} is not a perfect square")
    return r
