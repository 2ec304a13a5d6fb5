#!/usr/bin/env python3
"""Half-integral binary quadratic forms T = [[n1, b/2], [b/2, n2]]."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt
from typing import List, Tuple

import numpy as np

from klingen.foundations import (
    DirichletKronecker,
    complete_coprime_pair,
    integer_sqrt_exact,
    squarefree_decomposition,
)
from klingen.symplectic import Mat2Z


@dataclass(frozen=True)
class HalfIntMatrix:
    n1: int
    b: int
    n2: int

    @property
    def det2(self) -> int:
        """det(2T) = 4 n1 n2 - b^2."""
        return 4 * self.n1 * self.n2 - self.b * self.b

    @property
    def content(self) -> int:
        return gcd(gcd(self.n1, self.b), self.n2)

    def is_zero(self) -> bool:
        return self.n1 == 0 and self.b == 0 and self.n2 == 0

    def is_semidefinite(self) -> bool:
        return self.n1 >= 0 and self.n2 >= 0 and self.det2 >= 0

    def is_positive_definite(self) -> bool:
        return self.n1 > 0 and self.det2 > 0

    def is_singular(self) -> bool:
        return self.det2 == 0

    def value(self, x: int, y: int) -> int:
        return self.n1 * x * x + self.b * x * y + self.n2 * y * y

    def swapped(self) -> "HalfIntMatrix":
        return HalfIntMatrix(self.n2, self.b, self.n1)

    def as_tuple(self) -> Tuple[int, int, int]:
        return (self.n1, self.b, self.n2)

    def __str__(self) -> str:
        return f"({self.n1}, {self.b}, {self.n2})"


@dataclass(frozen=True)
class DiscriminantSplit:
    """det(2T) = f_T^2 * Delta_T with -Delta_T a fundamental discriminant."""

    f_T: int
    Delta_T: int

    @property
    def character(self) -> DirichletKronecker:
        return DirichletKronecker(-self.Delta_T)


def lambda_set(n1: int, n2: int) -> List[HalfIntMatrix]:
    if n1 < 0 or n2 < 0:
        raise ValueError(f"lambda_set needs n1, n2 >= 0, got ({n1}, {n2})")
    bound = isqrt(4 * n1 * n2)
    return [HalfIntMatrix(n1, b, n2) for b in range(-bound, bound + 1)]


def disc_split(T: HalfIntMatrix) -> DiscriminantSplit:
    det2 = T.det2
    if det2 <= 0:
        raise ValueError(f"disc_split needs det(2T) > 0, got {det2} for T = {T}")
    f0, core = squarefree_decomposition(det2)
    if core % 4 == 3:
        return DiscriminantSplit(f0, core)
    # det(2T) is 0 or 3 mod 4, so here f0 is even and -4 * core is fundamental
    if f0 % 2:
        raise RuntimeError(f"internal error splitting det(2T) = {det2}")
    return DiscriminantSplit(f0 // 2, 4 * core)


def reduce_singular(T: HalfIntMatrix) -> int:
    """Content m with T unimodularly equivalent to diag(m, 0)."""
    if T.det2 != 0:
        raise ValueError(f"reduce_singular needs det(2T) = 0, got {T.det2} for T = {T}")
    if not T.is_semidefinite():
        raise ValueError(f"{T} is not positive semidefinite")
    return T.content


def singular_reducer(T: HalfIntMatrix) -> Mat2Z:
    """U with det U = +-1 and U^T T U = diag(m, 0) for singular T."""
    m = reduce_singular(T)
    if m == 0:
        return Mat2Z.identity()
    # T is the form m (alpha x + beta y)^2 with gcd(alpha, beta) = 1
    alpha = integer_sqrt_exact(T.n1 // m)
    beta = integer_sqrt_exact(T.n2 // m)
    if T.b < 0:
        beta = -beta
    p, q = complete_coprime_pair(-beta, alpha)
    return Mat2Z(p, beta, q, -alpha)


def lattice_transform(T: HalfIntMatrix, U: Mat2Z) -> HalfIntMatrix:
    """U^t T U for any integral U."""
    n1 = T.value(U.a, U.c)
    n2 = T.value(U.b, U.d)
    b = 2 * T.n1 * U.a * U.b + T.b * (U.a * U.d + U.b * U.c) + 2 * T.n2 * U.c * U.d
    return HalfIntMatrix(n1, b, n2)


def unimodular_transform(T: HalfIntMatrix, U: Mat2Z) -> HalfIntMatrix:
    if U.det not in (1, -1):
        raise ValueError(f"{U} is not unimodular (det {U.det})")
    return lattice_transform(T, U)


def index_p_forms(T: HalfIntMatrix, p: int) -> List[HalfIntMatrix]:
    """T[U] / p over the p + 1 sublattices U of index p, where it stays half-integral.

    These are the forms entering the degree-two Hecke operator T(p) on
    Fourier coefficients.
    """
    if p < 2:
        raise ValueError(f"index must be a prime, got {p}")
    sublattices = [Mat2Z(1, 0, alpha, p) for alpha in range(p)] + [Mat2Z(p, 0, 0, 1)]
    forms: List[HalfIntMatrix] = []
    for U in sublattices:
        image = lattice_transform(T, U)
        if image.n1 % p == 0 and image.b % p == 0 and image.n2 % p == 0:
            forms.append(HalfIntMatrix(image.n1 // p, image.b // p, image.n2 // p))
    return forms


def reduce_definite(T: HalfIntMatrix, proper: bool = True) -> Tuple[HalfIntMatrix, Mat2Z]:
    """Gauss-reduced form equivalent to T, with the transforming matrix.

    The result satisfies |b| <= n1 <= n2 and b >= 0 whenever |b| = n1 or
    n1 = n2. With proper=False the equivalence is taken over GL(2,Z) and b
    is made non-negative.
    """
    if not T.is_positive_definite():
        raise ValueError(f"reduce_definite needs a positive definite form, got {T}")
    n1, b, n2 = T.as_tuple()
    U = Mat2Z.identity()
    while True:
        if b > n1 or b <= -n1:
            t = (n1 - b) // (2 * n1)
            n2 = n1 * t * t + b * t + n2
            b = b + 2 * n1 * t
            U = U @ Mat2Z(1, t, 0, 1)
        elif n1 > n2:
            n1, b, n2 = n2, -b, n1
            U = U @ Mat2Z(0, -1, 1, 0)
        else:
            break
    if b < 0 and n1 == n2:
        n1, b, n2 = n2, -b, n1
        U = U @ Mat2Z(0, -1, 1, 0)
    if not proper and b < 0:
        b = -b
        U = U @ Mat2Z(1, 0, 0, -1)
    return HalfIntMatrix(n1, b, n2), U


def class_key(T: HalfIntMatrix) -> Tuple[int, int, int]:
    """GL(2,Z)-class invariant used to share work between equivalent forms."""
    if T.is_positive_definite():
        return reduce_definite(T, proper=False)[0].as_tuple()
    if T.is_singular() and T.is_semidefinite():
        return (reduce_singular(T), 0, 0)
    raise ValueError(f"{T} is indefinite")


@lru_cache(maxsize=8)
def _theta_table(n1: int, b: int, n2: int, order: int) -> np.ndarray:
    det2 = 4 * n1 * n2 - b * b
    top = order - 1
    chunks = []
    l_max = isqrt(4 * n1 * top // det2) + 1
    for l in range(-l_max, l_max + 1):
        room = 4 * n1 * top - det2 * l * l
        if room < 0:
            continue
        r = isqrt(room)
        lo = (-b * l - r) // (2 * n1) - 1
        hi = (-b * l + r) // (2 * n1) + 1
        m = np.arange(lo, hi + 1, dtype=np.int64)
        values = n1 * m * m + (b * l) * m + n2 * l * l
        chunks.append(values[values <= top])
    counts = np.bincount(np.concatenate(chunks), minlength=order)[:order].astype(np.int64)
    counts.flags.writeable = False
    return counts


def theta_coeffs(T: HalfIntMatrix, order: int) -> List[int]:
    """Representation numbers #{(m, l): n1 m^2 + b m l + n2 l^2 = n} for n < order."""
    return [int(x) for x in theta_array(T, order)]


def theta_array(T: HalfIntMatrix, order: int) -> np.ndarray:
    """Read-only int64 array of theta_coeffs, shared between equivalent forms."""
    if not T.is_positive_definite():
        raise ValueError(f"theta series need a positive definite form, got {T}")
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    reduced = reduce_definite(T, proper=False)[0]
    return _theta_table(reduced.n1, reduced.b, reduced.n2, order)


def theta_window_constant(T: HalfIntMatrix) -> float:
    """C_T with b_T(m) <= C_T sqrt(m) + 4.

    At most 2 sqrt(4 n1 m / det(2T)) + 1 lattice rows meet the ellipse Q = m
    and each row holds at most two solutions.
    """
    if not T.is_positive_definite():
        raise ValueError(f"theta series need a positive definite form, got {T}")
    return 4.0 * float(np.sqrt(4.0 * min(T.n1, T.n2) / T.det2))
