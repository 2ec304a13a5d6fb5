#!/usr/bin/env python3
"""Pointwise evaluation of both sides of the Klingen pullback identity."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, gcd
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from klingen.foundations import divisors, prime_divisors
from klingen.lfunctions import THETA_COUNT_CONSTANT, LValue, dirichlet_L_exact, phi_scalar, rankin_naive, sym2_L
from klingen.qseries import QSeries
from klingen.quadforms import (
    HalfIntMatrix,
    class_key,
    disc_split,
    index_p_forms,
    lambda_set,
    reduce_singular,
    theta_array,
    theta_window_constant,
)
from klingen.summation import exact_complex_sum, exact_sum, reduce_blocks
from klingen.symplectic import CosetRep, coset_reps

TWO_PI = 2.0 * math.pi
_CHUNK = 1 << 18
_ABSOLUTE_TAIL = 1e-25

CONVENTIONS: Dict[str, str] = {
    "character": "Kronecker symbol of the fundamental discriminant -Delta(T)",
    "coefficient_bound": "|a(n)| <= sigma_0(n) n^((k-1)/2), assumed for ingested coefficients",
    "coset_completion": "top row (a, b) with a d - b c = 1 and 0 <= a < |c|",
    "imprimitive_T_rule": "A(pT) = lambda_p A(T) - p^(k-2) sum_U A(T[U]/p) - p^(2k-3) A(T/p), lambda_p = (1 + p^(k-2)) a(p)",
    "singular_T_rule": "A(T) = a(content(T)) for singular T != 0, A(0) = 0",
    "sym2_normalization": "L(s, Sym^2 f) = zeta(2s - 2k + 2) sum a(n^2) n^-s",
    "tr_index_convention": "c, d >= 1 coprime with prefactor 2",
}


@dataclass(frozen=True)
class UpperHalfPoint:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not self.y > 0:
            raise ValueError(f"points must lie in the upper half-plane, got y = {self.y}")

    @property
    def tau(self) -> complex:
        return complex(self.x, self.y)

    @classmethod
    def parse(cls, text: str) -> "UpperHalfPoint":
        """Parse 'x,y'."""
        parts = text.split(",")
        if len(parts) != 2:
            raise ValueError(f"expected a point as 'x,y', got {text!r}")
        try:
            return cls(float(parts[0]), float(parts[1]))
        except ValueError:
            raise ValueError(f"expected a point as 'x,y', got {text!r}") from None

    def __str__(self) -> str:
        return f"{self.x:g},{self.y:g}"


@dataclass(frozen=True)
class TruncationParams:
    coset_height: int = 40
    cd_bound: int = 6
    fourier_cutoff: int = 8
    qexp_order: int = 512
    grid_size: int = 8
    rankin_cutoff: int = 100000
    sym2_cutoff: int = 1000
    workers: int = 1
    prune_tol: float = 1e-22
    extraction_height: float = 1.2

    def __post_init__(self) -> None:
        for name in ("coset_height", "cd_bound", "fourier_cutoff", "qexp_order", "grid_size", "rankin_cutoff", "sym2_cutoff", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.prune_tol < 0:
            raise ValueError(f"prune_tol must be non-negative, got {self.prune_tol}")
        if self.extraction_height <= 0:
            raise ValueError(f"extraction_height must be positive, got {self.extraction_height}")

    def check_tr_order(self) -> None:
        needed = self.fourier_cutoff * (self.cd_bound**2 + 1)
        if self.qexp_order < needed:
            raise ValueError(
                f"qexp_order {self.qexp_order} is below fourier_cutoff * (cd_bound^2 + 1) = {needed}"
            )

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)


@dataclass(frozen=True)
class Estimate:
    """A computed value with an enclosing error bound."""

    value: complex
    bound: float

    def __add__(self, other: "Estimate") -> "Estimate":
        return Estimate(self.value + other.value, self.bound + other.bound)

    def times(self, factor: complex, factor_bound: float = 0.0) -> "Estimate":
        bound = abs(factor) * self.bound + factor_bound * (abs(self.value) + self.bound)
        return Estimate(self.value * factor, bound)


class CuspForm:
    """Floating-point evaluator for a cusp form given by its q-expansion.

    For levels 1, 2 and 3 points are first moved into the fundamental domain
    of the group generated by z -> z + 1 and the Fricke involution, using the
    Fricke eigenvalue read off a(p); other levels are summed directly.
    """

    def __init__(self, series: QSeries) -> None:
        self.series = series
        self.weight = series.weight
        self.level = series.level
        self.coeffs = series.float_coefficients()
        self.order = len(self.coeffs)
        self.fricke = self._fricke_sign()
        self.reduces = self.fricke is not None
        self.y_floor = math.sqrt(1.0 / self.level - 0.25) if self.reduces else 0.0
        self.effective_order = self._effective_order()
        self._sup: Optional[float] = None

    def _fricke_sign(self) -> Optional[int]:
        if self.level == 1:
            return 1
        if self.level not in (2, 3) or self.order <= self.level:
            return None
        ratio = -self.series[self.level] / Fraction(self.level) ** (self.weight // 2 - 1)
        if ratio in (1, -1):
            return int(ratio)
        return None

    def tail_bound(self, n: int, y: np.ndarray) -> np.ndarray:
        """sum_{m >= n} 2 m^{k/2} e^{-2 pi m y}; inf where the ratio test fails."""
        y = np.asarray(y, dtype=float)
        half = self.weight / 2.0
        r = np.exp(-TWO_PI * y)
        ratio = (1.0 + 1.0 / n) ** half * r
        with np.errstate(over="ignore", under="ignore", divide="ignore"):
            first = 2.0 * np.exp(half * math.log(n) - TWO_PI * n * y)
            bound = np.where(ratio < 1.0, first / (1.0 - np.minimum(ratio, 0.999999)), np.inf)
        return bound

    def _effective_order(self) -> int:
        if not self.reduces:
            return self.order
        for n in range(1, self.order):
            if float(self.tail_bound(n, np.array([self.y_floor]))[0]) < _ABSOLUTE_TAIL:
                return n
        return self.order

    def reduce(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Return (z', factor) with f(z) = factor * f(z')."""
        z = np.array(z, dtype=complex, copy=True).ravel()
        factor = np.ones_like(z)
        if not self.reduces:
            return z, factor
        p = float(self.level)
        k = self.weight
        scale = self.fricke * p ** (-k / 2.0)
        active = np.arange(len(z))
        while len(active):
            zs = z[active]
            zs = zs - np.round(zs.real)
            flip = p * (zs.real**2 + zs.imag**2) < 1.0 - 1e-15
            z[active] = zs
            active = active[flip]
            if not len(active):
                break
            w = -1.0 / (p * z[active])
            factor[active] *= scale * (p * w) ** k
            z[active] = w
        return z, factor

    def evaluate(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Values and absolute truncation bounds at an array of points."""
        z = np.asarray(z, dtype=complex)
        shape = z.shape
        reduced, factor = self.reduce(z)
        n = self.effective_order
        q = np.exp(2j * math.pi * reduced)
        values = np.full(reduced.shape, self.coeffs[n - 1], dtype=complex)
        for m in range(n - 2, -1, -1):
            values = values * q + self.coeffs[m]
        bounds = np.abs(factor) * self.tail_bound(n, reduced.imag)
        return (factor * values).reshape(shape), bounds.reshape(shape)

    def sup_norm(self) -> float:
        """An upper bound M_f for y^{k/2} |f(z)| over the whole upper half-plane.

        y^{k/2} |f| is invariant under the reduction group, so it suffices to
        bound it for y >= y_floor, term by term:
        sum_n |a(n)| max_{y >= y_floor} y^{k/2} e^{-2 pi n y}, with the
        Deligne-shape bound past the stored coefficients. Levels that do not
        reduce have no such floor and get inf.
        """
        if self._sup is None:
            self._sup = self._sup_bound()
        return self._sup

    def _sup_bound(self) -> float:
        if not self.reduces:
            return math.inf
        k = self.weight
        y0 = self.y_floor
        if k / (4.0 * math.pi * self.order) > y0:
            return math.inf
        n = np.arange(1, self.order, dtype=float)
        peak = np.maximum(k / (4.0 * math.pi * n), y0)
        with np.errstate(under="ignore"):
            weights = np.exp(k / 2.0 * np.log(peak) - TWO_PI * n * peak)
        head = exact_sum(np.abs(self.coeffs[1:]) * weights)
        tail = y0 ** (k / 2.0) * float(self.tail_bound(self.order, np.array([y0]))[0])
        return head + tail

    def height_bound(self, y: np.ndarray) -> np.ndarray:
        """Upper bound for |f(z)| over Im z = y, decreasing in y.

        The smaller of M_f y^{-k/2} and sum_n |a(n)| e^{-2 pi n y}.
        """
        y = np.asarray(y, dtype=float)
        head = min(self.order, 12)
        n = np.arange(1, head, dtype=float)
        with np.errstate(under="ignore", over="ignore", divide="ignore"):
            series = np.exp(-TWO_PI * np.multiply.outer(y, n)) @ np.abs(self.coeffs[1:head])
            series = series + self.tail_bound(head, y)
            polynomial = self.sup_norm() * y ** (-self.weight / 2.0)
        return np.minimum(series, polynomial)


def eval_cuspform(f: QSeries, tau: UpperHalfPoint) -> Estimate:
    values, bounds = CuspForm(f).evaluate(np.array([tau.tau]))
    return Estimate(complex(values[0]), float(bounds[0]))


def _rep_arrays(reps: Sequence[CosetRep]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    mats = np.array([r.matrix.as_tuple() for r in reps], dtype=float)
    return mats[:, 0], mats[:, 1], mats[:, 2], mats[:, 3]


def _zeta(s: float) -> float:
    return float(mpmath.zeta(s))


def _lattice_floor(tau: complex) -> float:
    """Smallest eigenvalue of the form (c, d) -> |c tau + d|^2."""
    norm = abs(tau) ** 2
    return ((norm + 1.0) - math.sqrt((norm - 1.0) ** 2 + 4.0 * tau.real**2)) / 2.0


def _lattice_tail(kappa: float, tau: complex, height: int) -> float:
    """Bound for sum |c tau + d|^{-kappa} over classes +-(c, d) with max(|c|, |d|) > height.

    A shell max(|c|, |d|) = m holds 4m classes, each with
    |c tau + d|^2 >= lambda_min m^2.
    """
    if kappa <= 2.0:
        return math.inf
    return 4.0 * _lattice_floor(tau) ** (-kappa / 2.0) * float(height) ** (2.0 - kappa) / (kappa - 2.0)


def eval_E1(s: float, k: int, level: int, tau: UpperHalfPoint, height: int, reps: Optional[Sequence[CosetRep]] = None) -> Estimate:
    """sum over Gamma_inf \\ Gamma_0(N) of |c tau + d|^{-(s+2-k)} (c tau + d)^{-k}."""
    if k <= 4 or k % 2:
        raise ValueError(f"E1 needs even k > 4, got {k}")
    if reps is None:
        reps = coset_reps(level, height)
    _a, _b, c, d = _rep_arrays(reps)
    j = c * tau.tau + d
    terms = np.abs(j) ** (-(s + 2.0 - k)) * j ** (-k)
    value = exact_complex_sum(terms)
    return Estimate(value, _lattice_tail(s + 2.0, tau.tau, height))


class KlingenCoefficients:
    """A(T, f) for a level-one eigenform, cached by GL(2,Z) class."""

    def __init__(self, f: QSeries, rankin_cutoff: int, sym2_cutoff: int) -> None:
        if f.level != 1:
            raise ValueError(
                f"Klingen Fourier coefficients are only known for level 1, got level {f.level}"
            )
        needed = max(rankin_cutoff, sym2_cutoff) + 1
        if f.order < needed:
            raise ValueError(f"eigenform order {f.order} is below the L-value cutoffs ({needed} needed)")
        self.f = f
        self.k = f.weight
        self.rankin_cutoff = rankin_cutoff
        self.sym2_cutoff = sym2_cutoff
        self.float_coeffs = f.float_coefficients()
        self._sym2: Optional[LValue] = None
        self._cache: Dict[Tuple[int, int, int], Estimate] = {}
        k = self.k
        prefactor = (-1) ** (k // 2) * mpmath.mpf(factorial(k - 1)) / factorial(2 * k - 2) * (2 * mpmath.pi) ** (k - 1)
        self.prefactor = float(prefactor)

    @property
    def sym2(self) -> LValue:
        if self._sym2 is None:
            self._sym2 = sym2_L(self.f.coeffs, self.k, 2 * self.k - 2, self.sym2_cutoff)
        return self._sym2

    def rankin(self, T: HalfIntMatrix, v: int) -> LValue:
        b = theta_array(T, v * v * self.rankin_cutoff + 1)
        return rankin_naive(
            self.float_coeffs,
            b.astype(float),
            self.k - 1,
            v,
            self.k,
            cutoff=self.rankin_cutoff,
            theta_constant=theta_window_constant(T),
        )

    def twisted_sum(self, T: HalfIntMatrix) -> Estimate:
        """sum_{v | f_T} phi_scalar(T, v) L(k-1, f x' theta_T^(v))."""
        split = disc_split(T)
        values: List[float] = []
        bound = 0.0
        for v in divisors(split.f_T):
            scalar = float(phi_scalar(split, v, self.k))
            lvalue = self.rankin(T, v)
            values.append(scalar * lvalue.value.real)
            bound += abs(scalar) * lvalue.tail_bound
        return Estimate(complex(exact_sum(values)), bound)

    def __call__(self, T: HalfIntMatrix) -> Estimate:
        if not T.is_semidefinite():
            raise ValueError(f"{T} is not positive semidefinite")
        key = class_key(T)
        if key not in self._cache:
            self._cache[key] = self._compute(T)
        return self._cache[key]

    def _compute(self, T: HalfIntMatrix) -> Estimate:
        if T.is_zero():
            return Estimate(0j, 0.0)
        if T.is_singular():
            m = reduce_singular(T)
            if m >= self.f.order:
                raise ValueError(f"a({m}) is beyond the stored order {self.f.order}")
            return Estimate(complex(float(self.f[m])), 0.0)
        if T.content > 1:
            return self._imprimitive(T)
        split = disc_split(T)
        delta = split.Delta_T
        k = self.k
        scale = self.prefactor * float(mpmath.mpf(delta) ** (k - 2) * mpmath.sqrt(delta))
        chi_value = float(dirichlet_L_exact(-delta, k - 1))
        sym2 = self.sym2
        s_val = sym2.value.real
        if sym2.tail_bound >= abs(s_val):
            raise RuntimeError("symmetric square L-value bound exceeds the value; raise sym2_cutoff")
        twisted = self.twisted_sum(T)
        outer = scale * chi_value
        value = outer * twisted.value.real / s_val
        bound = abs(outer) * (
            twisted.bound / abs(s_val)
            + abs(twisted.value.real) * sym2.tail_bound / (abs(s_val) * (abs(s_val) - sym2.tail_bound))
        )
        return Estimate(complex(value), bound)

    def _imprimitive(self, T: HalfIntMatrix) -> Estimate:
        """Definite T = p T0 through the T(p) eigenvalue relation of the lift.

        lambda_p A(T0) = A(p T0) + p^(k-2) sum_U A(T0[U]/p) + p^(2k-3) A(T0/p),
        with lambda_p = (1 + p^(k-2)) a(p); the primitive formula does not
        apply once content(T) > 1.
        """
        k = self.k
        p = prime_divisors(T.content)[0]
        inner = HalfIntMatrix(T.n1 // p, T.b // p, T.n2 // p)
        eigenvalue = float((1 + p ** (k - 2)) * self.f[p])
        middle = float(p ** (k - 2))
        parts = [self(inner).times(eigenvalue)]
        parts.extend(self(S).times(-middle) for S in index_p_forms(inner, p))
        if inner.content % p == 0:
            parts.append(self(HalfIntMatrix(inner.n1 // p, inner.b // p, inner.n2 // p)).times(-float(p ** (2 * k - 3))))
        value = exact_sum([part.value.real for part in parts])
        return Estimate(complex(value), exact_sum([part.bound for part in parts]))

    def envelope_constant(self) -> float:
        """K with |A(T)| <= K det(2T)^(k-3/2) for every positive definite T.

        Primitive T: |L(k-1, chi)| <= zeta(k-1), the phi factors are at most
        (f_T/v)^(2k-3) zeta(k-1), and with |a(n)| <= sigma_0(n) n^((k-1)/2)
        and theta counts <= C sqrt(m) + 4, C <= 8 * 3^(-1/4) on a reduced form,
        the twisted L-values sum to at most
        f_T^(2k-3) (C zeta((k-2)/2)^2 zeta(2k-4) + 4 zeta((k-1)/2)^2 zeta(2k-3)).
        The T(p) relation keeps the same K for imprimitive T when k >= 6.
        """
        k = self.k
        sym2 = self.sym2
        floor = abs(sym2.value.real) - sym2.tail_bound
        if floor <= 0:
            raise RuntimeError("symmetric square L-value bound exceeds the value; raise sym2_cutoff")
        twisted = THETA_COUNT_CONSTANT * _zeta((k - 2) / 2.0) ** 2 * _zeta(2 * k - 4) + 4.0 * _zeta((k - 1) / 2.0) ** 2 * _zeta(2 * k - 3)
        return abs(self.prefactor) * _zeta(k - 1) ** 2 * twisted / floor


@lru_cache(maxsize=4)
def klingen_context(f: QSeries, rankin_cutoff: int, sym2_cutoff: int) -> KlingenCoefficients:
    """Shared coefficient context; equal series (weight, level, coefficients) share one entry."""
    return KlingenCoefficients(f, rankin_cutoff, sym2_cutoff)


def klingen_coeff(T: HalfIntMatrix, f: QSeries, rankin_cutoff: int = 100000, sym2_cutoff: int = 1000) -> Estimate:
    return klingen_context(f, rankin_cutoff, sym2_cutoff)(T)


def eval_klingen_diag(
    f: QSeries,
    tau1: UpperHalfPoint,
    tau2: UpperHalfPoint,
    cutoff: int,
    coefficients: Optional[KlingenCoefficients] = None,
    rankin_cutoff: int = 100000,
    sym2_cutoff: int = 1000,
) -> Estimate:
    """sum_{n1, n2 <= cutoff} sum_{T in Lambda(n1, n2)} A(T, f) q1^n1 q2^n2."""
    if coefficients is None:
        coefficients = klingen_context(f, rankin_cutoff, sym2_cutoff)
    k = coefficients.k
    powers1 = np.exp(2j * math.pi * np.arange(cutoff + 1) * tau1.tau)
    powers2 = np.exp(2j * math.pi * np.arange(cutoff + 1) * tau2.tau)
    terms: List[complex] = []
    bound_terms: List[float] = []
    for n1 in range(cutoff + 1):
        for n2 in range(cutoff + 1):
            q = powers1[n1] * powers2[n2]
            for T in lambda_set(n1, n2):
                A = coefficients(T)
                terms.append(A.value * q)
                bound_terms.append(A.bound * abs(q))
    value = exact_complex_sum(terms)
    tail = _klingen_tail(coefficients.envelope_constant(), k, tau1.y, tau2.y, cutoff)
    return Estimate(value, exact_sum(bound_terms) + tail)


def _power_series_tail(exponent: float, r: float, start: int) -> float:
    """Upper bound for sum_{n >= start} n^exponent r^n, 0 <= r < 1."""
    if r <= 0.0:
        return 0.0
    if r >= 1.0:
        return math.inf
    target = (1.0 + r) / 2.0
    settled = 1
    if exponent > 0:
        settled = math.ceil(1.0 / ((target / r) ** (1.0 / exponent) - 1.0))
    top = max(start, settled)
    if top - start > 10**7:
        return math.inf
    n = np.arange(start, top + 1, dtype=float)
    with np.errstate(under="ignore"):
        terms = np.exp(exponent * np.log(n) + n * math.log(r))
    # past `top` the term ratio is at most target
    return exact_sum(terms[:-1]) + float(terms[-1]) / (1.0 - target)


def _power_series_head(exponent: float, r: float, stop: int) -> float:
    if r <= 0.0:
        return 0.0
    n = np.arange(1, stop + 1, dtype=float)
    with np.errstate(under="ignore"):
        return exact_sum(np.exp(exponent * np.log(n) + n * math.log(r)))


def _split_tail(exponent: float, r1: float, r2: float, cutoff: int) -> float:
    """sum of (n1 n2)^exponent r1^n1 r2^n2 over n1, n2 >= 1 outside [1, cutoff]^2."""
    head1 = _power_series_head(exponent, r1, cutoff)
    head2 = _power_series_head(exponent, r2, cutoff)
    tail1 = _power_series_tail(exponent, r1, cutoff + 1)
    tail2 = _power_series_tail(exponent, r2, cutoff + 1)
    return tail1 * (head2 + tail2) + head1 * tail2


def _klingen_tail(K: float, k: int, y1: float, y2: float, cutoff: int) -> float:
    """Bound for the terms with (n1, n2) outside [0, cutoff]^2.

    Lambda(n1, n2) holds at most 5 sqrt(n1 n2) definite T, each with
    |A(T)| <= K (4 n1 n2)^(k-3/2), and at most two singular T off the axes,
    each with |a(c)| <= 2 c^(k/2), c <= sqrt(n1 n2).
    """
    r1 = math.exp(-TWO_PI * y1)
    r2 = math.exp(-TWO_PI * y2)
    definite = 5.0 * K * 4.0 ** (k - 1.5) * _split_tail(k - 1.0, r1, r2, cutoff)
    off_axis = 4.0 * _split_tail(k / 4.0, r1, r2, cutoff)
    axes = 2.0 * (_power_series_tail(k / 2.0, r1, cutoff + 1) + _power_series_tail(k / 2.0, r2, cutoff + 1))
    return definite + off_axis + axes


@dataclass
class _Orbit:
    """gamma<tau>, j(gamma, tau)^-k and pruning weights over a coset list.

    Arrays are sorted by decreasing base = |j|^(-k/2) Im(tau)^(-k/4).
    """

    w: np.ndarray
    jk: np.ndarray
    base: np.ndarray
    tau: complex
    height: int

    @classmethod
    def build(cls, reps: Sequence[CosetRep], tau: complex, k: int, height: int) -> "_Orbit":
        a, b, c, d = _rep_arrays(reps)
        j = c * tau + d
        w = (a * tau + b) / j
        absj = np.abs(j)
        base = absj ** (-k / 2.0) * tau.imag ** (-k / 4.0)
        order = np.argsort(-base, kind="stable")
        return cls(w[order], j[order] ** (-k), base[order], tau, height)


@dataclass(frozen=True)
class _Profile:
    """Bounds for sum_gamma |j|^-k F(n^2 Im gamma<tau>)^theta on one side of the T_r sum.

    per_index[n - 1] covers kept representatives for n <= len(per_index),
    beyond covers kept representatives for larger n, and omitted covers
    representatives past the coset height for every n >= 1.
    """

    per_index: np.ndarray
    beyond: float
    omitted: float

    @classmethod
    def build(cls, orbit: _Orbit, profile: np.ndarray, theta: float, k: int, sup: float) -> "_Profile":
        depth = profile.shape[0]
        weight = np.abs(orbit.jk)
        with np.errstate(over="ignore", under="ignore"):
            per_index = profile**theta @ weight
        exponent = k * theta
        if exponent <= 1.0:
            return cls(per_index, math.inf, math.inf)
        y = orbit.tau.imag
        scale = sup**theta
        moment = exact_sum(weight * orbit.w.imag ** (-exponent / 2.0))
        beyond = scale * moment * float(depth) ** (1.0 - exponent) / (exponent - 1.0)
        lattice = _lattice_tail(k * (1.0 - theta), orbit.tau, orbit.height)
        omitted = _product(scale * _zeta(exponent) * y ** (-exponent / 2.0), lattice)
        return cls(per_index, beyond, omitted)

    def kept_upto(self, n: int) -> float:
        return exact_sum(self.per_index[:n])

    def kept_above(self, n: int) -> float:
        return exact_sum(self.per_index[n:]) + self.beyond

    @property
    def kept(self) -> float:
        return exact_sum(self.per_index) + self.beyond


def _product(a: float, b: float) -> float:
    return 0.0 if a == 0.0 or b == 0.0 else a * b


_SPLITS = (0.25, 0.375, 0.5, 0.625, 0.75)
_PROFILE_DEPTH = 32


@dataclass
class BlockResult:
    c: int
    d: int
    value: complex
    pruned: float
    pairs: int


class PullbackSum:
    """The T_r part of the pullback: 2 sum_{c,d >= 1} sum_{g1, g2} j^-k j^-k f(d^2 g1<t1> + c^2 g2<t2>).

    Pairs (g1, g2) whose bound |j1|^-k |j2|^-k M_f Im(w)^(-k/2) falls below
    prune_tol are skipped and their bound mass is reported; M_f bounds
    y^(k/2) |f| over the upper half-plane. Each (c, d) block is an
    independent task and blocks are reduced with fsum, so the value does not
    depend on workers.
    """

    def __init__(
        self,
        f: QSeries,
        params: TruncationParams,
        reps1: Sequence[CosetRep],
        reps2: Sequence[CosetRep],
    ) -> None:
        self.form = CuspForm(f)
        self.k = f.weight
        self.params = params
        self.reps1 = list(reps1)
        self.reps2 = list(reps2)
        self.sup = self.form.sup_norm()
        self.pairs = sorted(
            ((c, d) for c in range(1, params.cd_bound + 1) for d in range(1, params.cd_bound + 1) if gcd(c, d) == 1),
            key=lambda cd: (max(cd), cd[0], cd[1]),
        )

    @classmethod
    def siegel(cls, f: QSeries, params: TruncationParams, level: int) -> "PullbackSum":
        reps = coset_reps(level, params.coset_height)
        return cls(f, params, reps, reps)

    @classmethod
    def paramodular(cls, f: QSeries, params: TruncationParams, level: int) -> "PullbackSum":
        return cls(f, params, coset_reps(1, params.coset_height), coset_reps(level * level, params.coset_height))

    def _block(self, orbit1: _Orbit, orbit2: _Orbit, c: int, d: int) -> BlockResult:
        k = self.k
        scale = self.sup * 2.0 ** (-k / 2.0)
        u = orbit1.base * float(d) ** (-k / 2.0)
        v = orbit2.base * float(c) ** (-k / 2.0)
        if self.params.prune_tol > 0 and math.isfinite(scale):
            thresholds = self.params.prune_tol / (scale * u)
            counts = np.searchsorted(-v, -thresholds, side="right")
        else:
            counts = np.full(len(u), len(v))
        suffix = np.concatenate((np.cumsum(v[::-1])[::-1], [0.0]))
        pruned = scale * float(np.sum(u * suffix[counts])) if math.isfinite(scale) else 0.0
        total = int(np.sum(counts))
        rows = np.repeat(np.arange(len(u)), counts)
        starts = np.cumsum(counts) - counts
        cols = np.arange(total) - np.repeat(starts, counts)
        partials: List[complex] = []
        for lo in range(0, total, _CHUNK):
            i = rows[lo : lo + _CHUNK]
            j = cols[lo : lo + _CHUNK]
            argument = float(d * d) * orbit1.w[i] + float(c * c) * orbit2.w[j]
            values, bounds = self.form.evaluate(argument)
            weights = orbit1.jk[i] * orbit2.jk[j]
            partials.append(exact_complex_sum(weights * values))
            pruned += float(np.sum(np.abs(weights) * bounds))
        return BlockResult(c, d, 2.0 * reduce_blocks(partials), 2.0 * pruned, total)

    def _orbits(self, tau1: UpperHalfPoint, tau2: UpperHalfPoint) -> Tuple[_Orbit, _Orbit]:
        height = self.params.coset_height
        return _Orbit.build(self.reps1, tau1.tau, self.k, height), _Orbit.build(self.reps2, tau2.tau, self.k, height)

    def _run(self, orbit1: _Orbit, orbit2: _Orbit) -> List[BlockResult]:
        if self.params.workers == 1:
            return [self._block(orbit1, orbit2, c, d) for c, d in self.pairs]
        with ThreadPoolExecutor(max_workers=self.params.workers) as pool:
            return list(pool.map(lambda cd: self._block(orbit1, orbit2, cd[0], cd[1]), self.pairs))

    def blocks(self, tau1: UpperHalfPoint, tau2: UpperHalfPoint) -> List[BlockResult]:
        return self._run(*self._orbits(tau1, tau2))

    def __call__(self, tau1: UpperHalfPoint, tau2: UpperHalfPoint) -> Estimate:
        orbit1, orbit2 = self._orbits(tau1, tau2)
        results = self._run(orbit1, orbit2)
        value = reduce_blocks([r.value for r in results])
        pruned = exact_sum([r.pruned for r in results])
        return Estimate(value, pruned + self._tail(orbit1, orbit2))

    def _profile(self, orbit: _Orbit) -> np.ndarray:
        depth = self.params.cd_bound + _PROFILE_DEPTH
        n = np.arange(1, depth + 1, dtype=float)
        return self.form.height_bound(np.multiply.outer(n * n, orbit.w.imag))

    def _tail(self, orbit1: _Orbit, orbit2: _Orbit) -> float:
        """Bound for every term the blocks leave out.

        With Im w = d^2 y1' + c^2 y2' and F = CuspForm.height_bound decreasing,
        |f(w)| <= F(d^2 y1')^theta F(c^2 y2')^(1 - theta) for any theta in
        [0, 1], which separates the sum over the two orbits. The omitted terms
        split into four disjoint regions; each takes its best theta.
        """
        k = self.k
        C = self.params.cd_bound
        profile1, profile2 = self._profile(orbit1), self._profile(orbit2)
        regions = [math.inf] * 4
        for theta in _SPLITS:
            side1 = _Profile.build(orbit1, profile1, theta, k, self.sup)
            side2 = _Profile.build(orbit2, profile2, 1.0 - theta, k, self.sup)
            candidates = (
                _product(side1.omitted, side2.kept + side2.omitted),
                _product(side1.kept, side2.omitted),
                _product(side1.kept_above(C), side2.kept),
                _product(side1.kept_upto(C), side2.kept_above(C)),
            )
            regions = [min(best, candidate) for best, candidate in zip(regions, candidates)]
        return 2.0 * exact_sum(regions)


def _pullback_rhs(sum_tr: PullbackSum, f: QSeries, e1_level: int, tau1: UpperHalfPoint, tau2: UpperHalfPoint) -> Estimate:
    params = sum_tr.params
    k = f.weight
    form = sum_tr.form
    values, bounds = form.evaluate(np.array([tau1.tau, tau2.tau]))
    f1 = Estimate(complex(values[0]), float(bounds[0]))
    f2 = Estimate(complex(values[1]), float(bounds[1]))
    e1 = eval_E1(k - 2, k, e1_level, tau1, params.coset_height)
    e2 = eval_E1(k - 2, k, e1_level, tau2, params.coset_height)
    first = e1.times(f2.value, f2.bound)
    second = e2.times(f1.value, f1.bound)
    tr = sum_tr(tau1, tau2)
    value = reduce_blocks([first.value, second.value, tr.value])
    return Estimate(value, first.bound + second.bound + tr.bound)


def eval_pullback_rhs(f: QSeries, level: int, tau1: UpperHalfPoint, tau2: UpperHalfPoint, params: TruncationParams, sum_tr: Optional[PullbackSum] = None) -> Estimate:
    """E1(tau1) f(tau2) + E1(tau2) f(tau1) + T_r(tau1, tau2) at s = k - 2."""
    _check_weight(f.weight)
    if sum_tr is None:
        sum_tr = PullbackSum.siegel(f, params, level)
    return _pullback_rhs(sum_tr, f, level, tau1, tau2)


def eval_pullback_rhs_para(f: QSeries, level: int, tau1: UpperHalfPoint, tau2: UpperHalfPoint, params: TruncationParams, sum_tr: Optional[PullbackSum] = None) -> Estimate:
    """Paramodular right-hand side: E1 of level N^2, g1 over SL(2,Z), g2 over Gamma_0(N^2)."""
    _check_weight(f.weight)
    if sum_tr is None:
        sum_tr = PullbackSum.paramodular(f, params, level)
    return _pullback_rhs(sum_tr, f, level * level, tau1, tau2)


def _check_weight(k: int) -> None:
    if k <= 4 or k % 2:
        raise ValueError(f"the pullback sums need even weight k > 4, got {k}")


@dataclass(frozen=True)
class ExtractedCoefficient:
    value: float
    imag: float
    error: float
    grid_size: int
    height: float


def extract_Af(
    f: QSeries,
    n1: int,
    n2: int,
    params: TruncationParams,
    sum_tr: Optional[PullbackSum] = None,
    level: int = 1,
) -> ExtractedCoefficient:
    """Fourier coefficient of T_r at q1^n1 q2^n2 by a G x G DFT at height Y."""
    G = params.grid_size
    if n1 < 0 or n2 < 0:
        raise ValueError(f"Fourier indices must be non-negative, got ({n1}, {n2})")
    if G < 2 * max(n1, n2) + 2:
        raise ValueError(f"grid_size {G} is too small for ({n1}, {n2}); need >= {2 * max(n1, n2) + 2}")
    if sum_tr is None:
        sum_tr = PullbackSum.siegel(f, params, level)
    Y = params.extraction_height
    grid = np.zeros((G, G), dtype=complex)
    worst = 0.0
    for i in range(G):
        for j in range(G):
            estimate = sum_tr(UpperHalfPoint(i / G, Y), UpperHalfPoint(j / G, Y))
            grid[i, j] = estimate.value
            worst = max(worst, estimate.bound)
    spectrum = np.fft.fft2(grid) / (G * G)
    growth = math.exp(TWO_PI * (n1 + n2) * Y)
    coefficient = complex(spectrum[n1 % G, n2 % G]) * growth
    k = f.weight
    reference = max(abs(coefficient), 1.0)
    alias_shape = ((n1 + G) * (n2 + G) / (max(n1, 1) * max(n2, 1))) ** (k - 1)
    aliasing = math.exp(-TWO_PI * G * Y) * reference * alias_shape
    return ExtractedCoefficient(coefficient.real, coefficient.imag, aliasing + worst * growth, G, Y)
