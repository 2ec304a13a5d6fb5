#!/usr/bin/env python3
"""Exact truncated q-expansions and the elliptic modular forms built from them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from klingen.foundations import divisor_count, factorization, zeta_neg_odd

BUILTIN_WEIGHTS = (12, 16, 18, 20, 22, 26)
SOURCE_BUILTIN = "built-in"
SOURCE_FILE = "ingested-file"
SOURCE_ETA = "eta-quotient"

Scalar = Union[int, Fraction]


class CoefficientFileError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


# Exact products go through Kronecker substitution: each coefficient list is
# packed into one big integer with fixed-width byte slots, so a single
# CPython bignum multiplication does the whole convolution.


def _pack(values: Sequence[int], slot: int) -> int:
    buffer = bytearray(len(values) * slot)
    for index, value in enumerate(values):
        if value:
            buffer[index * slot : (index + 1) * slot] = value.to_bytes(slot, "little")
    return int.from_bytes(bytes(buffer), "little")


def _unpack(value: int, slot: int, count: int) -> List[int]:
    length = max(count * slot, (value.bit_length() + 7) // 8)
    raw = value.to_bytes(length, "little")
    return [int.from_bytes(raw[i * slot : (i + 1) * slot], "little") for i in range(count)]


def convolve_integers(a: Sequence[int], b: Sequence[int], order: int) -> List[int]:
    """First `order` coefficients of the product of two integer series."""
    a = list(a[:order])
    b = list(b[:order])
    if not any(a) or not any(b):
        return [0] * order
    bound = 2 * max(abs(v) for v in a) * max(abs(v) for v in b) * min(len(a), len(b))
    slot = bound.bit_length() // 8 + 2
    a_pos = _pack([v if v > 0 else 0 for v in a], slot)
    a_neg = _pack([-v if v < 0 else 0 for v in a], slot)
    b_pos = _pack([v if v > 0 else 0 for v in b], slot)
    b_neg = _pack([-v if v < 0 else 0 for v in b], slot)
    positive = _unpack(a_pos * b_pos + a_neg * b_neg, slot, order)
    negative = _unpack(a_pos * b_neg + a_neg * b_pos, slot, order)
    return [p - n for p, n in zip(positive, negative)]


def square_integers(a: Sequence[int], order: int) -> List[int]:
    a = list(a[:order])
    if not any(a):
        return [0] * order
    bound = 2 * max(abs(v) for v in a) ** 2 * len(a)
    slot = bound.bit_length() // 8 + 2
    pos = _pack([v if v > 0 else 0 for v in a], slot)
    neg = _pack([-v if v < 0 else 0 for v in a], slot)
    positive = _unpack(pos * pos + neg * neg, slot, order)
    negative = _unpack(2 * pos * neg, slot, order)
    return [p - n for p, n in zip(positive, negative)]


def _scaled_integers(coeffs: Sequence[Fraction]) -> Tuple[List[int], int]:
    denominator = reduce(math.lcm, (c.denominator for c in coeffs), 1)
    return [c.numerator * (denominator // c.denominator) for c in coeffs], denominator


@dataclass(frozen=True)
class QSeries:
    """sum_{n < order} coeffs[n] q^n with exact rational coefficients."""

    coeffs: Tuple[Fraction, ...]
    weight: int = 0
    level: int = 1

    def __post_init__(self) -> None:
        if not self.coeffs:
            raise ValueError("a QSeries needs at least one coefficient")
        if self.level < 1:
            raise ValueError(f"level must be positive, got {self.level}")

    @classmethod
    def from_values(cls, values: Sequence[Scalar], weight: int = 0, level: int = 1) -> "QSeries":
        return cls(tuple(Fraction(v) for v in values), weight, level)

    @property
    def order(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> Fraction:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "QSeries":
        if order > self.order:
            raise ValueError(f"cannot extend a series of order {self.order} to {order}")
        return QSeries(self.coeffs[:order], self.weight, self.level)

    def __add__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        if not isinstance(other, QSeries):
            return QSeries((self.coeffs[0] + other,) + self.coeffs[1:], self.weight, self.level)
        if other.weight != self.weight:
            raise ValueError(f"cannot add weight {self.weight} and weight {other.weight} series")
        order = min(self.order, other.order)
        coeffs = tuple(x + y for x, y in zip(self.coeffs[:order], other.coeffs[:order]))
        return QSeries(coeffs, self.weight, math.lcm(self.level, other.level))

    __radd__ = __add__

    def __neg__(self) -> "QSeries":
        return QSeries(tuple(-c for c in self.coeffs), self.weight, self.level)

    def __sub__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        return self + (-other)

    def __mul__(self, other: Union["QSeries", Scalar]) -> "QSeries":
        if not isinstance(other, QSeries):
            factor = Fraction(other)
            return QSeries(tuple(c * factor for c in self.coeffs), self.weight, self.level)
        order = min(self.order, other.order)
        left, left_den = _scaled_integers(self.coeffs[:order])
        right, right_den = _scaled_integers(other.coeffs[:order])
        product = convolve_integers(left, right, order)
        denominator = left_den * right_den
        return QSeries(
            tuple(Fraction(v, denominator) for v in product),
            self.weight + other.weight,
            math.lcm(self.level, other.level),
        )

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "QSeries":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"only non-negative integer powers are supported, got {exponent!r}")
        result = one_series(self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def integer_coefficients(self) -> List[int]:
        if not self.is_integral():
            raise ValueError("series has non-integral coefficients")
        return [c.numerator for c in self.coeffs]

    def float_coefficients(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)


def one_series(order: int) -> QSeries:
    return QSeries((Fraction(1),) + (Fraction(0),) * (order - 1))


def series_add(a: QSeries, b: QSeries) -> QSeries:
    return a + b


def series_mul(a: QSeries, b: QSeries) -> QSeries:
    return a * b


def series_pow(a: QSeries, exponent: int) -> QSeries:
    return a**exponent


def _sigma_table(k: int, order: int) -> List[int]:
    table = [0] * order
    for d in range(1, order):
        dk = d**k
        for m in range(d, order, d):
            table[m] += dk
    return table


def eisenstein_qexp(k: int, order: int) -> QSeries:
    """E_k = 1 + (2 / zeta(1-k)) sum sigma_{k-1}(m) q^m."""
    if k < 4 or k % 2 != 0:
        raise ValueError(f"Eisenstein series need even weight >= 4, got {k}")
    if order < 1:
        raise ValueError(f"order must be positive, got {order}")
    constant = Fraction(2) / zeta_neg_odd(k)
    sigma = _sigma_table(k - 1, order)
    coeffs = (Fraction(1),) + tuple(constant * s for s in sigma[1:])
    return QSeries(coeffs, k, 1)


def _euler_product(m: int, order: int) -> List[int]:
    """prod_{n>=1} (1 - q^(m n)) via the pentagonal number theorem."""
    coeffs = [0] * order
    coeffs[0] = 1
    j = 1
    while True:
        first = m * j * (3 * j - 1) // 2
        second = m * j * (3 * j + 1) // 2
        if first >= order:
            break
        sign = -1 if j % 2 else 1
        coeffs[first] += sign
        if second < order:
            coeffs[second] += sign
        j += 1
    return coeffs


def _integer_power(values: List[int], exponent: int, order: int) -> List[int]:
    result = [1] + [0] * (order - 1)
    base = values
    while exponent:
        if exponent & 1:
            result = convolve_integers(result, base, order)
        exponent >>= 1
        if exponent:
            base = square_integers(base, order)
    return result


def eta_product_qexp(exponents: Dict[int, int], order: int, level: Optional[int] = None) -> QSeries:
    """prod_m eta(m z)^{r_m} for non-negative r_m whose q-shift is integral."""
    if any(r < 0 for r in exponents.values()):
        raise ValueError("only holomorphic eta products (non-negative exponents) are supported")
    shift_numerator = sum(m * r for m, r in exponents.items())
    if shift_numerator % 24:
        raise ValueError(f"eta product {exponents} has a fractional leading q-power")
    shift = shift_numerator // 24
    weight_twice = sum(exponents.values())
    if weight_twice % 2:
        raise ValueError(f"eta product {exponents} has half-integral weight")
    if shift >= order:
        return QSeries((Fraction(0),) * order, weight_twice // 2, level or 1)
    body_order = order - shift
    body = [1] + [0] * (body_order - 1)
    for m, r in sorted(exponents.items()):
        body = convolve_integers(body, _integer_power(_euler_product(m, body_order), r, body_order), body_order)
    coeffs = [0] * shift + body
    if level is None:
        level = reduce(math.lcm, exponents.keys(), 1)
    return QSeries.from_values(coeffs, weight_twice // 2, level)


def delta_qexp(order: int) -> QSeries:
    """Delta = q prod (1 - q^n)^24.

    prod (1 - q^n)^3 = sum_m (-1)^m (2m + 1) q^{m(m+1)/2} is sparse with small
    coefficients, so the 24th power is three exact squarings of it.
    """
    if order < 2:
        raise ValueError(f"delta_qexp needs order >= 2, got {order}")
    body_order = order - 1
    body = [0] * body_order
    m = 0
    while m * (m + 1) // 2 < body_order:
        body[m * (m + 1) // 2] = (-1) ** m * (2 * m + 1)
        m += 1
    for _ in range(3):
        body = square_integers(body, body_order)
    return QSeries.from_values([0] + body, 12, 1)


def level2_weight8_newform(order: int) -> QSeries:
    """(eta(z) eta(2z))^8, the newform spanning S_8(Gamma_0(2))."""
    return eta_product_qexp({1: 8, 2: 8}, order, level=2)


def eigenform(k: int, order: int) -> QSeries:
    """Normalized level-one cusp form of weight k for one-dimensional S_k."""
    if k not in BUILTIN_WEIGHTS:
        raise ValueError(
            f"no built-in eigenform of weight {k}; dim S_k must be 1 "
            f"(supported: {', '.join(map(str, BUILTIN_WEIGHTS))}); use a coefficient file"
        )
    delta = delta_qexp(order)
    if k == 12:
        return delta
    return delta * eisenstein_qexp(k - 12, order)


def hecke_apply(f: QSeries, p: int, k: int, order: Optional[int] = None) -> QSeries:
    """(T_p f)(n) = a(pn) + p^(k-1) a(n/p)."""
    if p < 2 or factorization(p) != {p: 1}:
        raise ValueError(f"{p} is not a prime")
    available = (f.order - 1) // p + 1
    if order is None:
        order = available
    if order < 1 or order > available:
        raise ValueError(
            f"T_{p} to order {order} needs coefficients up to {p * (order - 1)}, series has order {f.order}"
        )
    pk = p ** (k - 1)
    coeffs = []
    for n in range(order):
        value = f.coeffs[p * n]
        if n % p == 0:
            value += pk * f.coeffs[n // p]
        coeffs.append(value)
    return QSeries(tuple(coeffs), f.weight, f.level)


def deligne_envelope(k: int, n: int) -> float:
    """sigma_0(n) n^((k-1)/2), the coefficient envelope for weight-k eigenforms."""
    return divisor_count(n) * float(n) ** ((k - 1) / 2)


def eigen_coefficient(a: Sequence[Scalar], k: int, n: int) -> Fraction:
    """a(n) for a normalized Hecke eigenform, from a(p) with p < len(a).

    Uses multiplicativity and a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1}).
    """
    if n < 1:
        raise ValueError(f"eigen_coefficient needs n >= 1, got {n}")
    if n < len(a):
        return Fraction(a[n])
    result = Fraction(1)
    for p, e in factorization(n).items():
        if p >= len(a):
            raise ValueError(f"a({p}) is not available (have {len(a) - 1} coefficients)")
        result *= _prime_power_coefficient(Fraction(a[p]), p, e, k)
    return result


def _prime_power_coefficient(ap: Fraction, p: int, e: int, k: int) -> Fraction:
    previous, current = Fraction(1), ap
    if e == 0:
        return previous
    pk = Fraction(p) ** (k - 1)
    for _ in range(e - 1):
        previous, current = current, ap * current - pk * previous
    return current


def square_index_coefficients(a: Sequence[Scalar], k: int, cutoff: int) -> List[Fraction]:
    """[a(n^2) for n = 0..cutoff] (index 0 is 0)."""
    prime_cache: Dict[Tuple[int, int], Fraction] = {}
    values = [Fraction(0)]
    for n in range(1, cutoff + 1):
        result = Fraction(1)
        for p, e in factorization(n).items():
            key = (p, 2 * e)
            if key not in prime_cache:
                if p >= len(a):
                    raise ValueError(f"a({p}) is not available (have {len(a) - 1} coefficients)")
                prime_cache[key] = _prime_power_coefficient(Fraction(a[p]), p, 2 * e, k)
            result *= prime_cache[key]
        values.append(result)
    return values


@dataclass(frozen=True)
class EigenformSpec:
    weight: int
    level: int
    source: str = SOURCE_BUILTIN
    path: Optional[str] = None

    def __post_init__(self) -> None:
        if self.source == SOURCE_BUILTIN and (self.weight not in BUILTIN_WEIGHTS or self.level != 1):
            raise ValueError(
                f"built-in eigenforms exist only for level 1 and weights {BUILTIN_WEIGHTS}, "
                f"got weight {self.weight} level {self.level}"
            )

    def describe(self) -> str:
        where = f" from {self.path}" if self.path else ""
        return f"weight {self.weight} level {self.level} ({self.source}{where})"


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CoefficientFileError(f"{what} must be an integer, got {token!r}", line) from None


def ingest_coefficients(path: Union[str, Path]) -> Tuple[EigenformSpec, QSeries]:
    """Read a coefficient file (see references/coefficient-file-format.md)."""
    path = Path(path)
    header: Optional[Tuple[int, int, int]] = None
    values: List[Fraction] = []
    with path.open("r", encoding="utf-8") as handle:
        for line_number, raw_line in enumerate(handle, start=1):
            line = _strip_comment(raw_line)
            if not line:
                continue
            tokens = line.split()
            if header is None:
                if (
                    len(tokens) != 8
                    or tokens[0] != "weight"
                    or tokens[2] != "level"
                    or tokens[4] != "order"
                    or tokens[6] != "character"
                ):
                    raise CoefficientFileError(
                        "header must read 'weight k level N order M character trivial'", line_number
                    )
                if tokens[7] != "trivial":
                    raise CoefficientFileError(
                        f"only the trivial character is supported, got {tokens[7]!r}", line_number
                    )
                weight = _parse_int(tokens[1], "weight", line_number)
                level = _parse_int(tokens[3], "level", line_number)
                order = _parse_int(tokens[5], "order", line_number)
                if level < 1 or order < 1:
                    raise CoefficientFileError("level and order must be positive", line_number)
                header = (weight, level, order)
                continue
            if len(tokens) != 2:
                raise CoefficientFileError(f"expected 'n a(n)', got {line!r}", line_number)
            index = _parse_int(tokens[0], "index", line_number)
            expected = len(values) + 1
            if index != expected:
                raise CoefficientFileError(f"expected index {expected}, got {index}", line_number)
            if index > header[2]:
                raise CoefficientFileError(f"index {index} exceeds declared order {header[2]}", line_number)
            try:
                values.append(Fraction(tokens[1]))
            except (ValueError, ZeroDivisionError):
                raise CoefficientFileError(f"cannot parse coefficient {tokens[1]!r}", line_number) from None
    if header is None:
        raise CoefficientFileError(f"{path} has no header line")
    weight, level, order = header
    if len(values) != order:
        raise CoefficientFileError(f"declared order {order} but found {len(values)} coefficients")
    if values[0] != 1:
        raise CoefficientFileError(f"a(1) must be 1 for a normalized form, got {values[0]}")
    spec = EigenformSpec(weight=weight, level=level, source=SOURCE_FILE, path=str(path))
    return spec, QSeries((Fraction(0),) + tuple(values), weight, level)


def write_coefficients(path: Union[str, Path], series: QSeries, comment: str = "") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    order = series.order - 1
    lines = []
    if comment:
        lines.append(f"# {comment}")
    lines.append(f"weight {series.weight} level {series.level} order {order} character trivial")
    for n in range(1, order + 1):
        lines.append(f"{n} {series.coeffs[n]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
