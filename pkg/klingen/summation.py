#!/usr/bin/env python3
"""Correctly rounded floating-point summation with a fixed reduction order."""

from __future__ import annotations

import math
from typing import List, Sequence, Union

import numpy as np


def exact_sum(values: Union[Sequence[float], np.ndarray]) -> float:
    """Correctly rounded sum; independent of element order."""
    if isinstance(values, np.ndarray):
        return math.fsum(values.ravel().tolist())
    return math.fsum(values)


def exact_complex_sum(values: Union[Sequence[complex], np.ndarray]) -> complex:
    array = np.asarray(values, dtype=complex).ravel()
    return complex(math.fsum(array.real.tolist()), math.fsum(array.imag.tolist()))


def reduce_blocks(blocks: List[complex]) -> complex:
    """Combine per-block partial sums.

    The blocks are correctly rounded sums themselves and are combined with
    fsum, so the total is the same for any worker count or block order.
    """
    return exact_complex_sum(blocks) if blocks else 0j
