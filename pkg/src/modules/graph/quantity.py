"""Quantity arithmetic with an absorbing INFINITE sentinel."""
from typing import Final, Iterable

from src.core.exceptions import InvariantViolation, QuantityOverflowError

# Largest unsigned 64-bit value, reserved for "unbounded".
INFINITE: Final[int] = 2**64 - 1


def is_infinite(q: int) -> bool:
    return q == INFINITE


def q_add(a: int, b: int) -> int:
    if a == INFINITE or b == INFINITE:
        return INFINITE
    total = a + b
    if total >= INFINITE:
        raise QuantityOverflowError(f"quantity overflow: {a} + {b} reaches the INFINITE sentinel")
    return total


def q_sub(a: int, b: int) -> int:
    if a == INFINITE:
        return INFINITE
    if b > a:
        raise InvariantViolation(f"buffer would go negative: {a} - {b}")
    return a - b


def q_min(a: int, b: int) -> int:
    # INFINITE is numerically the largest value, so plain min() absorbs correctly.
    return a if a <= b else b


def q_sum(values: Iterable[int]) -> int:
    total = 0
    for v in values:
        total = q_add(total, v)
    return total


def fmt_quantity(q: int) -> str:
    return "inf" if q == INFINITE else str(q)
