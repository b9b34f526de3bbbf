"""Argument checks shared by the estimators and the command line."""

from __future__ import annotations

import numbers


def check_int(name, value, low=None, high=None) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise TypeError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if low is not None and value < low:
        raise ValueError(f"{name} must be >= {low}, got {value}")
    if high is not None and value > high:
        raise ValueError(f"{name} must be <= {high}, got {value}")
    return value


def check_divides(n: int, q: int) -> None:
    if q < 1 or n % q:
        raise ValueError(f"segment count q={q} must divide n={n}")


def check_seed(seed) -> int:
    return check_int("random_state", seed, 0, 2**64 - 1)


def parse_range(text: str) -> tuple[int, int]:
    """``'A..B'`` (inclusive) or a single integer."""
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        a, b = int(lo), int(hi)
    else:
        a = b = int(text)
    if a > b:
        raise ValueError(f"empty range {text!r}")
    return a, b
