"""Small argument-checking helpers used across the public API."""

from __future__ import annotations

import math

from .exceptions import DomainError


def check_probability(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or not 0.0 <= x <= 1.0:
        raise DomainError(f"{name} must be a probability in [0, 1], got {x!r}")
    return x


def check_count(n: int, name: str) -> int:
    if isinstance(n, bool) or not isinstance(n, (int,)):
        # numpy integers pass through __index__
        try:
            n = int(n.__index__())
        except AttributeError:
            raise DomainError(f"{name} must be a non-negative integer, got {n!r}") from None
    if n < 0:
        raise DomainError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def check_le(small: int, big: int, small_name: str, big_name: str) -> None:
    if small > big:
        raise DomainError(f"{small_name} ({small}) must not exceed {big_name} ({big})")


def check_gamma(gamma: float) -> float:
    gamma = float(gamma)
    if not math.isfinite(gamma) or not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie strictly inside (0, 1), got {gamma!r}")
    return gamma


def check_positive(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{name} must be positive and finite, got {x!r}")
    return x


def check_non_negative(x: float, name: str) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"{name} must be non-negative and finite, got {x!r}")
    return x
