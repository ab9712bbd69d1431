"""Scalar helpers shared by the planners."""

import math

# a ratio within this relative distance of an integer is treated as that integer
INTEGER_NUDGE = 1e-13


def ceil_guarded(x: float) -> int:
    """Ceiling that ignores floating-point overshoot just above an integer."""
    nearest = round(x)
    if nearest < x <= nearest + INTEGER_NUDGE * max(1.0, abs(x)):
        return int(nearest)
    return math.ceil(x)


def floor_guarded(x: float) -> int:
    """Floor that ignores floating-point undershoot just below an integer."""
    nearest = round(x)
    if nearest - INTEGER_NUDGE * max(1.0, abs(x)) <= x < nearest:
        return int(nearest)
    return math.floor(x)


def power(base: float, k: int) -> float:
    """base**k for a non-negative integer k; 0**0 is 1."""
    if k < 0:
        raise ValueError(f"exponent must be non-negative, got {k!r}")
    # one pow call; delta = lambda**m built the same way then sits exactly on the boundary
    return base**k


def xlogx_inv(x: float) -> float:
    """x ln(1/x), continuous at 0."""
    if x == 0.0:
        return 0.0
    return -x * math.log(x)


def xlogx_inv_near_one(x: float, gap: float) -> float:
    """x ln(1/x) for x = 1 - gap, taken from whichever of x and gap is accurate.

    Close to 1 the gap carries the information (1 - gap rounds it away), so
    the logarithm goes through log1p.
    """
    if gap < 0.5:
        return -(1.0 - gap) * math.log1p(-gap)
    return xlogx_inv(x)
