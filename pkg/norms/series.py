"""
Exact evaluation of sum_{m>=1} w^m max_i (a_i + r^m b_i) for finitely many
lines, by walking the upper envelope of x -> a_i + x b_i over (0, r]
"""
import math
from fractions import Fraction


def geometric_sum(ratio, first, last=None) -> Fraction:
    """sum of ratio^m for first <= m <= last (last=None for the infinite tail)"""
    ratio = Fraction(ratio)
    head = ratio ** first
    if last is None:
        return head / (1 - ratio)
    if last < first:
        return Fraction(0)
    return head * (1 - ratio ** (last - first + 1)) / (1 - ratio)


def _log(value: Fraction) -> float:
    return math.log(value.numerator) - math.log(value.denominator)


def first_power_below(rate: Fraction, bound: Fraction) -> int:
    """Least m >= 1 with rate^m <= bound, for 0 < rate < 1 and bound > 0"""
    if bound >= rate:
        return 1
    m = max(1, math.ceil(_log(bound) / _log(rate)))
    while m > 1 and rate ** (m - 1) <= bound:
        m -= 1
    while rate ** m > bound:
        m += 1
    return m


def upper_envelope(lines, right):
    """
    Pieces (x_lo, x_hi, a, b) of max_i (a_i + x b_i) on [0, right], left to
    right; at x = 0 the largest a wins, ties going to the largest b.
    """
    lines = sorted({(Fraction(a), Fraction(b)) for a, b in lines}, key=lambda line: (line[0], line[1]))
    current = max(lines)
    x = Fraction(0)
    pieces = []
    while True:
        a, b = current
        best = None
        for other_a, other_b in lines:
            if other_b <= b:
                continue
            crossing = (a - other_a) / (other_b - b)
            if crossing < x or crossing >= right:
                continue
            if best is None or crossing < best[0] or (crossing == best[0] and other_b > best[1][1]):
                best = (crossing, (other_a, other_b))
        if best is None:
            pieces.append((x, Fraction(right), a, b))
            return pieces
        if best[0] > x:
            pieces.append((x, best[0], a, b))
        x, current = best


def stabilized_sum(lines, weight, rate) -> Fraction:
    """
    sum_{m>=1} weight^m max_i (a_i + rate^m b_i), exactly. An empty family
    contributes 0.
    """
    lines = list(lines)
    if not lines:
        return Fraction(0)
    weight = Fraction(weight)
    rate = Fraction(rate)
    total = Fraction(0)
    for x_lo, x_hi, a, b in upper_envelope(lines, rate):
        # rate^m lands in (x_lo, x_hi] exactly for first <= m < stop
        first = first_power_below(rate, x_hi)
        stop = None if x_lo == 0 else first_power_below(rate, x_lo)
        last = None if stop is None else stop - 1
        if last is not None and last < first:
            continue
        total += a * geometric_sum(weight, first, last) + b * geometric_sum(weight * rate, first, last)
    return total
