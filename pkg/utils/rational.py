"""
Exact rational helpers shared by the norm evaluators and reports
"""
import math
from fractions import Fraction

from django.conf import settings


DEFAULTS = {
    'NODE_BUDGET': 10000,
    'KADEC_NODE_BUDGET': 20,
    'LUR_INDEX_CAP': 8,
    'MLUR_INDEX_CAP': 5,
    'KADEC_TRUNCATION': 40,
    'KADEC_TOLERANCE_BITS': 40,
    'SQRT_BITS': 64,
    'SCHEMA_VERSION': 1,
    'TOOL_VERSION': '0.1.0',
}


def renormlab_setting(key):
    """Read one key of settings.RENORMLAB, falling back to the library default"""
    configured = getattr(settings, 'RENORMLAB', {}) or {}
    return configured.get(key, DEFAULTS[key])


def certified_sqrt(square, bits=None):
    """
    Square root of a non-negative rational with a certified radius.

    Returns (value, radius) with |sqrt(square) - value| <= radius.
    Perfect rational squares come back exact with radius 0.
    """
    square = Fraction(square)
    if square < 0:
        raise ValueError(f'certified_sqrt of negative value {square}')
    if square == 0:
        return Fraction(0), Fraction(0)
    num_root = math.isqrt(square.numerator)
    den_root = math.isqrt(square.denominator)
    if num_root * num_root == square.numerator and den_root * den_root == square.denominator:
        return Fraction(num_root, den_root), Fraction(0)

    bits = bits or renormlab_setting('SQRT_BITS')
    scaled = (square.numerator << (2 * bits)) // square.denominator
    floor_root = math.isqrt(scaled)
    # sqrt(square) lies in [floor_root, floor_root + 1) / 2**bits
    value = Fraction(2 * floor_root + 1, 1 << (bits + 1))
    return value, Fraction(1, 1 << (bits + 1))


def to_dyadic(value):
    """(mantissa, exponent) with value = mantissa * 2**exponent, or None if not dyadic"""
    value = Fraction(value)
    denominator = value.denominator
    if denominator & (denominator - 1):
        return None
    exponent = -(denominator.bit_length() - 1)
    return value.numerator, exponent
