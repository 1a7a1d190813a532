"""
Custom validators for exact rational inputs
"""
import re
from fractions import Fraction

from django.core.exceptions import ValidationError


FRACTION_PATTERN = re.compile(r'^\s*-?\d+(\s*/\s*\d+)?\s*$')


def validate_fraction_string(value):
    """Validate an exact rational written as "p/q" or "p" """
    if isinstance(value, (int, Fraction)):
        return
    if not isinstance(value, str) or not FRACTION_PATTERN.match(value):
        raise ValidationError(f'Invalid rational "{value}". Expected "p/q" or an integer')
    if '/' in value and int(value.split('/')[1]) == 0:
        raise ValidationError(f'Invalid rational "{value}". Denominator is zero')


def parse_fraction(value):
    """Parse an int, Fraction or "p/q" string into a Fraction"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    validate_fraction_string(value)
    return Fraction(value.replace(' ', ''))


def format_fraction(value):
    """Render a Fraction as "p/q" (or "p" for integers)"""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f'{value.numerator}/{value.denominator}'


# Combined validators
rational_validators = [validate_fraction_string]
