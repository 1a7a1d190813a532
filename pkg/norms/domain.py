"""
Norm values with certified error radii, norm oracles and the Kadec memo state
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional

from utils.rational import certified_sqrt, to_dyadic
from utils.validators import format_fraction


@dataclass(frozen=True)
class NormValue:
    """value with |true norm - value| <= error_radius; error_radius 0 means exact"""
    value: Fraction
    error_radius: Fraction = Fraction(0)
    squared: Optional[Fraction] = None

    @classmethod
    def exact(cls, value):
        value = Fraction(value)
        return cls(value=value, squared=value * value)

    @classmethod
    def from_squared(cls, square):
        square = Fraction(square)
        value, radius = certified_sqrt(square)
        return cls(value=value, error_radius=radius, squared=square)

    @property
    def is_exact(self) -> bool:
        return self.error_radius == 0

    @property
    def lower(self) -> Fraction:
        return self.value - self.error_radius

    @property
    def upper(self) -> Fraction:
        return self.value + self.error_radius

    def __float__(self):
        return float(self.value)

    def as_document(self):
        document = {
            'value': format_fraction(self.value),
            'error_radius': format_fraction(self.error_radius),
        }
        if self.squared is not None:
            document['squared'] = format_fraction(self.squared)
        dyadic = to_dyadic(self.value)
        if dyadic is not None:
            document['dyadic'] = list(dyadic)
        return document


class NormOracle:
    """A norm evaluated through an exact rational square"""
    exact = True

    def __init__(self, name, squared):
        self.name = name
        self._squared = squared

    def squared(self, f) -> Fraction:
        return Fraction(self._squared(f))

    def __call__(self, f) -> NormValue:
        return NormValue.from_squared(self.squared(f))

    def __repr__(self):
        return f'<NormOracle {self.name}>'


@dataclass
class KadecState:
    """
    Per-evaluation memo of the Kadec system, keyed by (support, s) where
    support is the part of the function's support inside [s, oo).
    """
    phi: Dict = field(default_factory=dict)
    error: Dict = field(default_factory=dict)
    components: Dict = field(default_factory=dict)
    residuals: Dict = field(default_factory=dict)
    iterations: int = 0

    def history(self, key) -> List[float]:
        return self.residuals.get(key, [])
