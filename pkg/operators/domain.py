"""
Finitely supported families indexed by nodes, node pairs or node x naturals
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple

from tree_core.domain import format_node
from utils.exceptions import ShapeViolation
from utils.validators import format_fraction

SHAPES = ('node', 'pair', 'node_nat')


@dataclass(frozen=True)
class IndexedFamily:
    """
    Element of c0(T), c0(T x T) or c0(T x N) with finite support.

    Index shapes: 'node' -> NodeId, 'pair' -> (NodeId, NodeId),
    'node_nat' -> (NodeId, int).
    """
    values: Mapping = field(hash=False)
    shape: str = 'node'
    bound: Optional[Fraction] = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ShapeViolation(f"Unknown index shape '{self.shape}'", witness=self.shape)
        cleaned = {}
        for index, value in self.values.items():
            value = Fraction(value)
            if value:
                cleaned[index] = value
        object.__setattr__(self, 'values', cleaned)

    @classmethod
    def zero(cls, shape='node'):
        return cls({}, shape=shape)

    def __call__(self, index) -> Fraction:
        return self.values.get(index, Fraction(0))

    def __len__(self):
        return len(self.values)

    @property
    def support(self):
        return frozenset(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def sup(self) -> Fraction:
        return max((abs(v) for v in self.values.values()), default=Fraction(0))

    def l1(self) -> Fraction:
        return sum((abs(v) for v in self.values.values()), Fraction(0))

    def anchor(self, index):
        """The tree node an index sits over"""
        return index if self.shape == 'node' else index[0]

    def format_index(self, index) -> str:
        if self.shape == 'node':
            return format_node(index)
        if self.shape == 'pair':
            return f'({format_node(index[0])}, {format_node(index[1])})'
        return f'({format_node(index[0])}, {index[1]})'

    def as_document(self) -> Dict[str, str]:
        return {self.format_index(i): format_fraction(v) for i, v in self.values.items()}


@dataclass(frozen=True)
class OperatorMatrix:
    """Sparse rational matrix; columns are the indicators 1_(0,u] of the tree nodes"""
    rows: Tuple = ()
    columns: Tuple = ()
    entries: Mapping[Tuple[int, int], Fraction] = field(default_factory=dict, hash=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.columns)


@dataclass(frozen=True)
class TalagrandReport:
    oracle: str
    samples: int
    witnesses: Tuple[Dict, ...] = ()
    counterexamples: Tuple[Dict, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.counterexamples


@dataclass(frozen=True)
class BumpResult:
    """T f on T x {0..n_max} together with the U(L) test for the (Sf, T'f) pairing"""
    family: IndexedFamily
    in_u: bool
    witness: Optional[Tuple] = None
