"""
Weight functions on presentation classes and the classifications they induce
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Mapping, Optional, Tuple

from tree_core.domain import ROOT
from utils.exceptions import InvalidWeight


@dataclass(frozen=True)
class WeightFn:
    """rho on presentation classes, inherited by every copy; rho(root sentinel) = 0"""
    rho: Mapping[str, Fraction] = field(hash=False)
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'rho', {c: Fraction(v) for c, v in self.rho.items()})

    @classmethod
    def constant(cls, presentation, value):
        return cls({c: Fraction(value) for c in presentation.classes})

    @classmethod
    def from_presentation(cls, presentation, normalized=False):
        slots = presentation.rho_slots()
        missing = sorted(set(presentation.classes) - set(slots))
        if missing:
            raise InvalidWeight(f'Classes without rho: {", ".join(missing)}', witness=missing)
        return cls(slots, normalized=normalized)

    def __call__(self, class_id) -> Fraction:
        try:
            return self.rho[class_id]
        except KeyError:
            raise InvalidWeight(f'No rho value for class {class_id}', witness=class_id)

    def at(self, tree, node) -> Fraction:
        if node == ROOT:
            return Fraction(0)
        return self(tree.class_of(node))

    def jump(self, tree, node) -> Fraction:
        """rho(t) - rho(t^-)"""
        return self.at(tree, node) - self.at(tree, tree.parent(node))

    def levels(self) -> List[Fraction]:
        return sorted(set(self.rho.values()))


@dataclass(frozen=True)
class PointClass:
    status: str
    # edge positions of the equal-rho one-edges (F_t)
    equal_edges: Tuple[int, ...]
    delta: Fraction
    fan: bool = False

    @property
    def is_bad(self) -> bool:
        return self.status == 'bad'


@dataclass(frozen=True)
class Classification:
    points: Mapping[str, PointClass] = field(hash=False)
    weight: WeightFn = field(hash=False)

    def __getitem__(self, class_id) -> PointClass:
        return self.points[class_id]

    @property
    def bad_classes(self) -> FrozenSet[str]:
        return frozenset(c for c, point in self.points.items() if point.is_bad)

    def is_bad(self, tree, node) -> bool:
        return self.points[tree.class_of(node)].is_bad

    def delta(self, tree, node) -> Fraction:
        return self.points[tree.class_of(node)].delta

    def equal_successors(self, tree, node) -> Tuple:
        """F_t among the materialized children of a node"""
        edges = set(self.points[tree.class_of(node)].equal_edges)
        return tuple(child for child in tree.children(node) if child[-1][1] in edges)


@dataclass(frozen=True)
class WeightReport:
    valid: bool
    violations: Tuple[Dict, ...] = ()


@dataclass(frozen=True)
class DerivationIndex:
    """i_U on a finite set U together with the survival sequence U, U', U'', ..."""
    index: Mapping = field(hash=False)
    rounds: Tuple[FrozenSet, ...] = ()

    def __call__(self, node) -> int:
        return self.index[node]


@dataclass(frozen=True)
class CoreResult:
    core: FrozenSet
    derivation: Optional[DerivationIndex] = None
    unsupported: bool = False


@dataclass(frozen=True)
class Decomposition:
    pieces: Tuple[FrozenSet, ...]
    by: str = 'node'


@dataclass(frozen=True)
class Failure:
    reason: str
    witness: object = None

    def __bool__(self):
        return False


@dataclass(frozen=True)
class ConditionReport:
    theorem: str
    passed: bool
    witnesses: Tuple[Dict, ...] = ()
    notes: Tuple[str, ...] = ()
