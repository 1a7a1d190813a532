"""
Probe reports, mu estimates and Choquet game state
"""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from tree_core.domain import TreeFn, format_node
from utils.validators import format_fraction


def function_document(f: TreeFn) -> Dict[str, str]:
    return {format_node(node): format_fraction(value) for node, value in sorted(f.values.items())}


@dataclass
class ProbeReport:
    """
    Outcome of one probe run. Every violation carries enough to replay it:
    the seed, the sample position and the inputs.
    """
    probe: str
    seed: Optional[int] = None
    samples: int = 0
    violations: List[Dict] = field(default_factory=list)
    statistics: Dict = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add_violation(self, kind, **witness):
        self.violations.append(dict(witness, kind=kind, seed=self.seed))

    def as_document(self):
        return {
            'probe': self.probe,
            'seed': self.seed,
            'samples': self.samples,
            'passed': self.passed,
            'violations': self.violations,
            'statistics': self.statistics,
            'notes': self.notes,
        }


@dataclass
class MuEstimate:
    value: float
    certificate: TreeFn
    trace: List[float] = field(default_factory=list)
    evaluations: int = 0
    budget_exhausted: bool = False

    def as_document(self):
        return {
            'value': self.value,
            'certificate': function_document(self.certificate),
            'evaluations': self.evaluations,
            'budget_exhausted': self.budget_exhausted,
            'truncation_limited': True,
        }


@dataclass
class GameState:
    """
    Position of the Choquet game on the injection tree. `current` is the
    last injection beta played, as its tuple of values on 0..n-1; `q` is
    alpha's last neighbourhood index.
    """
    round: int = 0
    current: Tuple[int, ...] = ()
    q: int = 0
    r_list: List[int] = field(default_factory=list)
    ranges: List[frozenset] = field(default_factory=list)
    last_beta: Optional[Tuple[Tuple[int, ...], int]] = None
    trace: List[Dict] = field(default_factory=list)
    verdict: str = 'PENDING'

    def invariant_holds(self) -> bool:
        """r-list injective and disjoint from every range played so far"""
        if len(set(self.r_list)) != len(self.r_list):
            return False
        played = frozenset().union(*self.ranges)
        return not played.intersection(self.r_list)

    def as_document(self):
        return {
            'rounds': self.round,
            'verdict': self.verdict,
            'r_list': list(self.r_list),
            'final': list(self.current),
            'trace': self.trace,
        }
