"""
Registry of named norms. Each factory takes (tree, weight) and returns an
oracle: calling it on a function gives a NormValue.
"""
import logging

from utils.exceptions import ParamOutOfRange
from weights.services import classify_points
from .composite import composite_lur, composite_mlur, dual_sc_oracle, injection_from_operators, injection_sc_norm
from .domain import NormOracle, NormValue
from .elementary import day_squared_recursive, day_squared_sorted, family_values, ordinal_squared, osc_squared, sup_squared
from .kadec import kadec_norm

logger = logging.getLogger(__name__)


class KadecOracle:
    """Kadec norm; values are certified floats, so there is no exact square"""
    exact = False
    name = 'kadec'

    def __init__(self, tree, weight):
        self.tree = tree
        self.weight = weight
        self.classification = classify_points(tree.presentation, weight)

    def __call__(self, f) -> NormValue:
        return kadec_norm(self.tree, self.weight, f, self.classification)

    def __repr__(self):
        return '<KadecOracle>'


def _chain_order(tree):
    """The nodes of a single chain, bottom-up"""
    if len(tree.minimal) > 1 or any(len(tree.children(node)) > 1 for node in tree.nodes):
        raise ParamOutOfRange('The ordinal norm needs a chain; this tree branches')
    return tree.nodes


def _sup(tree, weight):
    return NormOracle('sup', lambda f: sup_squared(family_values(f)))


def _osc(tree, weight):
    return NormOracle('osc', lambda f: osc_squared(family_values(f, tree.nodes)))


def _day(tree, weight, mode='sorted'):
    if mode == 'recursive':
        return NormOracle('day', lambda f: day_squared_recursive(family_values(f)))
    return NormOracle('day', lambda f: day_squared_sorted(family_values(f)))


def _ordinal(tree, weight):
    order = _chain_order(tree)
    return NormOracle('ordinal', lambda f: ordinal_squared(family_values(f, order)))


def _injection_sc(tree, weight):
    return injection_sc_norm(injection_from_operators(tree, weight))


NORM_REGISTRY = {
    'sup': _sup,
    'osc': _osc,
    'day': _day,
    'ordinal': _ordinal,
    'composite_lur': composite_lur,
    'composite_mlur': composite_mlur,
    'injection_sc': _injection_sc,
    'kadec': KadecOracle,
    'dual_sc': dual_sc_oracle,
}


def get_oracle(name, tree, weight, **options):
    try:
        factory = NORM_REGISTRY[name]
    except KeyError:
        raise ParamOutOfRange(
            f'Unknown norm "{name}". Choose from: {", ".join(sorted(NORM_REGISTRY))}',
            witness=name,
        )
    logger.debug(f'Building {name} oracle on {len(tree)} nodes')
    return factory(tree, weight, **options)
