"""
Sup, oscillation, Day and ordinal-interval norms, evaluated exactly
"""
import logging
from collections.abc import Mapping
from fractions import Fraction
from typing import Sequence

from tree_core.domain import TreeFn
from utils.exceptions import IndexOutOfRange, ParamOutOfRange
from .domain import NormValue
from .series import stabilized_sum

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
TWO_THIRDS = Fraction(2, 3)


def family_values(x, nodes=None):
    """The coordinate values of a TreeFn, an indexed family, a mapping or a sequence"""
    if isinstance(x, TreeFn):
        if nodes is None:
            return list(x.values.values())
        return [x(node) for node in nodes]
    values = x if isinstance(x, Mapping) else getattr(x, 'values', x)
    if isinstance(values, Mapping):
        if nodes is None:
            return [Fraction(v) for v in values.values()]
        return [Fraction(values.get(node, 0)) for node in nodes]
    return [Fraction(v) for v in values]


# sup and osc

def sup_squared(values) -> Fraction:
    return max((v * v for v in values), default=Fraction(0))


def osc_squared(values) -> Fraction:
    """||f||^2 + (max f - min f)^2 over the listed values only"""
    values = list(values)
    if not values:
        return Fraction(0)
    spread = max(values) - min(values)
    return sup_squared(values) + spread * spread


def elementary_norms(f, kind='sup', nodes=None) -> NormValue:
    """
    kind 'sup': max |f|. kind 'osc': osc^2 = sup^2 + (max f - min f)^2 over
    `nodes` (every tree node when f is a TreeFn and nodes is None).
    """
    if kind == 'sup':
        values = family_values(f, nodes)
        return NormValue.exact(max((abs(v) for v in values), default=Fraction(0)))
    if kind == 'osc':
        if isinstance(f, TreeFn) and nodes is None:
            nodes = f.tree.nodes
        return NormValue.from_squared(osc_squared(family_values(f, nodes)))
    raise ParamOutOfRange(f'Unknown elementary norm "{kind}". Choose from: sup, osc')


# Day

def day_squared_sorted(values) -> Fraction:
    """sum 2^-n x_(n)^2 over the decreasing rearrangement of |x|"""
    ordered = sorted((abs(Fraction(v)) for v in values), reverse=True)
    return sum((v * v / 2 ** n for n, v in enumerate(ordered, start=1)), Fraction(0))


def day_squared_recursive(values) -> Fraction:
    """
    Phi(D)^2 = sum_m 2^-m max_{t in D} [f(t)^2 / 2 + (2/3)^m Phi(D \\ t)^2],
    Phi(empty) = 0, with each m-series closed exactly.
    """
    values = [Fraction(v) for v in values if v]
    memo = {(): Fraction(0)}

    def phi(remaining):
        if remaining in memo:
            return memo[remaining]
        lines = []
        for position in range(len(remaining)):
            rest = remaining[:position] + remaining[position + 1:]
            lines.append((remaining[position] ** 2 / 2, phi(rest)))
        memo[remaining] = stabilized_sum(lines, HALF, TWO_THIRDS)
        return memo[remaining]

    # only the multiset of |values| matters
    return phi(tuple(sorted(abs(v) for v in values)))


def day_norm(x, mode='sorted') -> NormValue:
    values = family_values(x)
    if mode == 'sorted':
        square = day_squared_sorted(values)
    elif mode == 'recursive':
        square = day_squared_recursive(values)
    else:
        raise ParamOutOfRange(f'Unknown Day mode "{mode}". Choose from: sorted, recursive')
    return NormValue.from_squared(square)


# Ordinal intervals

def ordinal_table(values: Sequence) -> dict:
    """
    Phi(f, a, c)^2 for every interval [a, c] of a finite chain, bottom-up in
    interval length:
      Phi(f, a, a) = |f(a)|
      16 Phi(f, a, c)^2 = 4 sup^2 + f(a)^2 + osc^2
          + sum_m 2^-m max_{a<=b<c} [(f(b+1) - f(b))^2 + 2^-m (Phi(a,b)^2 + Phi(b+1,c)^2)]
    """
    values = [Fraction(v) for v in values]
    size = len(values)
    table = {}
    for a in range(size):
        table[(a, a)] = values[a] * values[a]
    for length in range(1, size):
        for a in range(size - length):
            c = a + length
            window = values[a:c + 1]
            lines = [
                ((values[b + 1] - values[b]) ** 2, table[(a, b)] + table[(b + 1, c)])
                for b in range(a, c)
            ]
            spread = max(window) - min(window)
            total = 4 * sup_squared(window) + values[a] ** 2 + spread * spread
            total += stabilized_sum(lines, HALF, HALF)
            table[(a, c)] = total / 16
    return table


def ordinal_squared(values: Sequence, alpha=0, gamma=None) -> Fraction:
    values = list(values)
    if not values:
        return Fraction(0)
    if gamma is None:
        gamma = len(values) - 1
    if not 0 <= alpha <= gamma < len(values):
        raise IndexOutOfRange(
            f'Interval [{alpha}, {gamma}] is outside a chain of length {len(values)}',
            witness=[alpha, gamma],
        )
    return ordinal_table(values[alpha:gamma + 1])[(0, gamma - alpha)]


def ordinal_norm(values: Sequence, alpha=0, gamma=None) -> NormValue:
    return NormValue.from_squared(ordinal_squared(values, alpha, gamma))


def chain_values(f: TreeFn, chain) -> list:
    return [f(node) for node in chain]
