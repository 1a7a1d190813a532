"""
Kadec renorming on finite trees.

Phi(g; s) depends only on g restricted to [s, oo), so the system is solved
per key (support inside [s, oo), s). Each key is a scalar fixed point whose
other inputs are keys with a larger s or a strictly smaller support.
"""
import logging
import math
from fractions import Fraction

import numpy as np

from tree_core.domain import ROOT, TreeFn, format_node
from utils.exceptions import NonContraction, ParamOutOfRange, SizeBudgetExceeded
from utils.rational import renormlab_setting
from weights.services import classify_points
from .domain import KadecState, NormValue
from .elementary import ordinal_squared

logger = logging.getLogger(__name__)

# Lipschitz constant of the update map in the sup metric
CONTRACTION = 1 / 8
STALL_LIMIT = 5
CLAUSE_WEIGHTS = {'sigma': 1 / 2, 'psi': 1 / 4, 'theta': 1 / 2, 'omega': 1 / 2}
TAIL_FACTOR = 2.0 ** -38
FLOAT_FACTOR = 2.0 ** -44


# Sub-solvers

def _region(tree, r):
    return tree.up_set(r)


def _feasible(tree, region, h, epsilon) -> bool:
    """Does the downward-min envelope min(h + eps, g(parent)) stay above max(0, h - eps)?"""
    envelope = {}
    for t in region:
        cap = h[t] + epsilon
        parent = tree.parent(t)
        if parent in envelope:
            cap = min(cap, envelope[parent])
        if cap < max(Fraction(0), h[t] - epsilon):
            return False
        envelope[t] = cap
    return True


def monotone_distance_value(tree, values, r, sign=1) -> Fraction:
    region = _region(tree, r)
    if not region:
        return Fraction(0)
    h = {t: sign * values(t) for t in region}
    critical = {Fraction(0)}
    for a in region:
        critical.add(-h[a])
        for t in tree.up_set(a):
            critical.add((h[t] - h[a]) / 2)
    critical = sorted(c for c in critical if c >= 0)
    low, high = 0, len(critical) - 1
    while low < high:
        middle = (low + high) // 2
        if _feasible(tree, region, h, critical[middle]):
            high = middle
        else:
            low = middle + 1
    return critical[low]


def monotone_distance(f: TreeFn, r=ROOT, sign=1) -> NormValue:
    """
    Chebyshev distance from sign*f on [r, oo) to the non-negative
    order-decreasing functions there.
    """
    if r != ROOT:
        f.tree.require(r)
    return NormValue.exact(monotone_distance_value(f.tree, f, r, sign))


def antichain_table(tree, values, r, budget):
    """best[k] = max sum of |f| over antichains of size <= k inside [r, oo)"""
    region = _region(tree, r)
    tables = {}

    def merge(left, right):
        return [max(left[i] + right[k - i] for i in range(k + 1)) for k in range(budget + 1)]

    for t in reversed(region):
        merged = [Fraction(0)] * (budget + 1)
        for child in tree.children(t):
            merged = merge(merged, tables[child])
        own = abs(values(t))
        tables[t] = [merged[0]] + [max(merged[k], own) for k in range(1, budget + 1)]

    if r != ROOT:
        return tables[r]
    combined = [Fraction(0)] * (budget + 1)
    for root in tree.minimal:
        combined = merge(combined, tables[root])
    return combined


def antichain_mean_value(tree, values, r, l) -> Fraction:
    budget = min(l, len(_region(tree, r)))
    return antichain_table(tree, values, r, budget)[budget] / l


def antichain_mean(f: TreeFn, r=ROOT, l=1) -> NormValue:
    """(1/l) max over antichains of size <= l in [r, oo) of sum |f|"""
    if l < 1:
        raise ParamOutOfRange(f'antichain_mean needs l >= 1, got {l}')
    if r != ROOT:
        f.tree.require(r)
    return NormValue.exact(antichain_mean_value(f.tree, f, r, l))


# The coupled system

class KadecSystem:
    """
    Memoized solver for Phi(g; s) where g ranges over restrictions of one
    function f. Values are floats; every key carries a certified radius.

    Sups over t run over [s, oo) and include t = s, where (s, t] is empty and
    Phi(g; t) is the unknown itself. The weight-jump clause is the exception
    and runs over (s, oo). At s = 0 (ROOT) t ranges over every node, g(0) = 0
    and no node equals s, so every clause sees the whole tree.
    """

    def __init__(self, tree, weight, f: TreeFn, classification=None, truncation=None, tolerance_bits=None):
        budget = renormlab_setting('KADEC_NODE_BUDGET')
        if len(tree) > budget:
            raise SizeBudgetExceeded(
                f'Kadec evaluation is limited to {budget} nodes, tree has {len(tree)}',
                witness={'budget': budget, 'nodes': len(tree)},
            )
        self.tree = tree
        self.weight = weight
        self.f = f
        self.classification = classification or classify_points(tree.presentation, weight)
        self.truncation = truncation or renormlab_setting('KADEC_TRUNCATION')
        self.tolerance = 2.0 ** -(tolerance_bits or renormlab_setting('KADEC_TOLERANCE_BITS'))
        self.scales = 0.5 ** np.arange(1, self.truncation + 1)
        self.pair_weights = np.outer(self.scales, self.scales)
        self.state = KadecState()
        self._ordinals = {}

    def _ordinal(self, chain_values):
        key = tuple(chain_values)
        if key not in self._ordinals:
            self._ordinals[key] = math.sqrt(ordinal_squared(key)) if key else 0.0
        return self._ordinals[key]

    def _clause(self, candidates, x):
        """sum_{m,l} 2^-m-l max_j [c_j + 2^-m (a_j + a'_j x) + 2^-l (b_j + b'_j x)]"""
        if candidates is None:
            return 0.0
        c, a0, a1, b0, b1 = candidates
        a = a0 + a1 * x
        b = b0 + b1 * x
        grid = (
            c[None, None, :]
            + self.scales[:, None, None] * a[None, None, :]
            + self.scales[None, :, None] * b[None, None, :]
        )
        return float((self.pair_weights * grid.max(axis=2)).sum())

    @staticmethod
    def _pack(rows):
        if not rows:
            return None
        return tuple(np.array(column, dtype=float) for column in zip(*rows))

    def solve(self, support: frozenset, s):
        """(Phi(f restricted to support; s), certified radius)"""
        key = (support, s)
        if key in self.state.phi:
            return self.state.phi[key], self.state.error[key]
        if not support:
            self.state.phi[key] = 0.0
            self.state.error[key] = 0.0
            return 0.0, 0.0

        tree = self.tree

        def g(node):
            return self.f(node) if node in support else Fraction(0)

        region = _region(tree, s)
        peak = float(max(abs(g(n)) for n in support))
        dependency_errors = []

        # Xi(s, t) = const + coefficient * Phi(g; s)
        xi = {}
        for t in region:
            ordinal = self._ordinal([g(n) for n in tree.interval(s, t)])
            masked = frozenset(n for n in support if not tree.comparable(n, t))
            if masked == support:
                xi[t] = (ordinal / 2, 0.5)
            else:
                value, error = self.solve(masked, s)
                dependency_errors.append(error)
                xi[t] = ((ordinal + value) / 2, 0.0)

        # Phi(g; t) for t in [s, oo): the unknown itself at t = s
        phi = {}
        for t in region:
            if t == s:
                phi[t] = (0.0, 1.0)
                continue
            above = frozenset(n for n in support if tree.leq(t, n))
            value, error = self.solve(above, t)
            dependency_errors.append(error)
            phi[t] = (value, 0.0)

        def row(head, t):
            return (head, xi[t][0], xi[t][1], phi[t][0], phi[t][1])

        at_s = g(s) if s != ROOT else Fraction(0)
        sigma, psi, theta, omega = [], [], [], []
        for t in region:
            sigma.append(row(float(abs(g(t))), t))

            reach = max([abs(at_s - g(t))] + [abs(at_s - g(t) + g(u)) for u in tree.up_set(t)])
            psi.append(row(float(reach), t))

            point = self.classification[tree.class_of(t)]
            if not point.is_bad:
                equal = self.classification.equal_successors(tree, t)
                share = 1.0 / (1 + len(point.equal_edges))
                gap = abs(g(t) - sum((g(u) for u in equal), Fraction(0)))
                theta.append((
                    float(point.delta * gap) * share,
                    share * sum(xi[u][0] for u in equal),
                    share * sum(xi[u][1] for u in equal),
                    share * sum(phi[u][0] for u in equal),
                    share * sum(phi[u][1] for u in equal),
                ))

            if t != s:
                omega.append(row(float(self.weight.jump(tree, t) * abs(g(t))), t))

        clauses = {
            'sigma': self._pack(sigma),
            'psi': self._pack(psi),
            'theta': self._pack(theta),
            'omega': self._pack(omega),
        }

        delta_plus = float(monotone_distance_value(tree, g, s, 1))
        delta_minus = float(monotone_distance_value(tree, g, s, -1))
        budget = min(self.truncation, len(region))
        best = antichain_table(tree, g, s, budget)
        antichain = sum(
            float(best[min(l, budget)] / l) * 0.5 ** l for l in range(1, self.truncation + 1)
        )
        fixed = delta_plus + delta_minus + antichain

        x = 0.0
        history = []
        stalls = 0
        while True:
            parts = {name: CLAUSE_WEIGHTS[name] * self._clause(c, x) for name, c in clauses.items()}
            updated = (fixed + sum(parts.values())) / 7
            residual = abs(updated - x)
            x = updated
            if history and history[-1] > 0 and residual >= history[-1]:
                stalls += 1
            else:
                stalls = 0
            history.append(residual)
            if stalls >= STALL_LIMIT:
                raise NonContraction(
                    f'Residual stopped shrinking at s={format_node(s)}',
                    witness={'s': format_node(s), 'residuals': history[-STALL_LIMIT - 1:]},
                )
            if residual < self.tolerance:
                break

        q = CONTRACTION
        error = (
            (TAIL_FACTOR * peak + q * max(dependency_errors, default=0.0) + FLOAT_FACTOR * peak) / (1 - q)
            + q / (1 - q) * residual
        )
        self.state.phi[key] = x
        self.state.error[key] = error
        self.state.residuals[key] = history
        self.state.iterations += len(history)
        self.state.components[key] = dict(parts, delta_plus=delta_plus, delta_minus=delta_minus, antichain=antichain)
        logger.debug(f'Phi at s={format_node(s)} on {len(support)} support nodes: {x:.12g} after {len(history)} steps')
        return x, error

    def evaluate(self) -> NormValue:
        value, error = self.solve(frozenset(self.f.support), ROOT)
        return NormValue(value=Fraction(value), error_radius=Fraction(error))


def kadec_norm(tree, weight, f: TreeFn, classification=None) -> NormValue:
    """Phi(f; 0) with a certified radius; 1/4 ||f|| <= value <= ||f|| up to that radius"""
    if f.is_zero():
        return NormValue.exact(0)
    system = KadecSystem(tree, weight, f, classification)
    result = system.evaluate()
    logger.info(
        f'Kadec norm over {len(system.state.phi)} memo keys, {system.state.iterations} iterations, '
        f'radius {float(result.error_radius):.3g}'
    )
    return result
