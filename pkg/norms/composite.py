"""
Norms assembled from families of functionals: the LUR combination, the
composite LUR and MLUR norms, the strictly convex injection norm and the
dual norm on l1(T).
"""
import logging
from fractions import Fraction
from itertools import combinations, product

from tree_core.domain import TreeFn
from utils.exceptions import SizeBudgetExceeded
from utils.rational import renormlab_setting
from weights.services import classify_points
from operators.domain import IndexedFamily
from operators.services import op_R, op_S
from .domain import NormOracle, NormValue
from .elementary import chain_values, day_squared_sorted, family_values, ordinal_squared, osc_squared, sup_squared
from .series import stabilized_sum

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _squared_of(oracle):
    return oracle.squared if isinstance(oracle, NormOracle) else oracle


def lur_theta(base_squared, pairs) -> Fraction:
    """base^2 + sum_m 2^-m max_F [phi_F^2 + 2^-m psi_F^2]"""
    return Fraction(base_squared) + stabilized_sum(pairs, HALF, HALF)


def combine_lur(base, families, name='combine_lur') -> NormOracle:
    """
    base: a NormOracle or a callable f -> ||f||^2.
    families: (phi_squared, psi_squared) callable pairs.
    """
    base_squared = _squared_of(base)
    families = list(families)

    def squared(f):
        return lur_theta(base_squared(f), [(phi(f), psi(f)) for phi, psi in families])

    return NormOracle(name, squared)


def _index_set(tree, setting, norm):
    cap = renormlab_setting(setting)
    if len(tree) > cap:
        raise SizeBudgetExceeded(
            f'{norm} indexes its families by tree nodes; limit {cap}, tree has {len(tree)}',
            witness={'budget': cap, 'nodes': len(tree)},
        )
    return tree.nodes


def _outside_squared(f: TreeFn, covered) -> Fraction:
    return sup_squared(v for node, v in f.values.items() if node not in covered)


# Composite LUR

def composite_lur(tree, weight, classification=None) -> NormOracle:
    """
    ||f||^2 = sum_{m <= #I} 2^-m ||f||_m^2 + 2^-#I ||f||_oo^2 with
    ||f||_m^2 = ||f||_oo^2 + theta over subsets F of I with #F = m:
      phi(F)^2 = sum_F (Sf)(i)^2
      psi(F)^2 = sup^2 of f off the union of (0, i] + sum_F ||f on (0, i]||_ord^2
    """
    index = _index_set(tree, 'LUR_INDEX_CAP', 'composite_lur')
    classification = classification or classify_points(tree.presentation, weight)
    size = len(index)

    def squared(f: TreeFn):
        s_values = op_S(tree, weight, f, classification)
        base = sup_squared(f.values.values())
        chains = {i: ordinal_squared(chain_values(f, tree.down_set(i))) for i in index}
        total = Fraction(0)
        for m in range(1, size + 1):
            pairs = []
            for chosen in combinations(index, m):
                covered = set()
                for i in chosen:
                    covered.update(tree.down_set(i))
                phi = sum((s_values(i) ** 2 for i in chosen), Fraction(0))
                psi = _outside_squared(f, covered) + sum(chains[i] for i in chosen)
                pairs.append((phi, psi))
            total += lur_theta(base, pairs) / 2 ** m
        return total + base / 2 ** size

    return NormOracle('composite_lur', squared)


# Composite MLUR

def _segment_bounds(tree, weight, node, classification):
    """
    a(t): the lowest node of the equal-rho chain ending at t.
    b(t): the first bad node above a(t) on rho(t)'s level that is comparable
    with t, or None. (0, t] together with (a(t), b(t)] is then a chain.
    """
    level = weight.at(tree, node)
    a = node
    while len(a) > 1 and weight.at(tree, tree.parent(a)) == level:
        a = tree.parent(a)
    b = None
    for other in tree.up_set(a):
        if not tree.comparable(node, other):
            continue
        if weight.at(tree, other) == level and classification.is_bad(tree, other):
            b = other
            break
    return a, b


def mlur_segments(tree, weight, classification):
    """U_t = (0, t] then the rest of (a(t), b(t)], bottom-up; V_t = [t, oo)"""
    segments = {}
    for t in tree.nodes:
        chain = list(tree.down_set(t))
        a, b = _segment_bounds(tree, weight, t, classification)
        if b is not None:
            seen = set(chain)
            chain.extend(n for n in tree.interval(a, b) if n not in seen)
        segments[t] = (tuple(chain), tree.up_set(t))
    return segments


def composite_mlur(tree, weight, classification=None) -> NormOracle:
    """
    ||f||^2 = ||f||_oo^2 + sum_{m <= #I} 2^-(m + 2^m) sum_{pi in {0,1}^m} theta(m, pi),
    theta over F with #F = m of phi(F)^2 = sum_F (Rf)^2 + (Sf)^2 and
    psi(pi, F)^2 = sup^2 off (U_F and V_F^pi) + sum_F ||f on U_t||_ord^2 + sum_F^pi osc(f on V_t)^2.
    """
    index = _index_set(tree, 'MLUR_INDEX_CAP', 'composite_mlur')
    classification = classification or classify_points(tree.presentation, weight)
    segments = mlur_segments(tree, weight, classification)
    size = len(index)

    def squared(f: TreeFn):
        r_values = op_R(tree, weight, f)
        s_values = op_S(tree, weight, f, classification)
        base = sup_squared(f.values.values())
        chain_sq = {t: ordinal_squared(chain_values(f, segments[t][0])) for t in index}
        wedge_sq = {t: osc_squared(chain_values(f, segments[t][1])) for t in index}
        total = base
        for m in range(1, size + 1):
            subsets = list(combinations(index, m))
            phis = {
                chosen: sum((r_values(t) ** 2 + s_values(t) ** 2 for t in chosen), Fraction(0))
                for chosen in subsets
            }
            thetas = Fraction(0)
            for pattern in product((0, 1), repeat=m):
                pairs = []
                for chosen in subsets:
                    picked = [t for t, bit in zip(chosen, pattern) if bit]
                    covered = set()
                    for t in chosen:
                        covered.update(segments[t][0])
                    for t in picked:
                        covered.update(segments[t][1])
                    psi = (
                        _outside_squared(f, covered)
                        + sum(chain_sq[t] for t in chosen)
                        + sum(wedge_sq[t] for t in picked)
                    )
                    pairs.append((phis[chosen], psi))
                thetas += stabilized_sum(pairs, HALF, HALF)
            total += thetas / 2 ** (m + 2 ** m)
        return total

    return NormOracle('composite_mlur', squared)


# Strictly convex norms

def injection_from_operators(tree, weight, ops=('R', 'S'), classification=None):
    """J f = (op, t) -> (op f)(t), stacking node-indexed operators"""
    classification = classification or classify_points(tree.presentation, weight)

    def inject(f: TreeFn) -> IndexedFamily:
        values = {}
        for op in ops:
            family = op_R(tree, weight, f) if op == 'R' else op_S(tree, weight, f, classification)
            values.update({(op, node): v for node, v in family.values.items()})
        return IndexedFamily(values, shape='pair', bound=None)

    return inject


def injection_sc_norm(J, name='injection_sc') -> NormOracle:
    """||f||^2 = ||f||_oo^2 + Day(Jf)^2; strictly convex once J is injective"""

    def squared(f):
        return sup_squared(family_values(f)) + day_squared_sorted(family_values(J(f)))

    return NormOracle(name, squared)


def dual_levels(tree, weight):
    """Upsilon_0 = {t: rho(t) > rho(t^-)} grouped by level, with c(q) = 2^-k by rank"""
    grouped = {}
    for node in tree.nodes:
        if weight.at(tree, node) > weight.at(tree, tree.parent(node)):
            grouped.setdefault(weight.at(tree, node), []).append(node)
    return [
        (level, Fraction(1, 2 ** rank), tuple(grouped[level]))
        for rank, level in enumerate(sorted(grouped), start=1)
    ]


def dual_sc_squared(tree, weight, xi) -> Fraction:
    values = xi.values if isinstance(xi, (TreeFn, IndexedFamily)) else {n: Fraction(v) for n, v in xi.items()}
    magnitudes = {node: abs(v) for node, v in values.items() if v}
    l1 = sum(magnitudes.values(), Fraction(0))
    total = l1 * l1 + day_squared_sorted(magnitudes.values())
    for level, coefficient, members in dual_levels(tree, weight):
        wedges = [
            sum((v for node, v in magnitudes.items() if tree.leq(s, node)), Fraction(0))
            for s in members
        ]
        total += coefficient * day_squared_sorted(wedges)
    return total


def dual_sc_norm(tree, weight, xi) -> NormValue:
    """
    ||xi||^2 = ||xi||_1^2 + Day(|xi|)^2
        + sum_q c(q) Day((||xi restricted to [s, oo)||_1) for s in Upsilon_0 on level q)^2
    """
    return NormValue.from_squared(dual_sc_squared(tree, weight, xi))


def dual_sc_oracle(tree, weight) -> NormOracle:
    return NormOracle('dual_sc', lambda xi: dual_sc_squared(tree, weight, xi))


