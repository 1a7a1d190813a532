"""
The linear maps R, S and T into c0 families, the bump map of the smooth
partition-of-unity construction and the checks built on them
"""
import logging
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from tree_core.domain import TreeFn, format_node
from utils.exceptions import ParamOutOfRange, ShapeViolation, UnsupportedPresentation
from utils.validators import format_fraction
from weights.services import classify_points, derivation_index
from .domain import BumpResult, IndexedFamily, OperatorMatrix, TalagrandReport

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


def _touched(tree, f):
    """Nodes whose operator value can depend on f: the support and its parents"""
    nodes = set(f.support)
    nodes.update(tree.parent(node) for node in f.support if len(node) > 1)
    return nodes


# R and S

def op_R(tree, weight, f: TreeFn) -> IndexedFamily:
    """(Rf)(t) = (rho(t) - rho(t^-)) f(t)"""
    values = {node: weight.jump(tree, node) * f(node) for node in f.support}
    top = max(weight.levels(), default=Fraction(0))
    return IndexedFamily(values, shape='node', bound=top * f.sup())


def op_S(tree, weight, f: TreeFn, classification=None) -> IndexedFamily:
    """
    (Sf)(t) = delta_t / (1 + #F_t) * (f(t) - sum of f over F_t) at good t,
    0 at bad t.
    """
    if classification is None:
        classification = classify_points(tree.presentation, weight)
    values = {}
    for node in _touched(tree, f):
        point = classification[tree.class_of(node)]
        if point.is_bad:
            continue
        equal = classification.equal_successors(tree, node)
        difference = f(node) - sum((f(u) for u in equal), Fraction(0))
        if difference:
            values[node] = point.delta / (1 + len(point.equal_edges)) * difference
    return IndexedFamily(values, shape='node', bound=f.sup())


# Talagrand operators

@lru_cache(maxsize=32)
def special_partners(tree, weight):
    """
    For each node u, the nodes s with (s, u) a special pair: s = u, or s
    strictly below u on the same rho level with the successor t of s towards
    u satisfying i(t) < i(s) for the derivation index of that level set.
    """
    levels = defaultdict(list)
    for node in tree.nodes:
        levels[weight.at(tree, node)].append(node)
    index = {}
    for members in levels.values():
        index.update(derivation_index(tree, members).index)

    partners = {}
    for u in tree.nodes:
        level = weight.at(tree, u)
        found = [u]
        for s in tree.down_set(u)[:-1]:
            if weight.at(tree, s) != level:
                continue
            successor = u[:len(s) + 1]
            if index[successor] < index[s]:
                found.append(s)
        partners[u] = tuple(found)
    return partners


def op_T_special(tree, weight, f: TreeFn, classification=None) -> IndexedFamily:
    """(Tf)(s, u) = (Sf)(u) when (s, u) is a special pair, 0 otherwise"""
    if not tree.presentation.is_acyclic:
        raise UnsupportedPresentation(
            'Special pairs need finite level sets; the presentation is cyclic',
            witness=[sorted(cycle) for cycle in tree.presentation.cycles],
        )
    if tree.truncated:
        logger.warning(f'Derivation indices computed on a truncation ({len(tree.truncated)} truncated nodes)')
    s_values = op_S(tree, weight, f, classification)
    partners = special_partners(tree, weight)
    values = {}
    for u, value in s_values.values.items():
        for s in partners[u]:
            values[(s, u)] = value
    return IndexedFamily(values, shape='pair', bound=f.sup())


def _dyadic_split(tree, weight, node):
    """(t*, t~): the equal-rho successor and the other one; (None, None) at a leaf"""
    children = tree.children(node)
    if not children:
        return None, None
    level = weight.at(tree, node)
    equal = [child for child in children if weight.at(tree, child) == level]
    if len(children) != 2 or len(equal) != 1:
        raise ShapeViolation(
            f'{format_node(node)} needs two successors, exactly one on its own level; '
            f'found {len(children)} with {len(equal)} equal',
            witness=format_node(node),
        )
    other = children[1] if children[0] == equal[0] else children[0]
    return equal[0], other


def check_dyadic_shape(tree, weight):
    for node in tree.nodes:
        _dyadic_split(tree, weight, node)


def op_T_dyadic(tree, weight, f: TreeFn) -> IndexedFamily:
    """
    (Tf)(t) = (rho(t~) - rho(t)) (f(t) - f(t*)) on a dyadic tree; at a leaf
    the gap is 1 and f(t*) = 0.
    """
    check_dyadic_shape(tree, weight)
    values = {}
    for node in _touched(tree, f):
        star, tilde = _dyadic_split(tree, weight, node)
        if star is None:
            values[node] = f(node)
            continue
        gap = weight.at(tree, tilde) - weight.at(tree, node)
        values[node] = gap * (f(node) - f(star))
    return IndexedFamily(values, shape='node', bound=f.sup())


def check_talagrand(oracle, samples, name='custom') -> TalagrandReport:
    """
    For every nonzero sample f look for an index of oracle(f) with nonzero
    value sitting over a node where |f| attains its sup.
    """
    witnesses = []
    counterexamples = []
    checked = 0
    for position, f in enumerate(samples):
        if f.is_zero():
            continue
        checked += 1
        family = oracle(f)
        peak = f.sup()
        hits = [index for index in family.support if abs(f(family.anchor(index))) == peak]
        if hits:
            index = min(hits, key=family.format_index)
            witnesses.append({
                'sample': position,
                'node': format_node(family.anchor(index)),
                'index': family.format_index(index),
                'value': format_fraction(family(index)),
            })
            continue
        counterexamples.append({
            'sample': position,
            'function': {format_node(n): format_fraction(v) for n, v in sorted(f.values.items())},
            'max_points': sorted(format_node(n) for n in f.support if abs(f(n)) == peak),
        })
        logger.warning(f'{name}: no max-point witness for sample {position}')
    logger.info(f'{name}: {checked} samples, {len(counterexamples)} counterexample(s)')
    return TalagrandReport(
        oracle=name, samples=checked, witnesses=tuple(witnesses), counterexamples=tuple(counterexamples),
    )


# Matrices

OPERATORS = {
    'R': op_R,
    'S': op_S,
    'T_special': op_T_special,
    'T_dyadic': op_T_dyadic,
}


def assemble_matrix(tree, weight, ops=('R', 'S')) -> OperatorMatrix:
    """Stack the chosen node-indexed operators, one column per indicator 1_(0,u]"""
    for op in ops:
        if op not in ('R', 'S', 'T_dyadic'):
            raise ParamOutOfRange(f'Cannot assemble "{op}": only node-indexed operators R, S, T_dyadic')
    classification = classify_points(tree.presentation, weight) if 'S' in ops else None
    rows = tuple((op, node) for op in ops for node in tree.nodes)
    row_index = {row: position for position, row in enumerate(rows)}
    entries = {}
    for column, u in enumerate(tree.nodes):
        basis = TreeFn.down_indicator(tree, u)
        for op in ops:
            if op == 'S':
                family = op_S(tree, weight, basis, classification)
            else:
                family = OPERATORS[op](tree, weight, basis)
            for node, value in family.values.items():
                entries[(row_index[(op, node)], column)] = value
    return OperatorMatrix(rows=rows, columns=tree.nodes, entries=entries)


def linear_rank(matrix) -> int:
    """Exact rank over the rationals by sparse Gaussian elimination"""
    if isinstance(matrix, OperatorMatrix):
        rows = defaultdict(dict)
        for (row, column), value in matrix.entries.items():
            rows[row][column] = Fraction(value)
        pending = [row for row in rows.values() if row]
    else:
        pending = [
            {column: Fraction(value) for column, value in enumerate(row) if value}
            for row in matrix
        ]
        pending = [row for row in pending if row]

    rank = 0
    while pending:
        pivot_row = pending.pop()
        column = min(pivot_row)
        lead = pivot_row[column]
        rank += 1
        reduced = []
        for row in pending:
            factor = row.get(column)
            if factor:
                factor = factor / lead
                for key, value in pivot_row.items():
                    updated = row.get(key, Fraction(0)) - factor * value
                    if updated:
                        row[key] = updated
                    else:
                        row.pop(key, None)
            if row:
                reduced.append(row)
        pending = reduced
    return rank


def export_triplets(matrix: OperatorMatrix, path=None) -> str:
    """Sparse "row col p/q" lines; rows read op:node, columns read node"""
    lines = [f'# {matrix.shape[0]} x {matrix.shape[1]}, {len(matrix.entries)} nonzero']
    for (row, column), value in sorted(matrix.entries.items()):
        op, node = matrix.rows[row]
        lines.append(f'{op}:{format_node(node)} {format_node(matrix.columns[column])} {format_fraction(value)}')
    text = '\n'.join(lines) + '\n'
    if path is not None:
        Path(path).write_text(text)
        logger.info(f'Wrote {len(matrix.entries)} triplets to {path}')
    return text


# Bump map and reconstruction

def smooth_cutoff(x) -> Fraction:
    """0 for |x| <= 1/2, 1 for |x| >= 1, quintic smoothstep in between"""
    x = abs(Fraction(x))
    if x <= HALF:
        return Fraction(0)
    if x >= 1:
        return Fraction(1)
    s = 2 * x - 1
    return s ** 3 * (10 - 15 * s + 6 * s * s)


def bump_value(tree, f: TreeFn, node, n: int) -> Fraction:
    value = f(node)
    if not value:
        return Fraction(0)
    active = [child for child in tree.children(node) if f(child)]
    if any(f(child) == value for child in active):
        return Fraction(0)
    scale = Fraction(1, 2 ** n)
    result = scale * smooth_cutoff(value / scale)
    for child in active:
        if not result:
            break
        result *= 1 - smooth_cutoff(scale * f(child) / (f(child) - value))
    return result


def bump_map(tree, f: TreeFn, n_max: int) -> BumpResult:
    """
    (Tf)(s, n) for n <= n_max, and whether (Sf, T'f) lies in U(L) where
    (Sf)(s, n) = f(s) and T' = (||f|| / 2) T keeps ||T'f|| <= ||f|| / 2.
    """
    if n_max < 0:
        raise ParamOutOfRange(f'n_max must be >= 0, got {n_max}')
    values = {
        (node, n): bump_value(tree, f, node, n)
        for node in f.support
        for n in range(n_max + 1)
    }
    family = IndexedFamily(values, shape='node_nat', bound=Fraction(1))
    if f.is_zero():
        return BumpResult(family=family, in_u=True)

    peak = f.sup()
    scale = peak / 2
    combined = peak
    witness = None
    for index in sorted(family.support):
        candidate = abs(f(index[0])) + scale * family(index) / 2
        if candidate > combined:
            combined = candidate
        if witness is None and abs(f(index[0])) == peak:
            witness = index
    in_u = peak < combined and scale * family.sup() < combined
    return BumpResult(family=family, in_u=in_u, witness=witness)


def witness_order(tree, f: TreeFn, node) -> int:
    """Least n with (Tf)(node, n) = 2^-n; needs f(node) != f(t) for every t in node^+"""
    value = f(node)
    if not value or any(f(child) == value for child in tree.children(node)):
        raise ParamOutOfRange(f'No witness order at {format_node(node)}', witness=format_node(node))
    n = 0
    while bump_value(tree, f, node, n) != Fraction(1, 2 ** n):
        n += 1
    return n


def select_reconstruction_set(tree, f: TreeFn, epsilon):
    """
    Threshold recipe: M = maximal elements of {|f| >= epsilon}, n_t the
    witness order at t in M, delta = 2^-max(n_t), F = {(s, m): (Tf)(s, m) >= delta}.
    Returns (F, delta).
    """
    epsilon = Fraction(epsilon)
    if epsilon <= 0:
        raise ParamOutOfRange(f'epsilon must be positive, got {epsilon}')
    heavy = [node for node in f.support if abs(f(node)) >= epsilon]
    maximal = [t for t in heavy if not any(tree.less(t, other) for other in heavy)]
    if not maximal:
        return frozenset(), Fraction(1)
    top = max(witness_order(tree, f, t) for t in maximal)
    delta = Fraction(1, 2 ** top)
    chosen = frozenset(
        (node, m)
        for node in f.support
        for m in range(top + 1)
        if bump_value(tree, f, node, m) >= delta
    )
    logger.debug(f'Reconstruction set of {len(chosen)} indices at delta={format_fraction(delta)}')
    return chosen, delta


def reconstruct_RF(tree, f: TreeFn, chosen) -> TreeFn:
    """(R_F f)(s) = f(s) if s <= t for some (t, n) in F, else 0"""
    keep = set()
    for t, _ in chosen:
        tree.require(t)
        keep.update(tree.down_set(t))
    return f.restricted(keep)


# Sampling

def sample_functions(tree, count, seed, support_size=None, magnitude=4, denominator=4):
    """Seeded random nonzero rational functions with values in [-magnitude, magnitude]"""
    rng = np.random.default_rng(seed)
    size = len(tree.nodes)
    samples = []
    for _ in range(count):
        k = support_size or int(rng.integers(1, size + 1))
        k = min(k, size)
        chosen = rng.choice(size, size=k, replace=False)
        numerators = rng.integers(-magnitude * denominator, magnitude * denominator + 1, size=k)
        if not numerators.any():
            numerators[0] = denominator
        values = {
            tree.nodes[int(position)]: Fraction(int(numerator), denominator)
            for position, numerator in zip(chosen, numerators)
        }
        samples.append(TreeFn(tree, values))
    return samples


def sample_indicators(tree, count, seed):
    """Seeded random indicators 1_(0,t]"""
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(tree.nodes), size=count)
    return [TreeFn.down_indicator(tree, tree.nodes[int(p)]) for p in picks]
