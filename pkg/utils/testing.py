"""
Seeded and hypothesis-driven builders of small weighted trees and functions
shared by the app test suites
"""
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from tree_core.domain import TreeFn
from tree_core.services import build_presentation, explicit_tree
from weights.domain import WeightFn

STEPS = (Fraction(0), Fraction(1, 2), Fraction(1))
RHO_STEPS = (Fraction(0), Fraction(1, 4), Fraction(1, 2))
MULTIPLICITIES = ('one', 'omega')


def tree_from_parent_positions(positions):
    """positions[i] is the parent position of node i + 1; node 0 is the root"""
    parents = {'n0': None}
    for child, parent in enumerate(positions, start=1):
        parents[f'n{child}'] = f'n{parent}'
    return explicit_tree(parents)


def weight_from_steps(tree, base, steps):
    """rho(root) = base and rho(t) = rho(t^-) + step(t), steps listed in tree order"""
    rho = {}
    for node, step in zip(tree.nodes, steps):
        parent = tree.parent(node)
        if parent:
            rho[tree.class_of(node)] = rho[tree.class_of(parent)] + Fraction(step)
        else:
            rho[tree.class_of(node)] = Fraction(base)
    return WeightFn(rho)


def random_tree(rng, size):
    positions = [int(rng.integers(0, child)) for child in range(1, size)]
    return tree_from_parent_positions(positions)


def random_weight(rng, tree):
    steps = [STEPS[int(rng.integers(0, len(STEPS)))] for _ in tree.nodes]
    return weight_from_steps(tree, Fraction(1, 2), steps)


def random_weighted_tree(seed, size):
    rng = np.random.default_rng(seed)
    tree = random_tree(rng, size)
    return tree, random_weight(rng, tree)


@st.composite
def trees(draw, max_nodes=8, min_nodes=1):
    size = draw(st.integers(min_value=min_nodes, max_value=max_nodes))
    positions = [draw(st.integers(min_value=0, max_value=child - 1)) for child in range(1, size)]
    return tree_from_parent_positions(positions)


@st.composite
def weighted_trees(draw, max_nodes=8, min_nodes=1):
    tree = draw(trees(max_nodes=max_nodes, min_nodes=min_nodes))
    steps = draw(st.lists(st.sampled_from(STEPS), min_size=len(tree), max_size=len(tree)))
    return tree, weight_from_steps(tree, Fraction(1, 2), steps)


def rationals(magnitude=4, denominator=4):
    return st.integers(min_value=-magnitude * denominator, max_value=magnitude * denominator).map(
        lambda numerator: Fraction(numerator, denominator)
    )


@st.composite
def tree_functions(draw, tree, magnitude=4, denominator=4, nonzero=False):
    values = draw(st.lists(rationals(magnitude, denominator), min_size=len(tree), max_size=len(tree)))
    if nonzero and not any(values):
        values[0] = Fraction(1)
    return TreeFn.from_vector(tree, values)


@st.composite
def presentations(draw, max_classes=4):
    """
    Weighted presentations on C0..Cn-1: every class past C0 hangs off an
    earlier one, extra edges only point forward, self-loops are one-edges
    and rho never decreases with the class index.
    """
    size = draw(st.integers(min_value=1, max_value=max_classes))
    rho = [Fraction(1, 2)]
    for _ in range(1, size):
        rho.append(rho[-1] + draw(st.sampled_from(RHO_STEPS)))
    edges = {position: [] for position in range(size)}
    for child in range(1, size):
        parent = draw(st.integers(min_value=0, max_value=child - 1))
        edges[parent].append({'target': f'C{child}', 'multiplicity': draw(st.sampled_from(MULTIPLICITIES))})
    for position in range(size):
        if position + 1 < size and draw(st.booleans()):
            target = draw(st.integers(min_value=position + 1, max_value=size - 1))
            edges[position].append({'target': f'C{target}', 'multiplicity': draw(st.sampled_from(MULTIPLICITIES))})
        if draw(st.booleans()):
            edges[position].append({'target': f'C{position}', 'multiplicity': 'one'})
    presentation = build_presentation({'classes': [
        {'id': f'C{position}', 'rho': str(rho[position]), 'children': edges[position]}
        for position in range(size)
    ]})
    return presentation, WeightFn.from_presentation(presentation)
