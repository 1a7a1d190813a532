"""
Fan functions built inside an ever-branching set of a finite truncation
"""
from fractions import Fraction

from tree_core.domain import TreeFn

HALF = Fraction(1, 2)


def split_point(tree, core, node):
    """
    Two incomparable members of the core above `node`: the first place where
    the minimal core elements above the current point stop being unique.
    Returns None at the truncation boundary.
    """
    core = set(core)
    current = node
    while True:
        above = [v for v in core if tree.less(current, v)]
        minimal = sorted(v for v in above if not any(tree.less(x, v) for x in above))
        if not minimal:
            return None
        if len(minimal) >= 2:
            return minimal[0], minimal[1]
        current = minimal[0]


def fan_function(tree, core, node, depth) -> TreeFn:
    """
    phi_u = 1/2 1_(u,u0] + 1/2 1_(u,u1] + 1/2 phi_u0 + 1/2 phi_u1,
    unrolled `depth` times (phi = 0 past the last level or the boundary).
    """
    values = {}

    def build(u, weight, remaining):
        if remaining == 0:
            return
        split = split_point(tree, core, u)
        if split is None:
            return
        for v in split:
            for w in tree.interval(u, v):
                values[w] = values.get(w, Fraction(0)) + weight * HALF
            build(v, weight * HALF, remaining - 1)

    build(node, Fraction(1), depth)
    return TreeFn(tree, values)


def fan_triple(tree, core, node, depth):
    """
    (x, y, m) with x = 1_(0,u0] + phi_u0, y = 1_(0,u1] + phi_u1 and
    m = 1_(0,u] + phi_u, so that m = (x + y) / 2 exactly.
    """
    split = split_point(tree, core, node)
    if split is None or depth < 1:
        return None
    u0, u1 = split
    x = TreeFn.down_indicator(tree, u0) + fan_function(tree, core, u0, depth - 1)
    y = TreeFn.down_indicator(tree, u1) + fan_function(tree, core, u1, depth - 1)
    middle = TreeFn.down_indicator(tree, node) + fan_function(tree, core, node, depth)
    return x, y, middle
