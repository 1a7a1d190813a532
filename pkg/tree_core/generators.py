"""
Example trees: chains, k-ary trees, combs, the injection tree and its augmentations
"""
import logging
from itertools import permutations

from utils.exceptions import ParamOutOfRange
from .domain import ClassRecord, Edge, Multiplicity, TreePresentation
from .services import explicit_tree

logger = logging.getLogger(__name__)


def _require(condition, message):
    if not condition:
        raise ParamOutOfRange(message)


def chain(n: int) -> TreePresentation:
    """Totally ordered tree with n nodes"""
    _require(isinstance(n, int) and n >= 1, f'chain needs n >= 1, got {n}')
    classes = {}
    for position in range(n):
        children = (Edge(f'c{position + 1}'),) if position + 1 < n else ()
        classes[f'c{position}'] = ClassRecord(id=f'c{position}', children=children)
    return TreePresentation(classes=classes, roots=('c0',))


def kary(k: int, h: int = None) -> TreePresentation:
    """Full k-ary tree of height h, or of height omega (self-loop) when h is None"""
    _require(isinstance(k, int) and k >= 1, f'kary needs k >= 1, got {k}')
    if h is None:
        record = ClassRecord(id='K', children=tuple(Edge('K') for _ in range(k)))
        return TreePresentation(classes={'K': record}, roots=('K',))
    _require(isinstance(h, int) and h >= 1, f'kary needs h >= 1, got {h}')
    classes = {}
    for level in range(h):
        children = tuple(Edge(f'k{level + 1}') for _ in range(k)) if level + 1 < h else ()
        classes[f'k{level}'] = ClassRecord(id=f'k{level}', children=children)
    return TreePresentation(classes=classes, roots=('k0',))


def comb() -> TreePresentation:
    """Spine self-loop with omega pendant leaves at every spine node"""
    classes = {
        'S': ClassRecord(id='S', children=(Edge('S'), Edge('L', Multiplicity.OMEGA))),
        'L': ClassRecord(id='L'),
    }
    return TreePresentation(classes=classes, roots=('S',))


def lambda_id(label) -> str:
    return 'L[' + ','.join(str(value) for value in label) + ']'


def injection_tree(h: int, N: int):
    """
    Injections with domain of size at most h into {0, ..., N-1}, ordered by
    extension; the empty injection is the root.
    """
    _require(isinstance(h, int) and h >= 0, f'lambda needs h >= 0, got {h}')
    _require(isinstance(N, int) and N >= 1, f'lambda needs N >= 1, got {N}')
    parents = {lambda_id(()): None}
    labels = {lambda_id(()): ()}
    for size in range(1, min(h, N) + 1):
        for label in permutations(range(N), size):
            parents[lambda_id(label)] = lambda_id(label[:-1])
            labels[lambda_id(label)] = label
    logger.info(f'Generated injection tree h={h}, N={N} with {len(parents)} nodes')
    return explicit_tree(parents, labels=labels, kinds={node: 'lambda' for node in parents})


def _lambda_nodes(tree):
    _require(
        all(tree.label(node) is not None for node in tree.nodes),
        'augmentations need a truncation of the injection tree (every class labelled)',
    )
    return [node for node in tree.nodes if tree.record(node).kind == 'lambda']


def _ordered_successors(tree, node):
    return sorted(tree.children(node), key=lambda child: tree.label(child)[-1])


def augment_pairs(tree):
    """
    Insert (t,1) and (t,2) between t and its successors: successors whose new
    label sits at an even position among the available labels go under (t,1),
    the odd ones under (t,2).
    """
    lambda_nodes = _lambda_nodes(tree)
    parents, labels, kinds = {}, {}, {}
    for node in lambda_nodes:
        node_id = tree.class_of(node)
        labels[node_id] = tree.label(node)
        kinds[node_id] = 'lambda'
        if len(node) == 1:
            parents[node_id] = None
        successors = _ordered_successors(tree, node)
        if not successors:
            continue
        for side in (1, 2):
            pair_id = f'{node_id}|{side}'
            parents[pair_id] = node_id
            labels[pair_id] = tree.label(node)
            kinds[pair_id] = f'pair{side}'
        for position, child in enumerate(successors):
            parents[tree.class_of(child)] = f'{node_id}|{1 if position % 2 == 0 else 2}'
    return explicit_tree(_parents_in_order(parents), labels=labels, kinds=kinds)


def augment_dyadic(tree):
    """
    Replace each successor list t_0, t_1, ... by a binary spine: t has children
    t_0 and t'_0, and t'_n has children t_{n+1} and t'_{n+1}; the last spine
    node is a leaf and every spine node carries the label of t.
    """
    lambda_nodes = _lambda_nodes(tree)
    parents, labels, kinds = {}, {}, {}
    for node in lambda_nodes:
        node_id = tree.class_of(node)
        labels[node_id] = tree.label(node)
        kinds[node_id] = 'lambda'
        if len(node) == 1:
            parents[node_id] = None
        successors = _ordered_successors(tree, node)
        above = node_id
        for position, child in enumerate(successors):
            spine_id = f"{node_id}'{position}"
            parents[tree.class_of(child)] = above
            parents[spine_id] = above
            labels[spine_id] = tree.label(node)
            kinds[spine_id] = 'spine'
            above = spine_id
    return explicit_tree(_parents_in_order(parents), labels=labels, kinds=kinds)


def _parents_in_order(parents):
    """Reorder a parent map so that every parent precedes its children"""
    ordered = {}

    def place(node_id):
        if node_id in ordered:
            return
        parent_id = parents[node_id]
        if parent_id is not None:
            place(parent_id)
        ordered[node_id] = parent_id

    for node_id in parents:
        place(node_id)
    return ordered


GENERATORS = {
    'chain': chain,
    'kary': kary,
    'comb': comb,
    'lambda': injection_tree,
    'augment_pairs': augment_pairs,
    'augment_dyadic': augment_dyadic,
}


def generate(kind: str, **params):
    """
    Build one of the example trees. chain, kary and comb return presentations;
    lambda and the augmentations return explicit FiniteTrees.
    """
    if kind not in GENERATORS:
        raise ParamOutOfRange(f'Unknown generator "{kind}". Choose from: {", ".join(GENERATORS)}')
    try:
        return GENERATORS[kind](**params)
    except TypeError as exc:
        raise ParamOutOfRange(f'Bad parameters for {kind}: {exc}') from exc
