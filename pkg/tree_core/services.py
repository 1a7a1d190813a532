"""
Presentation parsing, unfolding and order queries
"""
import json
import logging
from collections import deque
from fractions import Fraction

from utils.exceptions import BadMultiplicity, DanglingClass, ParamOutOfRange, SizeBudgetExceeded, UnknownNode
from utils.rational import renormlab_setting
from .domain import ROOT, ClassRecord, Edge, FiniteTree, Multiplicity, TreePresentation, format_node
from .serializers import PresentationSerializer

logger = logging.getLogger(__name__)


def error_codes(errors):
    """Flatten the codes of a DRF error structure"""
    if isinstance(errors, dict):
        for value in errors.values():
            yield from error_codes(value)
    elif isinstance(errors, list):
        for value in errors:
            yield from error_codes(value)
    elif hasattr(errors, 'code'):
        yield errors.code


def build_presentation(description) -> TreePresentation:
    """
    Parse and validate a tree file document (JSON text or an already
    decoded mapping) into a TreePresentation.
    """
    if isinstance(description, (str, bytes)):
        description = json.loads(description)

    serializer = PresentationSerializer(data=description)
    if not serializer.is_valid():
        codes = set(error_codes(serializer.errors))
        if 'bad_multiplicity' in codes:
            raise BadMultiplicity(f'Malformed multiplicity: {serializer.errors}')
        if 'dangling_class' in codes:
            raise DanglingClass(f'Dangling class reference: {serializer.errors}')
        raise ParamOutOfRange(f'Invalid tree document: {serializer.errors}')

    data = serializer.validated_data
    classes = {}
    for entry in data['classes']:
        classes[entry['id']] = ClassRecord(
            id=entry['id'],
            children=tuple(Edge(e['target'], Multiplicity(e['multiplicity'])) for e in entry['children']),
            rho=Fraction(entry['rho']) if entry.get('rho') is not None else None,
            label=tuple(entry['label']) if entry.get('label') is not None else None,
            kind=entry.get('kind', ''),
        )

    roots = tuple(data.get('roots') or ())
    if not roots:
        targets = {edge.target for record in classes.values() for edge in record.children}
        roots = tuple(c for c in classes if c not in targets) or (next(iter(classes)),)

    presentation = TreePresentation(classes=classes, roots=roots)
    covered = set(roots).union(*(presentation.reach(root) for root in roots))
    unreachable = sorted(set(classes) - covered)
    if unreachable:
        raise DanglingClass(
            f'Classes not reachable from the roots: {", ".join(unreachable)}',
            witness=unreachable,
        )
    logger.debug(f'Built presentation with {len(classes)} classes, roots {list(roots)}')
    return presentation


def unfold(presentation: TreePresentation, depth: int, copies: int, budget: int = None) -> FiniteTree:
    """
    Finite instantiation: omega edges become `copies` sibling copies and at
    most `depth` nodes of cyclic classes appear on any root path.
    """
    if depth < 1 or copies < 1:
        raise ParamOutOfRange(f'unfold needs depth >= 1 and copies >= 1, got {depth}, {copies}')
    budget = budget or renormlab_setting('NODE_BUDGET')
    cyclic = presentation.cyclic_classes

    nodes = []
    truncated = set()
    queue = deque()
    for position, root in enumerate(presentation.roots):
        node = ((root, position, 0),)
        nodes.append(node)
        queue.append((node, 1 if root in cyclic else 0))

    while queue:
        node, cyclic_count = queue.popleft()
        for step in presentation.child_steps(node[-1][0], copies):
            count = cyclic_count + (1 if step[0] in cyclic else 0)
            if count > depth:
                truncated.add(node)
                continue
            child = node + (step,)
            nodes.append(child)
            if len(nodes) > budget:
                raise SizeBudgetExceeded(
                    f'Unfolding exceeds the node budget of {budget}',
                    witness={'budget': budget, 'depth': depth, 'copies': copies},
                )
            queue.append((child, count))

    logger.debug(f'Unfolded to {len(nodes)} nodes ({len(truncated)} truncated), depth={depth}, copies={copies}')
    return FiniteTree(presentation=presentation, nodes=tuple(nodes), truncated=frozenset(truncated))


def explicit_tree(parents, labels=None, kinds=None) -> FiniteTree:
    """FiniteTree of an explicit forest given as id -> parent id (None for roots)"""
    presentation = TreePresentation.from_parents(parents, labels=labels, kinds=kinds)
    return unfold(presentation, depth=1, copies=1)


def node_by_class(tree: FiniteTree, class_id):
    """First node of the given class (the node itself on identity presentations)"""
    for node in tree.nodes:
        if tree.class_of(node) == class_id:
            return node
    raise UnknownNode(f'No node of class {class_id}', witness=class_id)


# Order queries

def _down_set(tree, node):
    return frozenset(tree.down_set(node))


def _up_set(tree, node):
    return frozenset(tree.up_set(node))


def _successors(tree, node):
    return frozenset(tree.children(node))


def _predecessor(tree, node):
    parent = tree.parent(node)
    return None if parent == ROOT else parent


def _incomparable(tree, node):
    return frozenset(other for other in tree.nodes if not tree.comparable(node, other))


def _min_of(tree, nodes):
    nodes = set(nodes)
    return frozenset(n for n in nodes if not any(tree.less(other, n) for other in nodes))


def _max_of(tree, nodes):
    nodes = set(nodes)
    return frozenset(n for n in nodes if not any(tree.less(n, other) for other in nodes))


def _is_antichain(tree, nodes):
    nodes = list(nodes)
    return all(
        not tree.comparable(a, b)
        for position, a in enumerate(nodes)
        for b in nodes[position + 1:]
    )


def _reverse_nbhd(tree, node, excluded=()):
    successors = set(tree.children(node))
    for u in excluded:
        if u not in successors:
            raise UnknownNode(f'{format_node(u)} is not an immediate successor of {format_node(node)}',
                              witness=format_node(u))
    return frozenset(
        other for other in tree.up_set(node)
        if not any(tree.leq(u, other) for u in excluded)
    )


def _is_node(arg):
    return isinstance(arg, tuple) and (not arg or (isinstance(arg[0], tuple) and isinstance(arg[0][0], str)))


POSET_QUERIES = {
    'down_set': _down_set,
    'up_set': _up_set,
    'successors': _successors,
    'predecessor': _predecessor,
    'incomparable': _incomparable,
    'min_of': _min_of,
    'max_of': _max_of,
    'is_antichain': _is_antichain,
    'reverse_nbhd': _reverse_nbhd,
}


def poset_query(tree: FiniteTree, kind: str, *args):
    """Dispatch one of the order queries; every node argument must belong to the tree"""
    if kind not in POSET_QUERIES:
        raise ParamOutOfRange(f'Unknown poset query "{kind}"')
    for arg in args:
        if _is_node(arg):
            tree.require(arg)
        else:
            tree.require(*arg)
    return POSET_QUERIES[kind](tree, *args)


def lambda_value(label) -> Fraction:
    """lambda(t) = sum over the domain of 2^-t(alpha)"""
    return sum((Fraction(1, 2 ** value) for value in label), Fraction(0))


def lambda_neighbourhood(tree: FiniteTree, node, epsilon) -> frozenset:
    """{u in [t, oo): lambda(u) < lambda(t) + epsilon} on a labelled tree"""
    tree.require(node)
    base = lambda_value(tree.label(node))
    return frozenset(
        other for other in tree.up_set(node)
        if lambda_value(tree.label(other)) < base + Fraction(epsilon)
    )
