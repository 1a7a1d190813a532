"""
Tree presentations, finite instantiations and finitely supported functions
"""
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

import networkx as nx

from utils.exceptions import UnknownNode


# A node is the path of (class id, edge index, copy index) steps from a root.
Step = Tuple[str, int, int]
NodeId = Tuple[Step, ...]

ROOT: NodeId = ()


class Multiplicity(str, Enum):
    ONE = 'one'
    OMEGA = 'omega'


@dataclass(frozen=True)
class Edge:
    target: str
    multiplicity: Multiplicity = Multiplicity.ONE


@dataclass(frozen=True)
class ClassRecord:
    id: str
    children: Tuple[Edge, ...] = ()
    rho: Optional[Fraction] = None
    # Injection carried by classes of the injection tree and its augmentations
    label: Optional[Tuple[int, ...]] = None
    kind: str = ''


@dataclass(frozen=True)
class TreePresentation:
    """
    Finite, possibly cyclic, multiplicity-annotated description of a tree.

    Unfolding a presentation yields a forest whose nodes are paths of class
    steps; omega edges stand for infinitely many identically shaped copies.
    """
    classes: Mapping[str, ClassRecord] = field(hash=False)
    roots: Tuple[str, ...]

    @classmethod
    def from_parents(cls, parents, labels=None, kinds=None):
        """
        Identity presentation of an explicit forest: one class per node,
        every edge of multiplicity one. `parents` maps id -> parent id or None
        and its iteration order fixes the child order.
        """
        labels = labels or {}
        kinds = kinds or {}
        children = defaultdict(list)
        roots = []
        for node_id, parent_id in parents.items():
            if parent_id is None:
                roots.append(node_id)
            else:
                children[parent_id].append(Edge(node_id))
        classes = {
            node_id: ClassRecord(
                id=node_id,
                children=tuple(children[node_id]),
                label=labels.get(node_id),
                kind=kinds.get(node_id, ''),
            )
            for node_id in parents
        }
        return cls(classes=classes, roots=tuple(roots))

    @cached_property
    def graph(self) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(self.classes)
        for record in self.classes.values():
            for edge in record.children:
                graph.add_edge(record.id, edge.target, multiplicity=edge.multiplicity)
        return graph

    @cached_property
    def simple_graph(self) -> nx.DiGraph:
        return nx.DiGraph(self.graph)

    @cached_property
    def cycles(self) -> Tuple[FrozenSet[str], ...]:
        """Nontrivial strongly connected components, self-loops included"""
        found = []
        for component in nx.strongly_connected_components(self.simple_graph):
            member = next(iter(component))
            if len(component) > 1 or self.simple_graph.has_edge(member, member):
                found.append(frozenset(component))
        return tuple(sorted(found, key=sorted))

    @cached_property
    def cyclic_classes(self) -> FrozenSet[str]:
        return frozenset().union(*self.cycles) if self.cycles else frozenset()

    @property
    def is_acyclic(self) -> bool:
        return not self.cycles

    @cached_property
    def _descendants(self) -> Dict[str, FrozenSet[str]]:
        return {c: frozenset(nx.descendants(self.simple_graph, c)) for c in self.classes}

    def reach(self, class_id) -> FrozenSet[str]:
        """Classes reachable from class_id through at least one edge"""
        return self._descendants[class_id]

    def reach_closed(self, class_id) -> FrozenSet[str]:
        """Classes reachable from class_id through zero or more edges"""
        return self._descendants[class_id] | {class_id}

    def has_omega_edges(self) -> bool:
        return any(
            edge.multiplicity is Multiplicity.OMEGA
            for record in self.classes.values()
            for edge in record.children
        )

    def child_steps(self, class_id, copies) -> Tuple[Step, ...]:
        steps = []
        for position, edge in enumerate(self.classes[class_id].children):
            count = 1 if edge.multiplicity is Multiplicity.ONE else copies
            steps.extend((edge.target, position, copy) for copy in range(count))
        return tuple(steps)

    def rho_slots(self) -> Dict[str, Fraction]:
        return {c: r.rho for c, r in self.classes.items() if r.rho is not None}


def format_node(node: NodeId) -> str:
    """Render a node path as 'A.0#0/B.1#3'; the root sentinel renders as '0'"""
    if node == ROOT:
        return '0'
    return '/'.join(f'{class_id}.{edge}#{copy}' for class_id, edge, copy in node)


def parse_node(text: str) -> NodeId:
    if text == '0':
        return ROOT
    steps = []
    for part in text.split('/'):
        head, copy = part.rsplit('#', 1)
        class_id, edge = head.rsplit('.', 1)
        steps.append((class_id, int(edge), int(copy)))
    return tuple(steps)


@dataclass(frozen=True)
class FiniteTree:
    """
    Concrete finite instantiation of a presentation.

    `nodes` lists parents before children. A node is flagged truncated when
    at least one of its children in the infinite unfolding was left out.
    """
    presentation: TreePresentation = field(hash=False, compare=False)
    nodes: Tuple[NodeId, ...]
    truncated: FrozenSet[NodeId] = frozenset()

    @cached_property
    def node_set(self) -> FrozenSet[NodeId]:
        return frozenset(self.nodes)

    @cached_property
    def index(self) -> Dict[NodeId, int]:
        return {node: position for position, node in enumerate(self.nodes)}

    @cached_property
    def _children(self) -> Dict[NodeId, Tuple[NodeId, ...]]:
        children = defaultdict(list)
        for node in self.nodes:
            children[node[:-1]].append(node)
        return {parent: tuple(kids) for parent, kids in children.items()}

    def __len__(self):
        return len(self.nodes)

    def __contains__(self, node):
        return node in self.node_set

    def require(self, *nodes):
        for node in nodes:
            if node not in self.node_set:
                raise UnknownNode(f'Node {format_node(node)} is not in the tree', witness=format_node(node))

    # Structure

    def parent(self, node) -> NodeId:
        return node[:-1]

    def children(self, node) -> Tuple[NodeId, ...]:
        return self._children.get(node, ())

    def class_of(self, node) -> str:
        return node[-1][0]

    def copy_index(self, node) -> int:
        return node[-1][2]

    def record(self, node) -> ClassRecord:
        return self.presentation.classes[self.class_of(node)]

    def label(self, node):
        return self.record(node).label

    def is_leaf(self, node) -> bool:
        return not self.children(node)

    @property
    def minimal(self) -> Tuple[NodeId, ...]:
        return self.children(ROOT)

    @cached_property
    def maximal(self) -> Tuple[NodeId, ...]:
        return tuple(node for node in self.nodes if self.is_leaf(node))

    # Order

    @staticmethod
    def leq(a, b) -> bool:
        return len(a) <= len(b) and b[:len(a)] == a

    @staticmethod
    def less(a, b) -> bool:
        return len(a) < len(b) and b[:len(a)] == a

    def comparable(self, a, b) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def down_set(self, node) -> Tuple[NodeId, ...]:
        """(0, t] listed from the bottom up"""
        return tuple(node[:k] for k in range(1, len(node) + 1))

    def up_set(self, node) -> Tuple[NodeId, ...]:
        """[t, oo) in tree order; the root sentinel yields every node"""
        return tuple(other for other in self.nodes if self.leq(node, other))

    def interval(self, low, high) -> Tuple[NodeId, ...]:
        """(low, high] as a bottom-up chain; low may be the root sentinel"""
        return tuple(high[:k] for k in range(len(low) + 1, len(high) + 1))

    @cached_property
    def canonical_form(self) -> str:
        """Isomorphism-invariant encoding of the forest shape"""
        def encode(node):
            return '(' + ''.join(sorted(encode(child) for child in self.children(node))) + ')'
        return encode(ROOT)


@dataclass(frozen=True)
class TreeFn:
    """Finitely supported rational function on a FiniteTree; absent nodes carry 0"""
    tree: FiniteTree = field(hash=False, compare=False)
    values: Mapping[NodeId, Fraction] = field(hash=False)

    def __post_init__(self):
        cleaned = {}
        for node, value in self.values.items():
            value = Fraction(value)
            if value:
                cleaned[node] = value
        self.tree.require(*cleaned)
        object.__setattr__(self, 'values', cleaned)

    @classmethod
    def zero(cls, tree):
        return cls(tree, {})

    @classmethod
    def indicator(cls, tree, nodes: Iterable[NodeId], value=1):
        return cls(tree, {node: Fraction(value) for node in nodes})

    @classmethod
    def down_indicator(cls, tree, node):
        """1_{(0,u]}"""
        return cls.indicator(tree, tree.down_set(node))

    @classmethod
    def from_vector(cls, tree, vector):
        return cls(tree, dict(zip(tree.nodes, vector)))

    def __call__(self, node) -> Fraction:
        return self.values.get(node, Fraction(0))

    def __eq__(self, other):
        return isinstance(other, TreeFn) and self.values == other.values

    def __add__(self, other):
        merged = dict(self.values)
        for node, value in other.values.items():
            merged[node] = merged.get(node, 0) + value
        return TreeFn(self.tree, merged)

    def __neg__(self):
        return TreeFn(self.tree, {node: -value for node, value in self.values.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        scalar = Fraction(scalar)
        return TreeFn(self.tree, {node: scalar * value for node, value in self.values.items()})

    __rmul__ = __mul__

    @property
    def support(self) -> FrozenSet[NodeId]:
        return frozenset(self.values)

    def is_zero(self) -> bool:
        return not self.values

    def sup(self) -> Fraction:
        return max((abs(value) for value in self.values.values()), default=Fraction(0))

    def restricted(self, nodes) -> 'TreeFn':
        keep = set(nodes)
        return TreeFn(self.tree, {n: v for n, v in self.values.items() if n in keep})

    def masked(self, nodes) -> 'TreeFn':
        drop = set(nodes)
        return TreeFn(self.tree, {n: v for n, v in self.values.items() if n not in drop})
