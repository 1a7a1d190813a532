"""
Weight validation, good/bad classification, ever-branching cores and
the theorem conditions built on them
"""
import logging
from fractions import Fraction

import networkx as nx

from tree_core.domain import FiniteTree, Multiplicity
from tree_core.services import lambda_value, unfold
from utils.exceptions import InvalidWeight, ParamOutOfRange, PremiseViolated
from utils.validators import format_fraction
from .domain import (
    Classification, ConditionReport, CoreResult, Decomposition, DerivationIndex,
    Failure, PointClass, WeightFn, WeightReport,
)

logger = logging.getLogger(__name__)

THEOREMS = ('T4_1', 'T5_1', 'T6_1', 'T7_1', 'T8_1')


def _presentation_of(source):
    return source.presentation if isinstance(source, FiniteTree) else source


def validate_weight(presentation, weight: WeightFn) -> WeightReport:
    """Edge monotonicity, cycle constancy and (when flagged) values in (0,1)"""
    presentation = _presentation_of(presentation)
    violations = []
    missing = sorted(set(presentation.classes) - set(weight.rho))
    for class_id in missing:
        violations.append({'class': class_id, 'reason': 'missing rho'})
    if missing:
        return WeightReport(valid=False, violations=tuple(violations))

    for record in presentation.classes.values():
        for edge in record.children:
            if weight(edge.target) < weight(record.id):
                violations.append({
                    'edge': [record.id, edge.target],
                    'reason': 'decreasing',
                    'values': [format_fraction(weight(record.id)), format_fraction(weight(edge.target))],
                })
    for cycle in presentation.cycles:
        if len({weight(c) for c in cycle}) > 1:
            violations.append({'cycle': sorted(cycle), 'reason': 'rho not constant on cycle'})
    if weight.normalized:
        for class_id, value in sorted(weight.rho.items()):
            if not 0 < value < 1:
                violations.append({'class': class_id, 'reason': 'outside (0,1)', 'value': format_fraction(value)})

    if violations:
        logger.info(f'Weight rejected with {len(violations)} violation(s)')
    return WeightReport(valid=not violations, violations=tuple(violations))


def _require_valid(presentation, weight):
    report = validate_weight(presentation, weight)
    if not report.valid:
        raise InvalidWeight(f'Weight is not increasing: {report.violations[0]}', witness=list(report.violations))


def classify_points(presentation, weight: WeightFn) -> Classification:
    """
    A class is bad iff it has an omega edge to a class of equal rho. Good
    classes get F_t from their equal-rho one-edges and delta_t from the
    remaining edges, capped at 1 (and 1 when nothing remains).
    """
    presentation = _presentation_of(presentation)
    _require_valid(presentation, weight)
    fans = fan_points(presentation, weight, validated=True)

    points = {}
    for class_id, record in presentation.classes.items():
        value = weight(class_id)
        bad = any(
            edge.multiplicity is Multiplicity.OMEGA and weight(edge.target) == value
            for edge in record.children
        )
        equal_edges = tuple(
            position for position, edge in enumerate(record.children)
            if edge.multiplicity is Multiplicity.ONE and weight(edge.target) == value
        )
        if bad:
            points[class_id] = PointClass('bad', equal_edges, Fraction(0), class_id in fans)
            continue
        gaps = [
            weight(edge.target) - value
            for position, edge in enumerate(record.children)
            if position not in equal_edges
        ]
        delta = min([Fraction(1)] + gaps)
        points[class_id] = PointClass('good', equal_edges, delta, class_id in fans)

    return Classification(points=points, weight=weight)


def derivation_index(tree: FiniteTree, nodes) -> DerivationIndex:
    """
    Iterate W' = W minus {w : W meets [w, oo) in a chain} to the empty set;
    i_U(w) is the round in which w is removed.
    """
    remaining = set(nodes)
    index = {}
    rounds = []
    current = 0
    while remaining:
        rounds.append(frozenset(remaining))
        # number of maximal elements of W inside each subtree, capped at 2
        tops = {}
        for node in reversed(tree.nodes):
            count = min(2, sum(tops[child] for child in tree.children(node)))
            tops[node] = 1 if count == 0 and node in remaining else count
        removed = {w for w in remaining if tops[w] == 1}
        for w in removed:
            index[w] = current
        remaining -= removed
        current += 1
    return DerivationIndex(index=index, rounds=tuple(rounds))


def _class_core(presentation, members):
    """Greatest set E inside members whose classes all reach a branching class of E"""
    core = set(members)
    while True:
        branching = set()
        for class_id in core:
            inside = [e for e in presentation.classes[class_id].children if e.target in core]
            if len(inside) >= 2 or any(e.multiplicity is Multiplicity.OMEGA for e in inside):
                branching.add(class_id)
        subgraph = presentation.simple_graph.subgraph(core)
        keep = {
            class_id for class_id in core
            if class_id in branching or nx.descendants(subgraph, class_id) & branching
        }
        if keep == core:
            return frozenset(core)
        core = keep


def ever_branching_core(source, nodes=None, *, weight=None, level=None) -> CoreResult:
    """
    Surviving set of an ever-branching analysis of U, where U is given
    explicitly (`nodes`) or as the level set rho^-1(level).

    On a FiniteTree the core is always empty and the derivation index of U
    comes back too; on presentations the class-level fixpoint is computed and
    the derivation index only when the presentation is acyclic.
    """
    if nodes is None:
        if weight is None or level is None:
            raise ParamOutOfRange('ever_branching_core needs either nodes or (weight, level)')
        level = Fraction(level)

    if isinstance(source, FiniteTree):
        members = nodes if nodes is not None else [n for n in source.nodes if weight.at(source, n) == level]
        return CoreResult(core=frozenset(), derivation=derivation_index(source, members))

    members = set(nodes) if nodes is not None else {c for c in source.classes if weight(c) == level}
    core = _class_core(source, members)
    if not source.is_acyclic:
        return CoreResult(core=core, derivation=None, unsupported=True)
    tree = unfold(source, depth=1, copies=1)
    derivation = derivation_index(tree, [n for n in tree.nodes if tree.class_of(n) in members])
    return CoreResult(core=core, derivation=derivation)


def fan_points(presentation, weight: WeightFn, validated=False) -> frozenset:
    """Classes lying in the ever-branching core of their own rho level set"""
    presentation = _presentation_of(presentation)
    if not validated:
        _require_valid(presentation, weight)
    fans = set()
    for level in set(weight(c) for c in presentation.classes):
        members = {c for c in presentation.classes if weight(c) == level}
        fans |= _class_core(presentation, members)
    return frozenset(fans)


def special_decomposition(source):
    """
    Antichain decomposition: depth levels on finite trees, longest-path
    generations on acyclic presentations, Failure on cyclic presentations.
    """
    if isinstance(source, FiniteTree):
        depths = sorted({len(node) for node in source.nodes})
        pieces = tuple(frozenset(n for n in source.nodes if len(n) == d) for d in depths)
        return Decomposition(pieces=pieces, by='node')
    if source.cycles:
        cycle = sorted(source.cycles[0])
        return Failure('a recurring class forces rho to be constant on an infinite branch', witness=cycle)
    generations = nx.topological_generations(source.simple_graph)
    return Decomposition(pieces=tuple(frozenset(g) for g in generations), by='class')


# Weight derivations

def _upgrade(presentation, mu: WeightFn, bad=None):
    presentation = _presentation_of(presentation)
    if bad is None:
        bad = classify_points(presentation, mu).bad_classes
    bad = set(bad)

    def lift(class_id):
        return max((mu(s) for s in bad if class_id in presentation.reach(s)), default=Fraction(0))

    for class_id in sorted(bad):
        if mu(class_id) <= lift(class_id):
            raise PremiseViolated(
                f'Bad class {class_id} does not dominate the bad classes below it',
                witness={
                    'class': class_id,
                    'mu': format_fraction(mu(class_id)),
                    'sup_below': format_fraction(lift(class_id)),
                },
            )
    return WeightFn({c: mu(c) + lift(c) for c in presentation.classes})


def _sigma_frag(presentation, pieces):
    presentation = _presentation_of(presentation)
    pieces = [frozenset(piece) for piece in pieces]
    missing = sorted(set(presentation.classes) - set().union(*pieces)) if pieces else sorted(presentation.classes)
    if missing:
        raise PremiseViolated('Pieces do not cover every class', witness={'uncovered': missing})

    for m, piece in enumerate(pieces, start=1):
        for class_id in sorted(piece):
            for edge in presentation.classes[class_id].children:
                if edge.multiplicity is Multiplicity.OMEGA and presentation.reach_closed(edge.target) & piece:
                    raise PremiseViolated(
                        f'Piece {m} is not reverse-discrete at class {class_id}',
                        witness={'piece': m, 'class': class_id, 'target': edge.target},
                    )

    rho = {}
    for class_id in presentation.classes:
        above = presentation.reach_closed(class_id)
        rho[class_id] = 1 - sum(
            (Fraction(1, 2 ** m) for m, piece in enumerate(pieces, start=1) if above & piece),
            Fraction(0),
        )
    return WeightFn(rho)


def _lambda(tree):
    presentation = _presentation_of(tree)
    unlabelled = sorted(c for c, r in presentation.classes.items() if r.label is None)
    if unlabelled:
        raise ParamOutOfRange(f'lambda weights need labelled classes; missing on {unlabelled[:5]}')
    return WeightFn({c: lambda_value(r.label) for c, r in presentation.classes.items()})


DERIVATIONS = {
    'upgrade': _upgrade,
    'sigma_frag': _sigma_frag,
    'lambda': _lambda,
}


def derive_weights(mode: str, *args, **inputs) -> WeightFn:
    if mode not in DERIVATIONS:
        raise ParamOutOfRange(f'Unknown derivation mode "{mode}"')
    weight = DERIVATIONS[mode](*args, **inputs)
    logger.info(f'Derived {mode} weight on {len(weight.rho)} classes')
    return weight


# Theorem conditions

def _bad_continuations(presentation, weight, bad, level):
    """
    Number of bad nodes u in [s, oo) with rho(u) = rho(s), per class s of the
    level set, capped at 2 (omega edges and cycles count as many).
    """
    members = {c for c in presentation.classes if weight(c) == level}
    graph = presentation.graph.subgraph(members)
    simple = nx.DiGraph(graph)
    condensed = nx.condensation(simple)
    counts = {}
    for component in reversed(list(nx.topological_sort(condensed))):
        classes = condensed.nodes[component]['members']
        looping = len(classes) > 1 or any(simple.has_edge(c, c) for c in classes)
        if looping:
            reaches_bad = any(
                c in bad or any(d in bad for d in nx.descendants(simple, c)) for c in classes
            )
            for c in classes:
                counts[c] = 2 if reaches_bad else 0
            continue
        (c,) = classes
        total = 1 if c in bad else 0
        for _, target, data in graph.out_edges(c, data=True):
            if target == c:
                continue
            weight_factor = 2 if data['multiplicity'] is Multiplicity.OMEGA else 1
            total += weight_factor * counts[target]
        counts[c] = min(total, 2)
    return counts


def check_conditions(presentation, weight: WeightFn, theorem: str) -> ConditionReport:
    if theorem not in THEOREMS:
        raise ParamOutOfRange(f'Unknown theorem "{theorem}". Choose from: {", ".join(THEOREMS)}')
    presentation = _presentation_of(presentation)
    classification = classify_points(presentation, weight)
    bad = classification.bad_classes
    witnesses = []
    notes = []

    if theorem in ('T4_1', 'T6_1', 'T8_1'):
        for class_id in sorted(bad):
            witnesses.append({'condition': 'no_bad_points', 'class': class_id})

    if theorem in ('T4_1', 'T5_1', 'T8_1'):
        for level in weight.levels():
            core = ever_branching_core(presentation, weight=weight, level=level).core
            if core:
                witnesses.append({
                    'condition': 'no_ever_branching_level_set',
                    'level': format_fraction(level),
                    'classes': sorted(core),
                })

    if theorem == 'T5_1':
        for level in weight.levels():
            counts = _bad_continuations(presentation, weight, bad, level)
            for class_id, count in sorted(counts.items()):
                if count > 1:
                    witnesses.append({
                        'condition': 'at_most_one_bad_continuation',
                        'class': class_id,
                        'level': format_fraction(level),
                    })

    if theorem == 'T7_1':
        for cycle in presentation.cycles:
            witnesses.append({
                'condition': 'not_constant_on_increasing_sequence',
                'classes': sorted(cycle),
                'level': format_fraction(weight(next(iter(cycle)))),
            })

    if not presentation.is_acyclic:
        notes.append('cyclic presentation: level sets are infinite; derivation indices not computed')
    report = ConditionReport(theorem=theorem, passed=not witnesses, witnesses=tuple(witnesses), notes=tuple(notes))
    logger.info(f'{theorem}: {"passed" if report.passed else f"failed with {len(witnesses)} witness(es)"}')
    return report
