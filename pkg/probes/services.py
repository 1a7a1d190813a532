"""
Numerical probes of convexity, smoothness and Kadec behaviour on finite
truncations. Probes never prove anything about the infinite tree: they
collect witnesses and margins, seeded so that every witness replays.
"""
import logging
import math
from fractions import Fraction
from itertools import combinations

import numpy as np

from norms.domain import NormValue
from norms.oracles import get_oracle
from operators.services import sample_functions
from tree_core.domain import FiniteTree, Multiplicity, TreeFn, format_node
from tree_core.generators import chain
from tree_core.services import lambda_neighbourhood, node_by_class, poset_query, unfold
from utils.exceptions import BudgetExceeded, InvalidWeight, ParamOutOfRange
from weights.domain import WeightFn
from weights.fans import fan_triple
from weights.services import classify_points, ever_branching_core
from .domain import MuEstimate, ProbeReport, function_document

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)
GOLDEN = (math.sqrt(5) - 1) / 2
GOLDEN_STEPS = 40
CERTIFICATE_DENOMINATOR = 1 << 32


def _norm(oracle, f) -> NormValue:
    value = oracle(f)
    return value if isinstance(value, NormValue) else NormValue.exact(value)


def _squared(oracle, f):
    """Exact square when the oracle has one, else None"""
    if getattr(oracle, 'exact', False) and hasattr(oracle, 'squared'):
        return oracle.squared(f)
    return None


def _resolve(oracle, tree, weight):
    return get_oracle(oracle, tree, weight) if isinstance(oracle, str) else oracle


def _oracle_on(factory, tree, weight):
    """Oracles bound to a tree are rebuilt when a probe changes the truncation"""
    if isinstance(factory, str):
        return get_oracle(factory, tree, weight)
    return factory(tree, weight)


# mu estimation

class _Exhausted(Exception):
    pass


def _base_function(tree, t, f=None, u=None):
    tree.require(t)
    if f is None:
        return TreeFn.down_indicator(tree, t), t
    down = set(tree.down_set(t))
    if not f.support <= down or f(t) == 0:
        raise ParamOutOfRange(f'mu(f, u) needs f supported on (0, {format_node(t)}] with f(t) != 0')
    below = tree.down_set(t)
    if any(f(a) > f(b) for a, b in zip(below, below[1:])):
        raise ParamOutOfRange('mu(f, u) needs f increasing on (0, t]')
    u = t if u is None else u
    tree.require(u)
    if not tree.leq(t, u):
        raise ParamOutOfRange(f'{format_node(u)} does not lie above {format_node(t)}')
    extra = [node for node in tree.interval(t, u) if node != t]
    return f + TreeFn.indicator(tree, extra, f(t)), u


def estimate_mu(oracle, tree: FiniteTree, t, f=None, u=None, budget=2000, starts=3, sweeps=4,
                radius=2, seed=0, strict=False) -> MuEstimate:
    """
    Upper estimate of mu(t) = inf ||1_(0,t] + g|| (or of mu(f, u) when f is
    given) over g supported on the instantiated part of (t, oo).

    Coordinate descent with a golden-section line search per coordinate and
    `starts` seeded restarts. The sequence of evaluations does not depend on
    `budget`, so a larger budget never gives a worse value.
    """
    base, anchor = _base_function(tree, t, f, u)
    free = [node for node in tree.up_set(anchor) if node != anchor]
    peak = float(base.sup()) or 1.0
    rng = np.random.default_rng(seed)

    spent = 0
    best = {'value': math.inf, 'point': np.zeros(len(free))}
    trace = []

    def certificate(point):
        return base + TreeFn(tree, {
            node: Fraction(float(x)).limit_denominator(CERTIFICATE_DENOMINATOR)
            for node, x in zip(free, point)
        })

    def evaluate(point):
        nonlocal spent
        if spent >= budget:
            raise _Exhausted()
        spent += 1
        value = float(_norm(oracle, certificate(point)).value)
        if value < best['value']:
            best['value'] = value
            best['point'] = point.copy()
        return value

    def line_search(point, position, current):
        low, high = -radius * peak, radius * peak
        probe = point.copy()

        def at(x):
            probe[position] = x
            return evaluate(probe)

        left = high - GOLDEN * (high - low)
        right = low + GOLDEN * (high - low)
        f_left, f_right = at(left), at(right)
        for _ in range(GOLDEN_STEPS):
            if f_left <= f_right:
                high, right, f_right = right, left, f_left
                left = high - GOLDEN * (high - low)
                f_left = at(left)
            else:
                low, left, f_left = left, right, f_right
                right = low + GOLDEN * (high - low)
                f_right = at(right)
        x, value = (left, f_left) if f_left <= f_right else (right, f_right)
        if value < current:
            point[position] = x
            return value
        return current

    exhausted = False
    try:
        for start in range(starts):
            point = np.zeros(len(free)) if start == 0 else rng.uniform(-radius * peak, radius * peak, len(free))
            current = evaluate(point)
            for _ in range(sweeps if free else 0):
                before = current
                for position in range(len(free)):
                    current = line_search(point, position, current)
                trace.append(best['value'])
                if before - current < 1e-12:
                    break
            trace.append(best['value'])
    except _Exhausted:
        exhausted = True
        trace.append(best['value'])

    result = MuEstimate(
        value=best['value'],
        certificate=certificate(best['point']),
        trace=trace,
        evaluations=spent,
        budget_exhausted=exhausted,
    )
    if exhausted:
        logger.warning(f'estimate_mu at {format_node(t)} stopped after {spent} evaluations, best {result.value:.9g}')
        if strict:
            raise BudgetExceeded(
                f'estimate_mu ran out of its budget of {budget} evaluations',
                witness=result.as_document(),
            )
    else:
        logger.debug(f'estimate_mu at {format_node(t)}: {result.value:.9g} over {spent} evaluations')
    return result


# Strict convexity

def triangle_is_flat(a, b, c) -> bool:
    """||x + y|| == ||x|| + ||y|| from the exact squares a, b, c of x, y, x + y"""
    gap = c - a - b
    return gap >= 0 and gap * gap == 4 * a * b


def positively_proportional(x: TreeFn, y: TreeFn) -> bool:
    if x.support != y.support or not x.support:
        return False
    ratios = {x(node) / y(node) for node in x.support}
    return len(ratios) == 1 and next(iter(ratios)) > 0


def _flatness(oracle, x, y):
    """(flat, gap) where gap = ||x|| + ||y|| - ||x + y|| as a float"""
    squares = [_squared(oracle, g) for g in (x, y, x + y)]
    if None not in squares:
        a, b, c = squares
        gap = math.sqrt(a) + math.sqrt(b) - math.sqrt(c)
        return triangle_is_flat(a, b, c), gap
    nx_, ny, nxy = (_norm(oracle, g) for g in (x, y, x + y))
    gap = float(nx_.value + ny.value - nxy.value)
    radius = float(nx_.error_radius + ny.error_radius + nxy.error_radius)
    return gap <= radius, gap


def _bad_pairs(tree, weight, classification, limit):
    """Pairs of distinct bad nodes whose meet carries the same rho (two bad continuations)"""
    bad = [node for node in tree.nodes if classification.is_bad(tree, node)]
    pairs = []
    for a, b in combinations(bad, 2):
        if tree.comparable(a, b) or weight.at(tree, a) != weight.at(tree, b):
            continue
        common = [n for n in tree.down_set(a) if tree.leq(n, b)]
        if common and weight.at(tree, common[-1]) == weight.at(tree, a):
            pairs.append((a, b))
        if len(pairs) >= limit:
            break
    return pairs


def _core_nodes(tree, weight):
    classes = set()
    for level in weight.levels():
        classes |= ever_branching_core(tree.presentation, weight=weight, level=level).core
    return [node for node in tree.nodes if tree.class_of(node) in classes]


def probe_strict_convexity(oracle, tree, weight, budget=100, seed=0, fan_depth=8) -> ProbeReport:
    """
    Looks for flat segments ||x + y|| = ||x|| + ||y|| with x, y not
    proportional: random pairs, indicators of two equal-rho bad continuations
    and fan triples inside the ever-branching core.
    """
    oracle = _resolve(oracle, tree, weight)
    report = ProbeReport(probe='strict_convexity', seed=seed)
    classification = classify_points(tree.presentation, weight)
    gaps = []

    def examine(kind, x, y, **witness):
        if x == y or positively_proportional(x, y):
            report.statistics['skipped'] = report.statistics.get('skipped', 0) + 1
            return
        report.samples += 1
        flat, gap = _flatness(oracle, x, y)
        gaps.append(gap)
        if flat:
            report.add_violation(kind, x=function_document(x), y=function_document(y), **witness)
            logger.error(f'Flat segment ({kind}) under {getattr(oracle, "name", oracle)}: gap {gap:.3g}')

    samples = sample_functions(tree, 2 * budget, seed)
    for position in range(budget):
        examine('random_pair', samples[2 * position], samples[2 * position + 1], sample=position)

    pairs = _bad_pairs(tree, weight, classification, budget)
    for a, b in pairs:
        examine('bad_continuations', TreeFn.down_indicator(tree, a), TreeFn.down_indicator(tree, b),
                nodes=[format_node(a), format_node(b)])

    triples = 0
    core = _core_nodes(tree, weight)
    for node in core:
        triple = fan_triple(tree, core, node, fan_depth)
        if triple is None:
            continue
        x, y, middle = triple
        triples += 1
        if middle != (x + y) * HALF:
            report.add_violation('fan_identity', node=format_node(node))
            logger.error(f'Fan midpoint identity fails at {format_node(node)}')
            continue
        examine('fan_triple', x, y, node=format_node(node))
        if triples >= budget:
            break

    if triples and tree.truncated:
        report.notes.append('fan functions are cut at the truncation boundary')
    report.statistics.update({
        'random_pairs': budget,
        'bad_continuation_pairs': len(pairs),
        'fan_triples': triples,
        'min_gap': min(gaps) if gaps else None,
    })
    logger.info(f'Strict convexity probe: {report.samples} pairs, {len(report.violations)} flat')
    return report


# Mid-point local uniform convexity

def _two_valued_sample(rng, size, epsilon):
    steps = 4
    a, b = (Fraction(int(v), 4) for v in rng.integers(-16, 17, size=2))
    centres = [a if side else b for side in rng.integers(0, 2, size=size)]
    noise = rng.integers(-steps, steps + 1, size=size)
    return [c + epsilon * int(n) / steps for c, n in zip(centres, noise)]


def _three_valued_sample(rng, size):
    """
    g taking a low, a middle and a high value (each at least once) and h
    moving only the middle nodes, by d = min distance to the outer values
    """
    low, middle, high = sorted(Fraction(int(v), 4) for v in rng.choice(np.arange(-16, 17), size=3, replace=False))
    levels = [low, high, middle] + [(low, middle, high)[int(i)] for i in rng.integers(0, 3, size=size - 3)]
    order = rng.permutation(size)
    g = [levels[int(i)] for i in order]
    d = min(high - middle, middle - low)
    sign = 1 if rng.integers(0, 2) else -1
    h = [sign * d if value == middle else Fraction(0) for value in g]
    return g, h, d


def _midpoint(squared, g: TreeFn, h: TreeFn) -> Fraction:
    return squared(g + h) + squared(g - h) - 2 * squared(g)


def _mlur_tree(tree, weight, size):
    if tree is None:
        presentation = chain(size)
        tree = unfold(presentation, depth=1, copies=1)
        weight = WeightFn.constant(presentation, HALF)
    if weight is None:
        weight = WeightFn.constant(tree.presentation, HALF)
    if len(tree) < 3:
        raise ParamOutOfRange(f'probe_mlur needs at least 3 nodes, the tree has {len(tree)}')
    return tree, weight


def probe_mlur(oracle='osc', tree: FiniteTree = None, weight=None, samples=1000, seed=0, size=5,
               contrast=20, max_attempts=None) -> ProbeReport:
    """
    Samples g within eps of two-valued and h with
    ||g + h||^2 + ||g - h||^2 - 2||g||^2 < eps^2 (the admissible samples).

    For the oscillation norm ||h||_oo < 4 eps must follow and every failure is
    a violation. For other exact oracles (composite_mlur) the ratio
    ||h||_oo / eps is reported, not asserted. `contrast` three-valued g are
    also drawn; admissible ones with ||h||_oo >= 4 eps are recorded as notes.
    Without a tree, a chain of `size` nodes with rho = 1/2 is used.
    """
    tree, weight = _mlur_tree(tree, weight, size)
    oracle = _resolve(oracle, tree, weight)
    if _squared(oracle, TreeFn.zero(tree)) is None:
        raise ParamOutOfRange(f'probe_mlur needs an exact oracle, got {oracle!r}')
    squared = oracle.squared
    asserted = oracle.name == 'osc'
    nodes = tree.nodes
    rng = np.random.default_rng(seed)
    report = ProbeReport(probe='mlur', seed=seed)
    attempts = 0
    max_attempts = max_attempts or 20 * samples
    worst = Fraction(0)
    exceeded = 0
    while report.samples < samples and attempts < max_attempts:
        attempts += 1
        epsilon = Fraction(1, 2 ** int(rng.integers(2, 7)))
        g = TreeFn(tree, dict(zip(nodes, _two_valued_sample(rng, len(nodes), epsilon))))
        scale = epsilon * Fraction(2) ** int(rng.integers(-6, 3))
        h = TreeFn(tree, {node: scale * Fraction(int(v), 8) for node, v in zip(nodes, rng.integers(-8, 9, size=len(nodes)))})
        if _midpoint(squared, g, h) >= epsilon * epsilon:
            continue
        report.samples += 1
        bound = h.sup()
        worst = max(worst, bound / epsilon)
        if bound < 4 * epsilon:
            continue
        exceeded += 1
        if asserted:
            report.add_violation('mlur_bound', attempt=attempts, g=function_document(g),
                                 h=function_document(h), epsilon=str(epsilon))
            logger.error(f'Oscillation bound fails: ||h|| = {bound}, eps = {epsilon}')

    informational = 0
    for draw in range(contrast):
        values, moves, d = _three_valued_sample(rng, len(nodes))
        epsilon = d / 4 / 2 ** int(rng.integers(0, 4))
        g = TreeFn(tree, dict(zip(nodes, values)))
        h = TreeFn(tree, dict(zip(nodes, moves)))
        midpoint = _midpoint(squared, g, h)
        if midpoint < epsilon * epsilon and h.sup() >= 4 * epsilon:
            informational += 1
            if informational <= 3:
                report.notes.append(
                    f'three-valued g (draw {draw}): midpoint quantity {midpoint} < eps^2 for eps = {epsilon} '
                    f'but ||h|| = {h.sup()} >= 4 eps'
                )
    report.statistics.update({
        'norm': oracle.name,
        'asserted': asserted,
        'attempts': attempts,
        'admissible': report.samples,
        'max_h_over_eps': float(worst),
        'exceeded_4eps': exceeded,
        'three_valued_draws': contrast,
        'informational_failures': informational,
    })
    if report.samples < samples:
        logger.warning(f'probe_mlur found {report.samples} admissible samples in {attempts} attempts')
    logger.info(f'MLUR probe ({oracle.name}): {report.samples} admissible samples, {len(report.violations)} failures')
    return report


# Kadec obstruction and reverse convergence

def omega_parents(presentation):
    """(class, edge position) for every omega edge"""
    return [
        (class_id, position)
        for class_id, record in presentation.classes.items()
        for position, edge in enumerate(record.children)
        if edge.multiplicity is Multiplicity.OMEGA
    ]


def omega_successors(tree, node, position):
    return [child for child in tree.children(node) if child[-1][1] == position]


def margin_trend(margins, tolerance=1e-9) -> str:
    """
    'vanishing' when every margin is already 0, 'decreasing' when the margins
    never grow and end below where they started, 'flat' when they stay put,
    'irregular' otherwise. Fewer than two margins give 'inconclusive'.
    """
    if len(margins) < 2:
        return 'inconclusive'
    if all(margin <= tolerance for margin in margins):
        return 'vanishing'
    steps = [later - earlier for earlier, later in zip(margins, margins[1:])]
    if any(step > tolerance for step in steps):
        return 'irregular'
    return 'decreasing' if margins[-1] < margins[0] - tolerance else 'flat'


def probe_kadec(presentation, weight, oracle='sup', copies=(1, 2, 4, 8), depth=2, mu_budget=40,
                tolerance=1e-9) -> ProbeReport:
    """
    f_n = 1_(0,u_n] tends pointwise to f = 1_(0,t] over the copies u_n of an
    omega edge at t while ||f_n - f||_oo = 1. When t is bad and ||f_n|| tends
    to ||f||, the norm cannot have the Kadec property.
    The margins per omega edge are kept with their trend over the schedule
    (see margin_trend) and a trend towards 0 is noted.
    """
    report = ProbeReport(probe='kadec')
    parents = omega_parents(presentation)
    if not parents:
        report.notes.append('no omega edges: every node is reverse-isolated, nothing to probe')
        report.statistics['verdict'] = 'inconclusive'
        return report
    classification = classify_points(presentation, weight)
    schedule = sorted(set(copies))
    rows = []
    trends = []
    for class_id, position in parents:
        bad = classification[class_id].is_bad
        margins = []
        measured = []
        for k in schedule:
            tree = unfold(presentation, depth=depth, copies=k)
            evaluate = _oracle_on(oracle, tree, weight)
            t = node_by_class(tree, class_id)
            f = TreeFn.down_indicator(tree, t)
            limit = _norm(evaluate, f)
            successors = omega_successors(tree, t, position)
            if not successors:
                report.notes.append(f'class {class_id}: copies cut by the truncation at depth {depth}')
                continue
            norms = []
            for u in successors:
                f_n = TreeFn.down_indicator(tree, u)
                norms.append(_norm(evaluate, f_n))
                report.samples += 1
            margin = min(float(abs(v.value - limit.value)) for v in norms)
            radius = max(float(v.error_radius + limit.error_radius) for v in norms)
            margins.append(margin)
            measured.append(k)
            row = {
                'class': class_id,
                'copies': k,
                'bad': bad,
                'limit': float(limit.value),
                'norms': [float(v.value) for v in norms],
                'margin': margin,
                'sup_distance': 1,
            }
            if mu_budget:
                row['mu_t'] = estimate_mu(evaluate, tree, t, budget=mu_budget).value
                row['mu_last'] = estimate_mu(evaluate, tree, successors[-1], budget=mu_budget).value
            rows.append(row)
            if bad and margin <= radius + tolerance:
                report.add_violation('kadec_obstruction', node=format_node(t), copies=k, margin=margin)
                logger.error(f'Kadec obstruction at bad class {class_id} with {k} copies')
        trend = margin_trend(margins, tolerance)
        trends.append({'class': class_id, 'edge': position, 'copies': measured, 'margins': margins, 'trend': trend})
        if trend in ('vanishing', 'decreasing'):
            report.notes.append(f'class {class_id}: margins {trend} towards 0 over {len(margins)} copy counts')
        if len(schedule) == 1 or schedule[-1] == 1:
            report.notes.append(f'class {class_id}: a single copy gives no trend, inconclusive')
        elif not bad:
            report.notes.append(f'class {class_id} is good: separation margin {margins[-1]:.6g} at {schedule[-1]} copies')
    report.statistics['rows'] = rows
    report.statistics['trends'] = trends
    logger.info(f'Kadec probe over {len(parents)} omega edges: {len(report.violations)} obstructions')
    return report


def probe_reverse_convergence(source, copies=(2, 4, 8, 16), depth=2, epsilons=4) -> ProbeReport:
    """
    For each omega parent t the successors u_n converge to t in the reverse
    topology: 1_(0,u_n] agrees with 1_(0,t] on a fixed finite set from some n
    on, every basic reverse neighbourhood of t contains almost all u_n, and
    the sup distance stays 1. On a labelled tree the same sequence is checked
    against the lambda neighbourhoods.
    """
    report = ProbeReport(probe='reverse_convergence')
    if isinstance(source, FiniteTree):
        _lambda_convergence(source, report, epsilons)
        return report

    parents = omega_parents(source)
    finite = sorted({c for c, record in source.classes.items() if record.children} - {c for c, _ in parents})
    if finite:
        report.notes.append(f'reverse-isolated (finitely branching) classes: {", ".join(finite)}')
    if not parents:
        report.statistics['verdict'] = 'inconclusive'
        return report

    schedule = sorted(set(copies))
    fixed = set(unfold(source, depth=depth, copies=schedule[0]).nodes)
    growth = {}
    for class_id, position in parents:
        counts = []
        for k in schedule:
            tree = unfold(source, depth=depth, copies=k)
            t = node_by_class(tree, class_id)
            limit = TreeFn.down_indicator(tree, t)
            successors = omega_successors(tree, t, position)
            last = TreeFn.down_indicator(tree, successors[-1])
            agreement = sum(1 for node in fixed if last(node) == limit(node))
            counts.append(agreement)
            report.samples += len(successors)
            if (last - limit).sup() != 1:
                report.add_violation('sup_distance', node=format_node(successors[-1]))
            excluded = [u for u in successors if u in fixed]
            neighbourhood = poset_query(tree, 'reverse_nbhd', t, excluded)
            missing = [format_node(u) for u in successors if u not in fixed and u not in neighbourhood]
            if missing:
                report.add_violation('reverse_neighbourhood', node=format_node(t), copies=k, missing=missing)
                logger.error(f'Successors of {format_node(t)} escape its reverse neighbourhood: {missing}')
        if any(b < a for a, b in zip(counts, counts[1:])):
            report.add_violation('agreement_shrinks', node=class_id, counts=counts)
        growth[class_id] = counts
    report.statistics.update({'fixed_nodes': len(fixed), 'agreement': growth, 'copies': schedule})
    logger.info(f'Reverse convergence probe over {len(parents)} omega edges: {len(report.violations)} violations')
    return report


def _lambda_convergence(tree, report, epsilons):
    """lambda-topology: lambda(u) < lambda(t) + 2^-j holds exactly for successors with new label > j"""
    if any(tree.label(node) is None for node in tree.nodes):
        raise ParamOutOfRange('lambda neighbourhoods need a labelled tree')
    checked = 0
    for node in tree.nodes:
        successors = [c for c in tree.children(node) if tree.record(c).kind == 'lambda']
        if len(successors) < 2:
            continue
        for j in range(epsilons):
            neighbourhood = lambda_neighbourhood(tree, node, Fraction(1, 2 ** j))
            inside = {u for u in successors if u in neighbourhood}
            expected = {u for u in successors if tree.label(u)[-1] > j}
            checked += 1
            if inside != expected:
                report.add_violation('lambda_neighbourhood', node=format_node(node), epsilon=f'1/{2 ** j}',
                                     inside=sorted(format_node(u) for u in inside))
        report.samples += len(successors)
    report.statistics['neighbourhoods'] = checked


# Smoothness

def probe_smoothness(oracle, f: TreeFn, directions=None, orders=range(4, 17), samples=8, seed=0,
                     tolerance=1e-3) -> ProbeReport:
    """
    One-sided difference quotients (||f + s h|| - ||f||) / s and
    (||f|| - ||f - s h||) / s for s = 2^-k. A gap between them at the finest
    step is a kink; the spread of the central quotients across steps is the
    Frechet-style uniformity statistic.
    """
    if f.is_zero():
        raise ParamOutOfRange('probe_smoothness needs f != 0')
    report = ProbeReport(probe='smoothness', seed=seed)
    if directions is None:
        directions = sample_functions(f.tree, samples, seed)
    orders = list(orders)
    centre = _norm(oracle, f).value
    spreads = []
    for position, h in enumerate(directions):
        forward, backward = [], []
        for k in orders:
            step = Fraction(1, 2 ** k)
            forward.append(float((_norm(oracle, f + h * step).value - centre) / step))
            backward.append(float((centre - _norm(oracle, f - h * step).value) / step))
        forward, backward = np.array(forward), np.array(backward)
        asymmetry = forward - backward
        central = (forward + backward) / 2
        spreads.append(float(np.abs(np.diff(central[-3:])).max()) if len(orders) > 1 else 0.0)
        report.samples += 1
        if asymmetry[-1] > tolerance:
            report.add_violation('kink', direction=function_document(h), sample=position,
                                 forward=float(forward[-1]), backward=float(backward[-1]))
            logger.warning(f'Kink along direction {position}: slopes {forward[-1]:.6g} / {backward[-1]:.6g}')
    report.statistics.update({
        'orders': orders,
        'max_central_spread': max(spreads) if spreads else 0.0,
        'uniform': bool(spreads) and max(spreads) <= tolerance,
    })
    report.notes.append('finite-difference evidence only; no differentiability claim')
    logger.info(f'Smoothness probe: {report.samples} directions, {len(report.violations)} kinks')
    return report


# Doubly bad points

def probe_doubly_bad(tree: FiniteTree, phi) -> ProbeReport:
    """
    On a pair augmentation of the injection tree, rank the injection nodes t
    by max_i phi(t, i) - phi(t) and report the best one. (t, i) counts as bad
    inside the truncation when phi is constant from (t, i) to two successors.
    """
    rho = phi if isinstance(phi, WeightFn) else WeightFn(phi)
    report = ProbeReport(probe='doubly_bad')
    for node in tree.nodes:
        for child in tree.children(node):
            if rho.at(tree, child) < rho.at(tree, node):
                raise InvalidWeight(f'phi decreases from {format_node(node)} to {format_node(child)}',
                                    witness=[format_node(node), format_node(child)])

    def bad(pair):
        level = rho.at(tree, pair)
        return sum(1 for u in tree.children(pair) if rho.at(tree, u) == level) >= 2

    scores = []
    for node in tree.nodes:
        pairs = [c for c in tree.children(node) if tree.record(c).kind.startswith('pair')]
        if len(pairs) != 2:
            continue
        report.samples += 1
        score = max(rho.at(tree, p) - rho.at(tree, node) for p in pairs)
        scores.append((score, node, all(bad(p) for p in pairs)))
    if not scores:
        report.notes.append('no node carries a pair of augmentation successors')
        return report
    score, best, doubly = min(scores, key=lambda entry: (entry[0], entry[1]))
    report.statistics.update({
        'best_node': format_node(best),
        'best_score': str(score),
        'best_doubly_bad': doubly,
        'doubly_bad_nodes': sum(1 for entry in scores if entry[2]),
    })
    report.notes.append('near-witness search within the truncation; not a proof for the infinite tree')
    logger.info(f'Doubly bad search: best node {format_node(best)} with score {score}')
    return report


PROBES = {
    'strict_convexity': probe_strict_convexity,
    'mlur': probe_mlur,
    'kadec': probe_kadec,
    'smoothness': probe_smoothness,
    'reverse_convergence': probe_reverse_convergence,
    'doubly_bad': probe_doubly_bad,
}
