from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
from django.test import SimpleTestCase, TestCase, override_settings
from hypothesis import given, settings, strategies as st

from tree_core.domain import ROOT, TreeFn
from tree_core.services import build_presentation, explicit_tree, node_by_class, unfold
from utils.exceptions import IndexOutOfRange, ParamOutOfRange, SizeBudgetExceeded
from utils.testing import random_weighted_tree, rationals, tree_functions, trees, weighted_trees
from weights.domain import WeightFn
from weights.services import classify_points
from .composite import (
    combine_lur, composite_lur, composite_mlur, dual_levels, dual_sc_norm, injection_from_operators,
    injection_sc_norm, mlur_segments,
)
from .domain import NormValue
from .elementary import (
    day_norm, day_squared_recursive, day_squared_sorted, elementary_norms, ordinal_norm, ordinal_squared,
)
from .kadec import KadecSystem, antichain_mean, kadec_norm, monotone_distance
from .models import NormEvaluation
from .oracles import NORM_REGISTRY, get_oracle
from .series import stabilized_sum
from .services import NormEvaluationService, evaluate_norm, function_digest

EXACT_NORMS = ('sup', 'osc', 'day', 'composite_lur', 'composite_mlur', 'injection_sc', 'dual_sc')


def star(leaves):
    parents = {'r': None}
    parents.update({leaf: 'r' for leaf in leaves})
    return explicit_tree(parents)


def path(size):
    parents = {'c0': None}
    parents.update({f'c{i}': f'c{i - 1}' for i in range(1, size)})
    return explicit_tree(parents)


def on_nodes(tree, values):
    return TreeFn(tree, {node_by_class(tree, c): v for c, v in values.items()})


class StabilizedSumTests(SimpleTestCase):

    @given(st.lists(st.tuples(rationals(), rationals()).map(lambda p: (abs(p[0]), abs(p[1]))), min_size=1, max_size=5))
    @settings(max_examples=60, deadline=None)
    def test_matches_partial_sums(self, lines):
        weight, rate = Fraction(1, 2), Fraction(1, 2)
        exact = stabilized_sum(lines, weight, rate)
        partial = sum(
            (weight ** m * max(a + rate ** m * b for a, b in lines) for m in range(1, 61)),
            Fraction(0),
        )
        top = max(a + b for a, b in lines)
        self.assertLessEqual(partial, exact)
        self.assertLessEqual(exact - partial, top * weight ** 60 * 2)

    def test_empty_family_is_zero(self):
        self.assertEqual(stabilized_sum([], Fraction(1, 2), Fraction(1, 2)), 0)

    def test_crossing_lines(self):
        # (0, 4) wins at m = 1, (1, 0) from m = 2 on
        lines = [(Fraction(1), Fraction(0)), (Fraction(0), Fraction(4))]
        self.assertEqual(stabilized_sum(lines, Fraction(1, 2), Fraction(1, 2)), Fraction(3, 2))


class ElementaryNormTests(SimpleTestCase):

    def test_sup_and_osc(self):
        tree = path(3)
        f = on_nodes(tree, {'c0': 1, 'c1': -2})
        self.assertEqual(elementary_norms(f, 'sup').value, 2)
        # osc over every node includes the zero at c2
        self.assertEqual(elementary_norms(f, 'osc').squared, 4 + 9)

    def test_unknown_kind(self):
        with self.assertRaises(ParamOutOfRange):
            elementary_norms({}, 'l2')

    def test_day_worked_value(self):
        self.assertEqual(day_norm([2, 1]).squared, Fraction(9, 4))

    @given(st.lists(rationals(), max_size=6))
    @settings(max_examples=200, deadline=None)
    def test_day_sorted_is_the_sup_over_orderings(self, values):
        brute = max(
            (sum((v * v / 2 ** n for n, v in enumerate(order, start=1)), Fraction(0)) for order in permutations(values)),
            default=Fraction(0),
        )
        self.assertEqual(day_squared_sorted(values), brute)

    @given(st.lists(rationals(), max_size=5))
    @settings(max_examples=60, deadline=None)
    def test_day_recursive_agrees_with_sorted(self, values):
        self.assertEqual(day_squared_recursive(values), day_squared_sorted(values))

    def test_day_mode_is_checked(self):
        with self.assertRaises(ParamOutOfRange):
            day_norm([1], mode='lazy')


class OrdinalNormTests(SimpleTestCase):

    def test_two_point_chain(self):
        self.assertEqual(ordinal_squared([1, 1]), Fraction(17, 48))

    def test_single_point(self):
        self.assertEqual(ordinal_squared([Fraction(-3, 2)]), Fraction(9, 4))

    def test_norm_value_is_certified(self):
        value = ordinal_norm([1, 1])
        self.assertEqual(value.squared, Fraction(17, 48))
        self.assertLessEqual(value.lower * value.lower, Fraction(17, 48))
        self.assertLessEqual(Fraction(17, 48), value.upper * value.upper)

    def test_interval_bounds(self):
        with self.assertRaises(IndexOutOfRange):
            ordinal_squared([1, 2], alpha=1, gamma=2)

    @given(st.lists(rationals(), min_size=1, max_size=64))
    @settings(max_examples=500, deadline=None)
    def test_equivalence_with_sup(self, values):
        sup = max(v * v for v in values)
        square = ordinal_squared(values)
        self.assertLessEqual(sup / 4, square)
        self.assertLessEqual(square, sup)

    def test_long_chains(self):
        rng = np.random.default_rng(11)
        for length in (32, 48, 64):
            values = [Fraction(int(v), 4) for v in rng.integers(-16, 17, size=length)]
            sup = max(v * v for v in values)
            square = ordinal_squared(values)
            self.assertTrue(sup / 4 <= square <= sup)

    @given(st.integers(min_value=1, max_value=6).flatmap(
        lambda n: st.tuples(st.lists(rationals(), min_size=n, max_size=n), st.lists(rationals(), min_size=n, max_size=n))
    ))
    @settings(max_examples=200, deadline=None)
    def test_strictly_convex(self, pair):
        x, y = pair
        if x == y:
            return
        middle = [(a + b) / 2 for a, b in zip(x, y)]
        self.assertLess(ordinal_squared(middle), (ordinal_squared(x) + ordinal_squared(y)) / 2)


class MonotoneDistanceTests(SimpleTestCase):

    @staticmethod
    def brute_force(tree, f, r, sign):
        """Least epsilon on the 1/8 grid admitting a non-negative decreasing g"""
        region = tree.up_set(r)
        h = {t: sign * f(t) for t in region}
        for k in range(0, 200):
            epsilon = Fraction(k, 8)
            # smallest decreasing g above max(0, h - eps)
            lower = {t: max([Fraction(0)] + [h[u] - epsilon for u in tree.up_set(t)]) for t in region}
            if all(lower[t] <= h[t] + epsilon for t in region):
                return epsilon
        raise AssertionError('grid exhausted')

    def test_chain_examples(self):
        tree = path(2)
        self.assertEqual(monotone_distance(on_nodes(tree, {'c1': 1})).value, Fraction(1, 2))
        self.assertEqual(monotone_distance(on_nodes(tree, {'c0': -1}), sign=1).value, 1)

    def test_decreasing_function_is_at_distance_zero(self):
        tree = path(3)
        f = on_nodes(tree, {'c0': 3, 'c1': 2, 'c2': 1})
        self.assertEqual(monotone_distance(f).value, 0)

    @given(trees(max_nodes=8).flatmap(lambda tree: tree_functions(tree)), st.sampled_from((1, -1)))
    @settings(max_examples=120, deadline=None)
    def test_matches_grid_feasibility(self, f, sign):
        tree = f.tree
        for r in (ROOT,) + tree.nodes[:3]:
            self.assertEqual(monotone_distance(f, r, sign).value, self.brute_force(tree, f, r, sign))


class AntichainMeanTests(SimpleTestCase):

    @staticmethod
    def brute_force(tree, f, r, l):
        region = tree.up_set(r)
        best = Fraction(0)
        for size in range(1, min(l, len(region)) + 1):
            for chosen in combinations(region, size):
                if any(tree.comparable(a, b) for a, b in combinations(chosen, 2)):
                    continue
                best = max(best, sum((abs(f(t)) for t in chosen), Fraction(0)))
        return best / l

    def test_star(self):
        tree = star(['x', 'y', 'z'])
        f = on_nodes(tree, {'x': 3, 'y': 2, 'z': 1})
        self.assertEqual(antichain_mean(f, ROOT, 2).value, Fraction(5, 2))

    def test_chain_uses_singletons(self):
        tree = path(4)
        f = on_nodes(tree, {'c0': 1, 'c2': -5, 'c3': 2})
        self.assertEqual(antichain_mean(f, ROOT, 3).value, Fraction(5, 3))

    def test_l_must_be_positive(self):
        tree = path(1)
        with self.assertRaises(ParamOutOfRange):
            antichain_mean(TreeFn.zero(tree), ROOT, 0)

    @given(trees(max_nodes=12).flatmap(lambda tree: tree_functions(tree)), st.integers(min_value=1, max_value=5))
    @settings(max_examples=80, deadline=None)
    def test_matches_enumeration(self, f, l):
        tree = f.tree
        for r in (ROOT, tree.nodes[-1]):
            self.assertEqual(antichain_mean(f, r, l).value, self.brute_force(tree, f, r, l))


class CompositeNormTests(SimpleTestCase):

    def test_combine_lur_without_families_is_the_base(self):
        oracle = combine_lur(lambda f: sum(v * v for v in f), [])
        self.assertEqual(oracle.squared([3, 4]), 25)

    def test_combine_lur_single_family(self):
        oracle = combine_lur(
            lambda f: Fraction(0),
            [(lambda f: Fraction(f[0]) ** 2, lambda f: Fraction(f[1]) ** 2)],
        )
        # sum_m 2^-m (a + 2^-m b) = a + b / 3
        self.assertEqual(oracle.squared([1, 3]), 1 + Fraction(9, 3))

    def test_mlur_on_single_node(self):
        tree = path(1)
        weight = WeightFn({'c0': Fraction(1, 2)})
        f = on_nodes(tree, {'c0': 1})
        # 1 + (2 phi^2 + v^2) / 8 with phi^2 = (rho v)^2 + v^2
        self.assertEqual(composite_mlur(tree, weight).squared(f), Fraction(23, 16))

    def test_mlur_segments_follow_the_level_chain(self):
        tree = path(3)
        weight = WeightFn({'c0': Fraction(1, 2), 'c1': Fraction(1), 'c2': Fraction(1)})
        segments = mlur_segments(tree, weight, classify_points(tree.presentation, weight))
        c1, c2 = node_by_class(tree, 'c1'), node_by_class(tree, 'c2')
        self.assertEqual(segments[c1][1], (c1, c2))
        self.assertEqual(segments[c2][0], tree.down_set(c2))

    def test_mlur_segments_stay_on_one_branch(self):
        # r splits into x and y on the same level; only y is bad
        presentation = build_presentation({'classes': [
            {'id': 'r', 'rho': '1/2', 'children': [{'target': 'x'}, {'target': 'y'}]},
            {'id': 'x', 'rho': '1/2'},
            {'id': 'y', 'rho': '1/2', 'children': [{'target': 'z', 'multiplicity': 'omega'}]},
            {'id': 'z', 'rho': '1/2'},
        ]})
        tree = unfold(presentation, depth=2, copies=2)
        weight = WeightFn.from_presentation(presentation)
        classification = classify_points(presentation, weight)
        self.assertEqual(classification.bad_classes, {'y'})
        segments = mlur_segments(tree, weight, classification)
        r, x, y = (node_by_class(tree, name) for name in 'rxy')
        self.assertEqual(segments[x][0], (r, x))
        self.assertEqual(segments[y][0], (r, y))
        for chain, _ in segments.values():
            for first, second in combinations(chain, 2):
                self.assertTrue(tree.comparable(first, second))

    def test_lur_dominates_sup(self):
        tree, weight = random_weighted_tree(3, 5)
        oracle = composite_lur(tree, weight)
        f = TreeFn.from_vector(tree, [1, -2, 0, 1, 3])
        self.assertGreaterEqual(oracle.squared(f), 9)

    def test_index_caps(self):
        tree, weight = random_weighted_tree(5, 9)
        with self.assertRaises(SizeBudgetExceeded):
            composite_lur(tree, weight)
        with self.assertRaises(SizeBudgetExceeded):
            composite_mlur(tree, weight)

    @override_settings(RENORMLAB={'LUR_INDEX_CAP': 2})
    def test_caps_come_from_settings(self):
        with self.assertRaises(SizeBudgetExceeded):
            composite_lur(path(3), WeightFn({'c0': 1, 'c1': 1, 'c2': 1}))

    def test_injection_norm_with_zero_map_is_sup(self):
        tree = path(2)
        oracle = injection_sc_norm(lambda f: {})
        self.assertEqual(oracle.squared(on_nodes(tree, {'c1': -3})), 9)

    def test_injection_norm_of_rs(self):
        tree = path(1)
        weight = WeightFn({'c0': Fraction(1, 2)})
        oracle = injection_sc_norm(injection_from_operators(tree, weight))
        # Rf = 1/2, Sf = 1: Day = 1/2 + 1/16
        self.assertEqual(oracle.squared(on_nodes(tree, {'c0': 1})), 1 + Fraction(1, 2) + Fraction(1, 16))

    def test_dual_norm(self):
        tree = star(['x', 'y'])
        weight = WeightFn({'r': Fraction(1, 2), 'x': Fraction(1), 'y': Fraction(1, 2)})
        levels = dual_levels(tree, weight)
        self.assertEqual([level for level, _, _ in levels], [Fraction(1, 2), Fraction(1)])
        xi = on_nodes(tree, {'r': 1, 'x': -1})
        # l1 = 2; Day(|xi|) = 1/2 + 1/4; level 1/2 wedge at r: 2 -> 2; level 1 wedge at x: 1 -> 1/2 * 1/4
        expected = 4 + Fraction(3, 4) + Fraction(1, 2) * 2 + Fraction(1, 4) * Fraction(1, 2)
        self.assertEqual(dual_sc_norm(tree, weight, xi).squared, expected)


class NormAxiomTests(SimpleTestCase):

    @given(weighted_trees(max_nodes=4), st.data())
    @settings(max_examples=25, deadline=None)
    def test_homogeneity_and_triangle(self, tree_and_weight, data):
        tree, weight = tree_and_weight
        f = data.draw(tree_functions(tree))
        g = data.draw(tree_functions(tree))
        scalar = data.draw(rationals())
        for name in EXACT_NORMS:
            oracle = get_oracle(name, tree, weight)
            self.assertEqual(oracle.squared(f * scalar), scalar * scalar * oracle.squared(f), name)
            total, left, right = oracle(f + g), oracle(f), oracle(g)
            self.assertLessEqual(total.lower, left.upper + right.upper, name)

    def test_registry_names(self):
        self.assertEqual(
            sorted(NORM_REGISTRY),
            sorted(['sup', 'osc', 'day', 'ordinal', 'composite_lur', 'composite_mlur', 'injection_sc', 'kadec', 'dual_sc']),
        )
        with self.assertRaises(ParamOutOfRange):
            get_oracle('l2', path(1), WeightFn({'c0': 1}))

    def test_ordinal_needs_a_chain(self):
        tree = star(['x', 'y'])
        with self.assertRaises(ParamOutOfRange):
            get_oracle('ordinal', tree, WeightFn({'r': 1, 'x': 1, 'y': 1}))
        chain = path(2)
        oracle = get_oracle('ordinal', chain, WeightFn({'c0': 1, 'c1': 1}))
        self.assertEqual(oracle.squared(on_nodes(chain, {'c0': 1, 'c1': 1})), Fraction(17, 48))


def single_node_oracle(v, rho, size=40):
    """Independent plain-float solve of the one-node Kadec system"""
    pairs = [(2.0 ** -m, 2.0 ** -l) for m in range(1, size + 1) for l in range(1, size + 1)]
    antichain = sum(v / l * 2.0 ** -l for l in range(1, size + 1))

    def clause(c, a, b):
        return sum(pm * pl * (c + pm * a + pl * b) for pm, pl in pairs)

    top = 0.0
    for _ in range(200):
        top = (v + antichain + 0.5 * clause(v, 0, top) + 0.25 * clause(v, 0, top) + 0.5 * clause(v, 0, 0)) / 7
    root = (
        v + antichain
        + 0.5 * clause(v, v / 2, top)
        + 0.25 * clause(v, v / 2, top)
        + 0.5 * clause(v, 0, 0)
        + 0.5 * clause(rho * v, v / 2, top)
    ) / 7
    return root


class KadecTests(SimpleTestCase):

    def test_weight_jump_at_s_is_left_out(self):
        tree = path(2)
        c1 = node_by_class(tree, 'c1')
        f = on_nodes(tree, {'c1': 1})
        flat = KadecSystem(tree, WeightFn({'c0': Fraction(1, 2), 'c1': Fraction(1, 2)}), f)
        steep = KadecSystem(tree, WeightFn({'c0': Fraction(1, 2), 'c1': Fraction(3, 4)}), f)
        support = frozenset([c1])
        self.assertAlmostEqual(flat.solve(support, c1)[0], steep.solve(support, c1)[0], places=9)
        self.assertGreater(steep.solve(support, ROOT)[0], flat.solve(support, ROOT)[0])

    def test_zero_function(self):
        tree = path(2)
        value = kadec_norm(tree, WeightFn({'c0': 1, 'c1': 1}), TreeFn.zero(tree))
        self.assertEqual(value.value, 0)
        self.assertTrue(value.is_exact)

    def test_single_node_matches_scalar_oracle(self):
        tree = path(1)
        for v, rho in ((1, Fraction(1, 2)), (3, Fraction(1)), (Fraction(1, 4), Fraction(1, 8))):
            weight = WeightFn({'c0': rho})
            value = kadec_norm(tree, weight, on_nodes(tree, {'c0': v}))
            self.assertAlmostEqual(float(value.value), single_node_oracle(float(v), float(rho)), delta=1e-9)
            self.assertLess(value.error_radius, Fraction(1, 10 ** 9))

    def test_node_budget(self):
        tree, weight = random_weighted_tree(1, 21)
        f = TreeFn(tree, {tree.nodes[0]: 1})
        with self.assertRaises(SizeBudgetExceeded):
            kadec_norm(tree, weight, f)

    def test_bounds_and_contraction_on_random_trees(self):
        rng = np.random.default_rng(2024)
        for seed in range(20):
            tree, weight = random_weighted_tree(seed, int(rng.integers(2, 17)))
            for _ in range(100):
                chosen = rng.choice(len(tree), size=min(3, len(tree)), replace=False)
                f = TreeFn(tree, {
                    tree.nodes[int(i)]: Fraction(int(rng.integers(1, 9)) * int(rng.choice([-1, 1])), 4)
                    for i in chosen
                })
                system = KadecSystem(tree, weight, f)
                value = system.evaluate()
                sup = f.sup()
                self.assertLessEqual(value.error_radius, Fraction(1, 10 ** 9))
                self.assertLessEqual(sup / 4, value.upper)
                self.assertLessEqual(value.lower, sup)
                # past the first two steps every residual shrinks
                for history in system.state.residuals.values():
                    for before, after in zip(history[2:], history[3:]):
                        if before > 0:
                            self.assertLess(after / before, 1)

    def test_kadec_oracle_is_flagged_inexact(self):
        tree = path(1)
        oracle = get_oracle('kadec', tree, WeightFn({'c0': 1}))
        self.assertFalse(oracle.exact)
        self.assertGreater(oracle(on_nodes(tree, {'c0': 1})).value, 0)


class NormValueTests(SimpleTestCase):

    def test_perfect_square_is_exact(self):
        value = NormValue.from_squared(Fraction(9, 4))
        self.assertEqual(value.value, Fraction(3, 2))
        self.assertTrue(value.is_exact)
        self.assertEqual(value.as_document()['dyadic'], [3, -1])

    def test_certified_radius(self):
        value = NormValue.from_squared(2)
        self.assertFalse(value.is_exact)
        self.assertTrue(value.lower ** 2 <= 2 <= value.upper ** 2)


class NormEvaluationServiceTests(TestCase):

    def test_record_and_history(self):
        tree = path(2)
        weight = WeightFn({'c0': 1, 'c1': 1})
        f = on_nodes(tree, {'c0': 1, 'c1': 1})
        value = evaluate_norm('sup', tree, weight, f)
        record = NormEvaluationService.record('sup', tree, weight, f, value)
        self.assertEqual(record.value, '1')
        self.assertEqual(record.error_radius, '0')
        self.assertEqual(record.input_digest, function_digest(f))
        self.assertEqual(NormEvaluationService.history('sup', f).count(), 1)
        self.assertEqual(NormEvaluation.objects.count(), 1)
