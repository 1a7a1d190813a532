from fractions import Fraction

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from tree_core.domain import TreeFn
from tree_core.generators import augment_dyadic, comb, injection_tree
from tree_core.services import build_presentation, explicit_tree, node_by_class, unfold
from utils.exceptions import ParamOutOfRange, ShapeViolation, UnsupportedPresentation
from utils.testing import random_weighted_tree, tree_functions, weighted_trees
from weights.domain import WeightFn
from weights.services import check_conditions, classify_points, derive_weights
from .domain import IndexedFamily
from .services import (
    assemble_matrix, bump_map, check_talagrand, export_triplets, linear_rank, op_R, op_S, op_T_dyadic,
    op_T_special, reconstruct_RF, sample_functions, sample_indicators, select_reconstruction_set,
    smooth_cutoff, special_partners, witness_order,
)


def on_nodes(tree, values):
    return TreeFn(tree, {node_by_class(tree, c): v for c, v in values.items()})


def fork():
    """u below two leaves, every rho 1/2"""
    tree = explicit_tree({'u': None, 'a': 'u', 'b': 'u'})
    return tree, WeightFn.constant(tree.presentation, Fraction(1, 2))


def dyadic_lambda(h, N):
    tree = augment_dyadic(injection_tree(h, N))
    return tree, derive_weights('lambda', tree)


class RSOperatorTests(SimpleTestCase):

    @given(weighted_trees(max_nodes=8), st.data())
    @settings(max_examples=40, deadline=None)
    def test_R_telescopes_on_indicators(self, weighted, data):
        tree, weight = weighted
        u = data.draw(st.sampled_from(tree.nodes))
        family = op_R(tree, weight, TreeFn.down_indicator(tree, u))
        self.assertEqual(family.l1(), weight.at(tree, u))

    @given(weighted_trees(max_nodes=8), st.data())
    @settings(max_examples=40, deadline=None)
    def test_S_is_bounded_by_the_sup_norm(self, weighted, data):
        tree, weight = weighted
        f = data.draw(tree_functions(tree))
        self.assertLessEqual(op_S(tree, weight, f).sup(), f.sup())

    def test_S_vanishes_at_bad_points(self):
        presentation = build_presentation({'classes': [
            {'id': 'R', 'rho': '1/2', 'children': [{'target': 'L', 'multiplicity': 'omega'}]},
            {'id': 'L', 'rho': '1/2'},
        ]})
        tree = unfold(presentation, depth=1, copies=2)
        weight = WeightFn.from_presentation(presentation)
        root = tree.nodes[0]
        family = op_S(tree, weight, TreeFn.indicator(tree, tree.nodes))
        self.assertEqual(family(root), 0)
        self.assertEqual(len(family), 2)

    def test_S_subtracts_equal_successors(self):
        tree, weight = fork()
        f = on_nodes(tree, {'u': 1, 'a': Fraction(1, 2), 'b': Fraction(1, 2)})
        family = op_S(tree, weight, f)
        self.assertEqual(family(node_by_class(tree, 'u')), 0)
        self.assertEqual(family(node_by_class(tree, 'a')), Fraction(1, 2))

    @given(st.integers(min_value=0, max_value=10 ** 6), st.integers(min_value=1, max_value=9))
    @settings(max_examples=40, deadline=None)
    def test_R_and_S_together_are_injective(self, seed, size):
        tree, weight = random_weighted_tree(seed, size)
        matrix = assemble_matrix(tree, weight)
        self.assertEqual(matrix.shape, (2 * size, size))
        self.assertEqual(linear_rank(matrix), size)

    def test_indicator_images_on_large_random_trees(self):
        for seed in range(50):
            tree, weight = random_weighted_tree(seed, 4 * seed + 4)
            classification = classify_points(tree.presentation, weight)
            for u in tree.nodes:
                indicator = TreeFn.down_indicator(tree, u)
                rho = weight.at(tree, u)
                delta = classification[tree.class_of(u)].delta
                self.assertLessEqual(op_S(tree, weight, indicator, classification).l1(), delta + rho)
                self.assertEqual(op_R(tree, weight, indicator).l1(), rho)

    def test_linear_rank_of_dense_rows(self):
        self.assertEqual(linear_rank([[1, 2], [2, 4]]), 1)
        self.assertEqual(linear_rank([[1, 0], [0, Fraction(1, 3)]]), 2)
        self.assertEqual(linear_rank([[0, 0]]), 0)

    def test_matrix_rejects_pair_indexed_operators(self):
        tree, weight = fork()
        with self.assertRaises(ParamOutOfRange):
            assemble_matrix(tree, weight, ops=('T_special',))

    def test_triplet_export(self):
        tree, weight = fork()
        text = export_triplets(assemble_matrix(tree, weight))
        header, *lines = text.strip().split('\n')
        self.assertTrue(header.startswith('# 6 x 3'))
        self.assertTrue(all(line.startswith(('R:', 'S:')) for line in lines))


class TalagrandTests(SimpleTestCase):

    def test_special_pair_carries_the_witness(self):
        tree, weight = fork()
        u, a = node_by_class(tree, 'u'), node_by_class(tree, 'a')
        self.assertIn(u, special_partners(tree, weight)[a])
        f = on_nodes(tree, {'u': 1, 'a': Fraction(1, 2), 'b': Fraction(1, 2)})
        family = op_T_special(tree, weight, f)
        self.assertEqual(family((u, a)), Fraction(1, 2))
        report = check_talagrand(lambda g: op_T_special(tree, weight, g), [f], name='T_special')
        self.assertTrue(report.passed)
        self.assertEqual(report.witnesses[0]['index'], family.format_index((u, a)))

    def test_special_operator_needs_finite_level_sets(self):
        presentation = comb()
        tree = unfold(presentation, depth=2, copies=1)
        with self.assertRaises(UnsupportedPresentation):
            op_T_special(tree, WeightFn.constant(presentation, 1), TreeFn.zero(tree))

    def test_special_operator_on_random_trees(self):
        checked = 0
        for seed in range(20):
            tree, weight = random_weighted_tree(seed, seed % 10 + 2)
            self.assertTrue(check_conditions(tree.presentation, weight, 'T8_1').passed, seed)
            samples = sample_functions(tree, 50, seed=seed)
            report = check_talagrand(lambda f: op_T_special(tree, weight, f), samples, name='T_special')
            self.assertTrue(report.passed, report.counterexamples)
            checked += report.samples
        self.assertEqual(checked, 1000)

    def test_dyadic_operator_on_augmented_injection_tree(self):
        tree, weight = dyadic_lambda(2, 3)
        samples = sample_functions(tree, 800, seed=7) + sample_indicators(tree, 200, seed=7)
        report = check_talagrand(lambda f: op_T_dyadic(tree, weight, f), samples, name='T_dyadic')
        self.assertTrue(report.passed, report.counterexamples)
        self.assertEqual(report.samples, 1000)

    def test_dyadic_leaf_keeps_f(self):
        tree, weight = dyadic_lambda(1, 2)
        leaf = tree.maximal[0]
        family = op_T_dyadic(tree, weight, TreeFn(tree, {leaf: Fraction(3, 4)}))
        self.assertEqual(family(leaf), Fraction(3, 4))

    def test_dyadic_shape_is_enforced(self):
        tree, weight = fork()
        with self.assertRaises(ShapeViolation):
            op_T_dyadic(tree, weight, TreeFn.zero(tree))

    def test_family_shape_is_checked(self):
        with self.assertRaises(ShapeViolation):
            IndexedFamily({}, shape='matrix')

    def test_reports_counterexamples(self):
        tree, weight = fork()
        f = on_nodes(tree, {'u': 1})
        report = check_talagrand(lambda g: IndexedFamily.zero(), [f, TreeFn.zero(tree)])
        self.assertFalse(report.passed)
        self.assertEqual(report.samples, 1)
        self.assertEqual(report.counterexamples[0]['max_points'], ['u.0#0'])

    def test_samples_are_seeded(self):
        tree, _ = dyadic_lambda(1, 3)
        first = sample_functions(tree, 5, seed=3)
        self.assertEqual(first, sample_functions(tree, 5, seed=3))
        self.assertTrue(all(not f.is_zero() for f in first))


class BumpMapTests(SimpleTestCase):

    def test_smooth_cutoff(self):
        self.assertEqual(smooth_cutoff(Fraction(1, 2)), 0)
        self.assertEqual(smooth_cutoff(Fraction(3, 4)), Fraction(1, 2))
        self.assertEqual(smooth_cutoff(-2), 1)

    def test_witness_order(self):
        tree = explicit_tree({'c0': None})
        self.assertEqual(witness_order(tree, on_nodes(tree, {'c0': 1}), tree.nodes[0]), 0)
        self.assertEqual(witness_order(tree, on_nodes(tree, {'c0': Fraction(1, 4)}), tree.nodes[0]), 2)

    def test_witness_order_needs_a_strict_drop(self):
        tree = explicit_tree({'c0': None, 'c1': 'c0'})
        f = on_nodes(tree, {'c0': 1, 'c1': 1})
        with self.assertRaises(ParamOutOfRange):
            witness_order(tree, f, tree.nodes[0])

    def test_bump_map_lands_in_U(self):
        tree = explicit_tree({'c0': None, 'c1': 'c0'})
        c0 = tree.nodes[0]
        f = on_nodes(tree, {'c0': 1, 'c1': Fraction(1, 4)})
        result = bump_map(tree, f, 3)
        self.assertTrue(result.in_u)
        self.assertEqual(result.witness, (c0, 0))
        self.assertEqual([result.family((c0, n)) for n in range(4)], [Fraction(1, 2 ** n) for n in range(4)])
        self.assertTrue(bump_map(tree, TreeFn.zero(tree), 2).in_u)
        with self.assertRaises(ParamOutOfRange):
            bump_map(tree, f, -1)

    def test_reconstruction_stays_within_epsilon(self):
        tree = explicit_tree({'c0': None, 'c1': 'c0'})
        f = on_nodes(tree, {'c0': 1, 'c1': Fraction(1, 4)})
        epsilon = Fraction(1, 2)
        chosen, delta = select_reconstruction_set(tree, f, epsilon)
        self.assertEqual(delta, 1)
        self.assertEqual(chosen, {(tree.nodes[0], 0)})
        rebuilt = reconstruct_RF(tree, f, chosen)
        self.assertLess((f - rebuilt).sup(), epsilon)
        with self.assertRaises(ParamOutOfRange):
            select_reconstruction_set(tree, f, 0)

    def test_bump_map_on_random_functions(self):
        for seed in range(25):
            tree, _ = random_weighted_tree(seed, seed % 12 + 1)
            for f in sample_functions(tree, 20, seed=seed):
                result = bump_map(tree, f, 8)
                self.assertTrue(result.in_u)
                self.assertIsNotNone(result.witness)
                self.assertEqual(abs(f(result.witness[0])), f.sup())
                for node, n in result.family.support:
                    self.assertLessEqual(abs(result.family((node, n))), Fraction(1, 2 ** n))

    def test_reconstruction_on_random_functions(self):
        rng = np.random.default_rng(11)
        for seed in range(20):
            tree, _ = random_weighted_tree(seed, seed % 12 + 1)
            for f in sample_functions(tree, 10, seed=seed):
                epsilon = Fraction(int(rng.integers(1, 17)), 4)
                chosen, _ = select_reconstruction_set(tree, f, epsilon)
                self.assertLess((f - reconstruct_RF(tree, f, chosen)).sup(), epsilon)
