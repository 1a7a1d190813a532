from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from tree_core.domain import TreeFn
from tree_core.generators import chain, comb, injection_tree, kary
from tree_core.services import build_presentation, explicit_tree, node_by_class, unfold
from utils.exceptions import InvalidWeight, ParamOutOfRange, PremiseViolated
from utils.testing import presentations, weighted_trees
from .domain import WeightFn
from .fans import fan_function, fan_triple, split_point
from .serializers import PointClassSerializer, WeightDocumentSerializer, classification_rows, weight_to_document
from .services import (
    THEOREMS, check_conditions, classify_points, derivation_index, derive_weights, ever_branching_core,
    fan_points, special_decomposition, validate_weight,
)


def omega_chain(*rhos):
    """C0 -omega-> C1 -omega-> ... with the given rho values"""
    classes = []
    for position, rho in enumerate(rhos):
        children = [{'target': f'C{position + 1}', 'multiplicity': 'omega'}] if position + 1 < len(rhos) else []
        classes.append({'id': f'C{position}', 'rho': str(rho), 'children': children})
    return build_presentation({'classes': classes})


def constant(presentation, value='1/2'):
    return WeightFn.constant(presentation, Fraction(value))


class ValidateWeightTests(SimpleTestCase):

    def test_decreasing_edge(self):
        presentation = chain(2)
        report = validate_weight(presentation, WeightFn({'c0': Fraction(3, 4), 'c1': Fraction(1, 2)}))
        self.assertFalse(report.valid)
        self.assertEqual(report.violations[0]['edge'], ['c0', 'c1'])

    def test_missing_class(self):
        report = validate_weight(chain(2), WeightFn({'c0': 1}))
        self.assertEqual(report.violations, ({'class': 'c1', 'reason': 'missing rho'},))

    def test_normalized_values_stay_inside_unit_interval(self):
        weight = WeightFn({'c0': Fraction(1, 2), 'c1': Fraction(1)}, normalized=True)
        report = validate_weight(chain(2), weight)
        self.assertEqual([v['reason'] for v in report.violations], ['outside (0,1)'])

    def test_cycles_force_constant_rho(self):
        presentation = build_presentation({'classes': [
            {'id': 'A', 'children': [{'target': 'B'}]},
            {'id': 'B', 'children': [{'target': 'A'}]},
        ]})
        report = validate_weight(presentation, WeightFn({'A': Fraction(1, 2), 'B': Fraction(1, 2)}))
        self.assertTrue(report.valid)
        report = validate_weight(presentation, WeightFn({'A': Fraction(1, 2), 'B': Fraction(3, 4)}))
        self.assertIn('rho not constant on cycle', [v['reason'] for v in report.violations])

    @given(weighted_trees(max_nodes=8))
    @settings(max_examples=40, deadline=None)
    def test_generated_weights_are_valid(self, weighted):
        tree, weight = weighted
        self.assertTrue(validate_weight(tree.presentation, weight).valid)


class ClassifyPointsTests(SimpleTestCase):

    def test_omega_edge_to_equal_rho_is_bad(self):
        presentation = omega_chain('1/2', '1/2')
        classification = classify_points(presentation, WeightFn.from_presentation(presentation))
        self.assertEqual(classification.bad_classes, {'C0'})
        self.assertEqual(classification['C1'].delta, 1)

    def test_good_point_delta(self):
        presentation = omega_chain('1/2', '3/4')
        classification = classify_points(presentation, WeightFn.from_presentation(presentation))
        self.assertFalse(classification.bad_classes)
        self.assertEqual(classification['C0'].delta, Fraction(1, 4))

    def test_equal_one_edges_form_F(self):
        presentation = chain(2)
        classification = classify_points(presentation, constant(presentation))
        self.assertEqual(classification['c0'].equal_edges, (0,))
        self.assertEqual(classification['c0'].delta, 1)
        tree = unfold(presentation, depth=1, copies=1)
        root = tree.nodes[0]
        self.assertEqual(classification.equal_successors(tree, root), tree.children(root))

    @given(presentations(), st.integers(min_value=1, max_value=2))
    @settings(max_examples=100, deadline=None)
    def test_agrees_with_equal_successor_counts_on_unfoldings(self, weighted, depth):
        presentation, weight = weighted
        classification = classify_points(presentation, weight)
        for copies in range(1, 9):
            tree = unfold(presentation, depth=depth, copies=copies)
            for node in tree.nodes:
                if node in tree.truncated:
                    continue
                point = classification[tree.class_of(node)]
                rho = weight.at(tree, node)
                levels = [weight.at(tree, child) for child in tree.children(node)]
                equal = sum(1 for level in levels if level == rho)
                if point.is_bad:
                    self.assertGreaterEqual(equal, len(point.equal_edges) + copies)
                    continue
                self.assertEqual(equal, len(point.equal_edges))
                self.assertEqual(point.delta, min([Fraction(1)] + [level - rho for level in levels if level != rho]))

    def test_rejects_invalid_weight(self):
        with self.assertRaises(InvalidWeight):
            classify_points(chain(2), WeightFn({'c0': 1, 'c1': Fraction(1, 2)}))

    def test_rows_serialize(self):
        presentation = omega_chain('1/2', '1/2')
        classification = classify_points(presentation, WeightFn.from_presentation(presentation))
        rows = PointClassSerializer(classification_rows(classification), many=True).data
        self.assertEqual([row['status'] for row in rows], ['bad', 'good'])
        self.assertEqual(rows[0]['rho'], '1/2')


class FanTests(SimpleTestCase):

    def test_branching_self_loop_is_a_fan(self):
        presentation = kary(2)
        self.assertEqual(fan_points(presentation, constant(presentation)), {'K'})

    def test_constant_chain_has_no_fan(self):
        presentation = chain(4)
        self.assertFalse(fan_points(presentation, constant(presentation)))

    def test_fan_function_halves_per_level(self):
        tree = explicit_tree({'r': None, 'a': 'r', 'b': 'r', 'c': 'a', 'd': 'a'})
        core = set(tree.nodes)
        node = {name: node_by_class(tree, name) for name in 'rabcd'}
        phi = fan_function(tree, core, node['r'], 2)
        self.assertEqual(phi(node['r']), 0)
        self.assertEqual(phi(node['a']), Fraction(1, 2))
        self.assertEqual(phi(node['b']), Fraction(1, 2))
        self.assertEqual(phi(node['c']), Fraction(1, 4))
        shallow = fan_function(tree, core, node['r'], 1)
        self.assertEqual(shallow(node['c']), 0)

    def test_fan_triple_midpoint(self):
        tree = unfold(kary(2, 4), depth=1, copies=1)
        core = set(tree.nodes)
        root = tree.nodes[0]
        self.assertEqual(set(split_point(tree, core, root)), set(tree.children(root)))
        for depth in (1, 2, 3):
            x, y, middle = fan_triple(tree, core, root, depth)
            self.assertEqual(middle, (x + y) * Fraction(1, 2))
        leaf = tree.maximal[0]
        self.assertIsNone(fan_triple(tree, core, leaf, 2))


class DerivationIndexTests(SimpleTestCase):

    def test_chain_goes_in_one_round(self):
        tree = unfold(chain(3), depth=1, copies=1)
        index = derivation_index(tree, tree.nodes)
        self.assertEqual(set(index.index.values()), {0})
        self.assertEqual(len(index.rounds), 1)

    def test_branching_point_survives_a_round(self):
        tree = explicit_tree({'r': None, 'a': 'r', 'b': 'r'})
        index = derivation_index(tree, tree.nodes)
        self.assertEqual(index(node_by_class(tree, 'r')), 1)
        self.assertEqual(index(node_by_class(tree, 'a')), 0)

    def test_core_on_presentations(self):
        presentation = kary(2)
        result = ever_branching_core(presentation, weight=constant(presentation), level='1/2')
        self.assertEqual(result.core, {'K'})
        self.assertTrue(result.unsupported)

    def test_core_on_finite_trees_is_empty(self):
        tree = unfold(kary(2, 3), depth=1, copies=1)
        result = ever_branching_core(tree, tree.nodes)
        self.assertFalse(result.core)
        self.assertEqual(result.derivation(tree.nodes[0]), 2)

    def test_core_needs_a_member_set(self):
        with self.assertRaises(ParamOutOfRange):
            ever_branching_core(chain(2))

    def test_special_decomposition(self):
        tree = unfold(kary(2, 3), depth=1, copies=1)
        self.assertEqual([len(piece) for piece in special_decomposition(tree).pieces], [1, 2, 4])
        self.assertEqual(len(special_decomposition(chain(3)).pieces), 3)
        failure = special_decomposition(comb())
        self.assertFalse(failure)
        self.assertEqual(failure.witness, ['S'])


class DeriveWeightsTests(SimpleTestCase):

    def test_lambda_weight(self):
        tree = injection_tree(1, 2)
        weight = derive_weights('lambda', tree)
        self.assertEqual(weight.rho, {'L[]': 0, 'L[0]': 1, 'L[1]': Fraction(1, 2)})

    def test_upgrade_removes_bad_points(self):
        presentation = omega_chain('1/2', '1/2')
        weight = derive_weights('upgrade', presentation, WeightFn.from_presentation(presentation))
        self.assertEqual(weight.rho, {'C0': Fraction(1, 2), 'C1': 1})
        self.assertFalse(classify_points(presentation, weight).bad_classes)

    def test_upgrade_premise(self):
        presentation = omega_chain('1/2', '1/2', '1/2')
        with self.assertRaises(PremiseViolated) as caught:
            derive_weights('upgrade', presentation, WeightFn.from_presentation(presentation))
        self.assertEqual(caught.exception.witness['class'], 'C1')

    def test_sigma_fragmentation(self):
        weight = derive_weights('sigma_frag', chain(2), [{'c0'}, {'c1'}])
        self.assertEqual(weight.rho, {'c0': Fraction(1, 4), 'c1': Fraction(3, 4)})
        with self.assertRaises(PremiseViolated):
            derive_weights('sigma_frag', chain(2), [{'c0'}])
        with self.assertRaises(PremiseViolated):
            derive_weights('sigma_frag', omega_chain('1/2', '1/2'), [{'C0', 'C1'}])

    @given(presentations(), st.data())
    @settings(max_examples=100, deadline=None)
    def test_sigma_fragmentation_leaves_no_bad_points(self, weighted, data):
        presentation, _ = weighted
        classes = sorted(presentation.classes)
        singletons = [{class_id} for class_id in classes]
        weight = derive_weights('sigma_frag', presentation, singletons)
        self.assertFalse(classify_points(presentation, weight).bad_classes)
        labels = data.draw(st.lists(st.integers(min_value=0, max_value=2), min_size=len(classes), max_size=len(classes)))
        pieces = [{c for c, label in zip(classes, labels) if label == piece} for piece in sorted(set(labels))]
        try:
            weight = derive_weights('sigma_frag', presentation, pieces)
        except PremiseViolated:
            return
        self.assertFalse(classify_points(presentation, weight).bad_classes)

    @given(presentations())
    @settings(max_examples=100, deadline=None)
    def test_upgrade_turns_bad_points_good(self, weighted):
        presentation, mu = weighted
        bad = classify_points(presentation, mu).bad_classes
        try:
            weight = derive_weights('upgrade', presentation, mu)
        except PremiseViolated as caught:
            self.assertIn(caught.witness['class'], bad)
            return
        self.assertTrue(validate_weight(presentation, weight).valid)
        classification = classify_points(presentation, weight)
        self.assertFalse(bad & classification.bad_classes)

    def test_unknown_mode(self):
        with self.assertRaises(ParamOutOfRange):
            derive_weights('magic', chain(2))


class CheckConditionsTests(SimpleTestCase):

    def test_bad_points_fail_no_bad_point_theorems(self):
        presentation = omega_chain('1/2', '1/2')
        weight = WeightFn.from_presentation(presentation)
        report = check_conditions(presentation, weight, 'T4_1')
        self.assertFalse(report.passed)
        self.assertIn({'condition': 'no_bad_points', 'class': 'C0'}, report.witnesses)

    def test_strictly_increasing_weight_passes_everything(self):
        presentation = omega_chain('1/4', '1/2', '3/4')
        weight = WeightFn.from_presentation(presentation)
        for theorem in THEOREMS:
            self.assertTrue(check_conditions(presentation, weight, theorem).passed, theorem)

    def test_two_bad_continuations(self):
        presentation = omega_chain('1/2', '1/2', '1/2')
        report = check_conditions(presentation, WeightFn.from_presentation(presentation), 'T5_1')
        flagged = [w['class'] for w in report.witnesses if w['condition'] == 'at_most_one_bad_continuation']
        self.assertIn('C0', flagged)

    def test_constant_cycle_fails_T7_1(self):
        presentation = comb()
        report = check_conditions(presentation, constant(presentation), 'T7_1')
        self.assertEqual(report.witnesses[0]['classes'], ['S'])
        self.assertTrue(report.notes)

    def test_unknown_theorem(self):
        with self.assertRaises(ParamOutOfRange):
            check_conditions(chain(2), constant(chain(2)), 'T9_9')


class WeightDocumentTests(SimpleTestCase):

    def test_reads_fractions(self):
        serializer = WeightDocumentSerializer(data={'rho': {'A': '1/2', 'B': '3/4'}})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        weight = serializer.to_weight()
        self.assertEqual(weight('B'), Fraction(3, 4))
        self.assertEqual(weight_to_document(weight)['rho'], {'A': '1/2', 'B': '3/4'})

    def test_rejects_empty_and_malformed(self):
        self.assertFalse(WeightDocumentSerializer(data={'rho': {}}).is_valid())
        self.assertFalse(WeightDocumentSerializer(data={'rho': {'A': 'half'}}).is_valid())

    def test_weight_lookup_of_unknown_class(self):
        with self.assertRaises(InvalidWeight):
            WeightFn({'A': 1})('B')

    def test_root_sentinel_weight(self):
        tree = unfold(chain(2), depth=1, copies=1)
        weight = WeightFn({'c0': Fraction(1, 4), 'c1': Fraction(1, 2)})
        self.assertEqual(weight.jump(tree, tree.nodes[0]), Fraction(1, 4))
        self.assertEqual(weight.jump(tree, tree.nodes[1]), Fraction(1, 4))
        self.assertEqual(TreeFn.zero(tree).sup(), 0)
