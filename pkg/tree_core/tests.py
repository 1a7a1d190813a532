import json
from fractions import Fraction

from django.test import SimpleTestCase
from hypothesis import given, settings

from utils.exceptions import BadMultiplicity, DanglingClass, ParamOutOfRange, SizeBudgetExceeded, UnknownNode
from utils.testing import trees
from .domain import ROOT, TreeFn, format_node, parse_node
from .generators import augment_dyadic, augment_pairs, chain, comb, generate, injection_tree, kary
from .serializers import FiniteTreeSerializer, presentation_to_document
from .services import (
    build_presentation, explicit_tree, lambda_neighbourhood, lambda_value, node_by_class, poset_query, unfold,
)


def small_tree():
    return explicit_tree({'r': None, 'a': 'r', 'b': 'r', 'c': 'a'})


class BuildPresentationTests(SimpleTestCase):

    def test_accepts_json_text_and_infers_roots(self):
        presentation = build_presentation(json.dumps({
            'classes': [
                {'id': 'A', 'rho': '1/2', 'children': [{'target': 'B', 'multiplicity': 'omega'}]},
                {'id': 'B', 'rho': '3/4'},
            ],
        }))
        self.assertEqual(presentation.roots, ('A',))
        self.assertTrue(presentation.has_omega_edges())
        self.assertEqual(presentation.rho_slots(), {'A': Fraction(1, 2), 'B': Fraction(3, 4)})

    def test_dangling_target(self):
        with self.assertRaises(DanglingClass):
            build_presentation({'classes': [{'id': 'A', 'children': [{'target': 'Z'}]}]})

    def test_unreachable_class(self):
        with self.assertRaises(DanglingClass):
            build_presentation({'classes': [{'id': 'A'}, {'id': 'B'}], 'roots': ['A']})

    def test_bad_multiplicity(self):
        with self.assertRaises(BadMultiplicity):
            build_presentation({'classes': [
                {'id': 'A', 'children': [{'target': 'B', 'multiplicity': 'many'}]},
                {'id': 'B'},
            ]})

    def test_duplicate_ids(self):
        with self.assertRaises(ParamOutOfRange):
            build_presentation({'classes': [{'id': 'A'}, {'id': 'A'}]})

    def test_document_survives_rebuild(self):
        presentation = comb()
        rebuilt = build_presentation(presentation_to_document(presentation))
        self.assertEqual(rebuilt.classes, presentation.classes)
        self.assertEqual(rebuilt.roots, presentation.roots)

    def test_cycles(self):
        presentation = comb()
        self.assertEqual(presentation.cycles, (frozenset({'S'}),))
        self.assertFalse(presentation.is_acyclic)
        self.assertTrue(chain(3).is_acyclic)


class UnfoldTests(SimpleTestCase):

    def test_comb_truncates_the_spine(self):
        tree = unfold(comb(), depth=3, copies=2)
        spine = [node for node in tree.nodes if tree.class_of(node) == 'S']
        leaves = [node for node in tree.nodes if tree.class_of(node) == 'L']
        self.assertEqual(len(spine), 3)
        self.assertEqual(len(leaves), 6)
        self.assertEqual(tree.truncated, frozenset({max(spine, key=len)}))
        self.assertEqual({tree.copy_index(leaf) for leaf in leaves}, {0, 1})

    def test_kary_sizes(self):
        self.assertEqual(len(unfold(kary(2, 3), depth=1, copies=1)), 7)
        self.assertEqual(len(unfold(kary(3), depth=2, copies=1)), 1 + 3)

    def test_node_budget(self):
        with self.assertRaises(SizeBudgetExceeded) as caught:
            unfold(kary(2), depth=20, copies=1, budget=100)
        self.assertEqual(caught.exception.witness['budget'], 100)

    def test_rejects_nonpositive_parameters(self):
        with self.assertRaises(ParamOutOfRange):
            unfold(chain(2), depth=0, copies=1)

    def test_parents_precede_children(self):
        tree = unfold(comb(), depth=4, copies=3)
        seen = {ROOT}
        for node in tree.nodes:
            self.assertIn(tree.parent(node), seen)
            seen.add(node)

    def test_serializer_flags_truncation(self):
        tree = unfold(comb(), depth=2, copies=1)
        data = FiniteTreeSerializer(tree).data
        self.assertEqual(data['size'], len(tree))
        self.assertEqual(len(data['truncated']), 1)
        self.assertEqual(sum(entry['truncated'] for entry in data['nodes']), 1)


class PosetQueryTests(SimpleTestCase):

    def setUp(self):
        self.tree = small_tree()
        self.r, self.a, self.b, self.c = (node_by_class(self.tree, c) for c in 'rabc')

    def test_down_and_up_sets(self):
        self.assertEqual(poset_query(self.tree, 'down_set', self.c), {self.r, self.a, self.c})
        self.assertEqual(poset_query(self.tree, 'up_set', self.a), {self.a, self.c})
        self.assertEqual(poset_query(self.tree, 'successors', self.r), {self.a, self.b})

    def test_predecessor(self):
        self.assertIsNone(poset_query(self.tree, 'predecessor', self.r))
        self.assertEqual(poset_query(self.tree, 'predecessor', self.c), self.a)

    def test_incomparable(self):
        self.assertEqual(poset_query(self.tree, 'incomparable', self.b), {self.a, self.c})

    def test_min_max_and_antichains(self):
        nodes = [self.a, self.b, self.c]
        self.assertEqual(poset_query(self.tree, 'min_of', nodes), {self.a, self.b})
        self.assertEqual(poset_query(self.tree, 'max_of', nodes), {self.b, self.c})
        self.assertTrue(poset_query(self.tree, 'is_antichain', [self.a, self.b]))
        self.assertFalse(poset_query(self.tree, 'is_antichain', [self.a, self.c]))

    def test_reverse_neighbourhood(self):
        self.assertEqual(poset_query(self.tree, 'reverse_nbhd', self.r, [self.a]), {self.r, self.b})
        with self.assertRaises(UnknownNode):
            poset_query(self.tree, 'reverse_nbhd', self.r, [self.c])

    def test_unknown_nodes_and_queries(self):
        stranger = (('zz', 0, 0),)
        with self.assertRaises(UnknownNode):
            poset_query(self.tree, 'up_set', stranger)
        with self.assertRaises(ParamOutOfRange):
            poset_query(self.tree, 'bogus', self.r)

    @given(trees(max_nodes=9))
    @settings(max_examples=50, deadline=None)
    def test_up_and_down_sets_are_dual(self, tree):
        for t in tree.nodes:
            for u in tree.nodes:
                self.assertEqual(u in tree.up_set(t), t in tree.down_set(u))

    def test_node_text_form(self):
        tree = unfold(comb(), depth=2, copies=2)
        for node in tree.nodes:
            self.assertEqual(parse_node(format_node(node)), node)
        self.assertEqual(format_node(ROOT), '0')


class TreeFnTests(SimpleTestCase):

    def test_zero_values_are_dropped(self):
        tree = small_tree()
        f = TreeFn(tree, {tree.nodes[0]: 0, tree.nodes[1]: Fraction(1, 3)})
        self.assertEqual(f.support, frozenset({tree.nodes[1]}))
        self.assertTrue((f - f).is_zero())
        self.assertEqual((2 * f).sup(), Fraction(2, 3))

    def test_rejects_foreign_nodes(self):
        with self.assertRaises(UnknownNode):
            TreeFn(small_tree(), {(('zz', 0, 0),): 1})

    def test_down_indicator(self):
        tree = small_tree()
        c = node_by_class(tree, 'c')
        self.assertEqual(len(TreeFn.down_indicator(tree, c).support), 3)


class GeneratorTests(SimpleTestCase):

    def test_injection_tree_size(self):
        self.assertEqual(len(injection_tree(2, 3)), 1 + 3 + 6)
        self.assertEqual(len(injection_tree(0, 5)), 1)

    def test_lambda_neighbourhood(self):
        tree = injection_tree(2, 3)
        node = node_by_class(tree, 'L[0]')
        self.assertEqual(lambda_value(tree.label(node)), 1)
        self.assertEqual(lambda_neighbourhood(tree, node, Fraction(1, 4)), {node})
        wider = lambda_neighbourhood(tree, node, Fraction(3, 10))
        self.assertEqual({tree.class_of(u) for u in wider}, {'L[0]', 'L[0,2]'})

    def test_augment_pairs_splits_by_parity(self):
        tree = augment_pairs(injection_tree(1, 3))
        self.assertEqual(len(tree), 6)
        under = {tree.class_of(node): tree.class_of(tree.parent(node)) for node in tree.nodes if len(node) == 3}
        self.assertEqual(under, {'L[0]': 'L[]|1', 'L[2]': 'L[]|1', 'L[1]': 'L[]|2'})

    def test_augment_dyadic_builds_a_spine(self):
        tree = augment_dyadic(injection_tree(1, 2))
        self.assertEqual(len(tree), 5)
        for node in tree.nodes:
            self.assertIn(len(tree.children(node)), (0, 2))
        spine = [node for node in tree.nodes if tree.record(node).kind == 'spine']
        self.assertTrue(all(tree.label(node) == () for node in spine))

    def test_augmentations_need_labels(self):
        with self.assertRaises(ParamOutOfRange):
            augment_pairs(small_tree())

    def test_generate_dispatch(self):
        self.assertEqual(len(generate('chain', n=4).classes), 4)
        with self.assertRaises(ParamOutOfRange):
            generate('spiral')
        with self.assertRaises(ParamOutOfRange):
            generate('chain', width=2)

    def test_canonical_form_ignores_child_order(self):
        left = explicit_tree({'r': None, 'a': 'r', 'b': 'r', 'c': 'a'})
        right = explicit_tree({'r': None, 'b': 'r', 'a': 'r', 'c': 'a'})
        self.assertEqual(left.canonical_form, right.canonical_form)
        self.assertNotEqual(left.canonical_form, unfold(chain(4), depth=1, copies=1).canonical_form)
