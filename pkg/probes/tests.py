from fractions import Fraction

from django.test import SimpleTestCase

from norms.domain import NormOracle
from norms.oracles import get_oracle
from tree_core.domain import TreeFn
from tree_core.generators import augment_pairs, injection_tree, kary
from tree_core.services import build_presentation, explicit_tree, unfold
from utils.exceptions import BudgetExceeded, IllegalMove, InvalidWeight, ParamOutOfRange
from utils.testing import random_weighted_tree
from weights.domain import WeightFn
from weights.services import check_conditions, derive_weights
from .game import BETA_STRATEGIES, choquet_game, nth_missing, replay_game
from .services import (
    estimate_mu, margin_trend, positively_proportional, probe_doubly_bad, probe_kadec, probe_mlur,
    probe_reverse_convergence, probe_smoothness, probe_strict_convexity, triangle_is_flat,
)


def path(size):
    parents = {'c0': None}
    parents.update({f'c{i}': f'c{i - 1}' for i in range(1, size)})
    return explicit_tree(parents)


def omega_star(root_rho, leaf_rho):
    return build_presentation({
        'classes': [
            {'id': 'R', 'rho': str(root_rho), 'children': [{'target': 'L', 'multiplicity': 'omega'}]},
            {'id': 'L', 'rho': str(leaf_rho)},
        ],
    })


def euclidean(tree, weight):
    return NormOracle('euclidean', lambda f: sum((v * v for v in f.values.values()), Fraction(0)))


class EstimateMuTests(SimpleTestCase):

    def test_sup_norm_gives_one_on_indicators(self):
        tree, weight = random_weighted_tree(4, 6)
        oracle = get_oracle('sup', tree, weight)
        for node in tree.nodes:
            estimate = estimate_mu(oracle, tree, node)
            self.assertEqual(estimate.value, 1.0)
            self.assertFalse(estimate.budget_exhausted)

    def test_ordinal_two_chain_matches_grid(self):
        tree = path(2)
        oracle = get_oracle('ordinal', tree, None)
        root, top = tree.nodes

        def value(x):
            return float(oracle(TreeFn(tree, {root: 1, top: Fraction(x)})).value)

        low, high, best = -2.0, 2.0, None
        for _ in range(5):
            grid = [low + (high - low) * i / 200 for i in range(201)]
            best = min(grid, key=value)
            width = (high - low) / 100
            low, high = best - width, best + width

        estimate = estimate_mu(oracle, tree, root, budget=5000)
        self.assertAlmostEqual(estimate.value, value(best), delta=1e-6)
        self.assertEqual(estimate.certificate(root), 1)

    def test_bounded_below_by_equivalence_constant(self):
        tree = path(3)
        oracle = get_oracle('ordinal', tree, None)
        for node in tree.nodes:
            estimate = estimate_mu(oracle, tree, node, budget=400)
            self.assertGreaterEqual(estimate.value, 0.5 - 1e-12)
            indicator = float(oracle(TreeFn.down_indicator(tree, node)).value)
            self.assertLessEqual(estimate.value, indicator + 1e-12)

    def test_larger_budget_never_worsens(self):
        tree = path(3)
        oracle = get_oracle('ordinal', tree, None)
        small = estimate_mu(oracle, tree, tree.nodes[0], budget=30)
        large = estimate_mu(oracle, tree, tree.nodes[0], budget=600)
        self.assertTrue(small.budget_exhausted)
        self.assertLessEqual(large.value, small.value)

    def test_strict_budget_raises_with_best_so_far(self):
        tree = path(3)
        oracle = get_oracle('ordinal', tree, None)
        with self.assertRaises(BudgetExceeded) as raised:
            estimate_mu(oracle, tree, tree.nodes[0], budget=10, strict=True)
        self.assertTrue(raised.exception.witness['budget_exhausted'])

    def test_general_form_extends_f_up_to_u(self):
        tree = path(3)
        oracle = get_oracle('sup', tree, None)
        a, b, c = tree.nodes
        f = TreeFn(tree, {a: Fraction(1, 2), b: 1})
        estimate = estimate_mu(oracle, tree, b, f=f, u=c)
        self.assertEqual(estimate.value, 1.0)
        self.assertEqual(estimate.certificate(c), 1)

    def test_general_form_needs_increasing_f(self):
        tree = path(3)
        a, b, _ = tree.nodes
        with self.assertRaises(ParamOutOfRange):
            estimate_mu(get_oracle('sup', tree, None), tree, b, f=TreeFn(tree, {a: 2, b: 1}))


class StrictConvexityProbeTests(SimpleTestCase):

    def test_triangle_equality(self):
        self.assertTrue(triangle_is_flat(Fraction(1), Fraction(1), Fraction(4)))
        self.assertFalse(triangle_is_flat(Fraction(1), Fraction(1), Fraction(2)))

    def test_proportionality(self):
        tree = path(2)
        x = TreeFn.from_vector(tree, [1, 2])
        self.assertTrue(positively_proportional(x, x * 3))
        self.assertFalse(positively_proportional(x, -x))
        self.assertFalse(positively_proportional(x, TreeFn.from_vector(tree, [1, 3])))

    def test_sup_norm_is_flat_on_fan_triples(self):
        presentation = kary(2)
        tree = unfold(presentation, depth=5, copies=1)
        weight = WeightFn.constant(presentation, Fraction(1, 2))
        report = probe_strict_convexity('sup', tree, weight, budget=10, seed=1)
        kinds = {v['kind'] for v in report.violations}
        self.assertIn('fan_triple', kinds)
        self.assertNotIn('fan_identity', kinds)
        self.assertGreater(report.statistics['fan_triples'], 0)
        self.assertFalse(report.passed)

    def test_injection_norm_has_no_flat_segment(self):
        tree, weight = random_weighted_tree(3, 5)
        self.assertTrue(check_conditions(tree.presentation, weight, 'T5_1').passed)
        report = probe_strict_convexity('injection_sc', tree, weight, budget=25, seed=2)
        self.assertTrue(report.passed, report.violations)
        self.assertGreater(report.statistics['min_gap'], 0)

    def test_equal_pairs_are_skipped(self):
        tree = explicit_tree({'r': None})
        weight = WeightFn({'r': Fraction(1, 2)})
        report = probe_strict_convexity('sup', tree, weight, budget=30, seed=0)
        self.assertTrue(report.passed)
        self.assertGreater(report.statistics['skipped'], 0)


class MlurProbeTests(SimpleTestCase):

    def test_admissible_samples_respect_the_oscillation_bound(self):
        report = probe_mlur(samples=1000, seed=11)
        self.assertEqual(report.samples, 1000)
        self.assertEqual(report.violations, [])
        self.assertEqual(report.statistics['norm'], 'osc')
        self.assertTrue(report.statistics['asserted'])
        self.assertLess(report.statistics['max_h_over_eps'], 4)

    def test_three_valued_draws_are_informational(self):
        report = probe_mlur(samples=10, seed=0, contrast=12)
        self.assertTrue(report.passed)
        self.assertEqual(report.statistics['three_valued_draws'], 12)
        self.assertEqual(report.statistics['informational_failures'], 12)
        self.assertEqual(len(report.notes), 3)

    def test_composite_norm_is_reported_not_asserted(self):
        tree = path(4)
        weight = WeightFn.constant(tree.presentation, Fraction(1, 2))
        report = probe_mlur('composite_mlur', tree, weight, samples=10, seed=3, max_attempts=5000)
        self.assertEqual(report.samples, 10)
        self.assertEqual(report.statistics['norm'], 'composite_mlur')
        self.assertFalse(report.statistics['asserted'])
        self.assertTrue(report.passed)

    def test_needs_an_exact_oracle_and_three_nodes(self):
        with self.assertRaises(ParamOutOfRange):
            probe_mlur(lambda f: f.sup(), samples=5)
        tree = path(2)
        with self.assertRaises(ParamOutOfRange):
            probe_mlur('osc', tree, WeightFn.constant(tree.presentation, Fraction(1, 2)), samples=5)

    def test_replays_with_the_same_seed(self):
        self.assertEqual(probe_mlur(samples=50, seed=5).as_document(), probe_mlur(samples=50, seed=5).as_document())


class KadecProbeTests(SimpleTestCase):

    def test_sup_norm_at_a_bad_point_is_an_obstruction(self):
        presentation = omega_star(Fraction(1, 2), Fraction(1, 2))
        report = probe_kadec(presentation, WeightFn.from_presentation(presentation), 'sup', copies=(2, 4), mu_budget=0)
        self.assertEqual({v['kind'] for v in report.violations}, {'kadec_obstruction'})
        self.assertEqual(len(report.violations), 2)
        self.assertTrue(all(row['sup_distance'] == 1 for row in report.statistics['rows']))

    def test_good_point_reports_a_margin(self):
        presentation = omega_star(Fraction(1, 2), Fraction(1))
        report = probe_kadec(presentation, WeightFn.from_presentation(presentation), 'sup', copies=(2, 4), mu_budget=20)
        self.assertTrue(report.passed)
        self.assertIn('margin', report.statistics['rows'][-1])
        self.assertEqual(report.statistics['rows'][-1]['mu_t'], 1.0)
        self.assertTrue(any('good' in note for note in report.notes))

    def test_margins_vanish_at_a_bad_point(self):
        presentation = omega_star(Fraction(1, 2), Fraction(1, 2))
        report = probe_kadec(presentation, WeightFn.from_presentation(presentation), 'sup', copies=(2, 4), mu_budget=0)
        trend = report.statistics['trends'][0]
        self.assertEqual((trend['class'], trend['copies'], trend['trend']), ('R', [2, 4], 'vanishing'))
        self.assertTrue(any('towards 0' in note for note in report.notes))

    def test_shrinking_margins_are_flagged(self):
        def shrinking(tree, weight):
            return NormOracle('shrinking', lambda f: 1 + Fraction(len(f.support), len(tree) ** 2))

        presentation = omega_star(Fraction(1, 2), Fraction(1))
        report = probe_kadec(presentation, WeightFn.from_presentation(presentation), shrinking,
                             copies=(2, 4, 8), mu_budget=0)
        trend = report.statistics['trends'][0]
        self.assertEqual(trend['trend'], 'decreasing')
        self.assertEqual(trend['margins'], sorted(trend['margins'], reverse=True))
        self.assertTrue(any('decreasing towards 0' in note for note in report.notes))

    def test_margin_trend(self):
        self.assertEqual(margin_trend([0.5, 0.5]), 'flat')
        self.assertEqual(margin_trend([0.3, 0.1, 0.2]), 'irregular')
        self.assertEqual(margin_trend([0.3]), 'inconclusive')
        self.assertEqual(margin_trend([0.0, 0.0, 0.0]), 'vanishing')

    def test_single_copy_is_inconclusive(self):
        presentation = omega_star(Fraction(1, 2), Fraction(1, 2))
        report = probe_kadec(presentation, WeightFn.from_presentation(presentation), 'sup', copies=(1,), mu_budget=0)
        self.assertTrue(any('inconclusive' in note for note in report.notes))

    def test_no_omega_edges(self):
        presentation = kary(2, 2)
        report = probe_kadec(presentation, WeightFn.constant(presentation, 1), 'sup')
        self.assertEqual(report.statistics['verdict'], 'inconclusive')


class ReverseConvergenceProbeTests(SimpleTestCase):

    def test_star_successors_converge_to_the_root(self):
        report = probe_reverse_convergence(omega_star(1, 1), copies=(2, 4, 8, 16))
        self.assertTrue(report.passed, report.violations)
        counts = report.statistics['agreement']['R']
        self.assertEqual(counts, sorted(counts))
        self.assertEqual(counts[-1], report.statistics['fixed_nodes'])

    def test_finitely_branching_classes_are_reverse_isolated(self):
        report = probe_reverse_convergence(kary(2, 3))
        self.assertEqual(report.statistics['verdict'], 'inconclusive')
        self.assertIn('reverse-isolated', report.notes[0])

    def test_lambda_neighbourhoods_on_the_injection_tree(self):
        report = probe_reverse_convergence(injection_tree(2, 4), epsilons=4)
        self.assertTrue(report.passed, report.violations)
        self.assertGreater(report.statistics['neighbourhoods'], 0)


class SmoothnessProbeTests(SimpleTestCase):

    def test_sup_norm_with_unique_maximum(self):
        tree = path(3)
        f = TreeFn.from_vector(tree, [1, Fraction(1, 2), Fraction(1, 4)])
        report = probe_smoothness(get_oracle('sup', tree, None), f, seed=3)
        self.assertTrue(report.passed, report.violations)

    def test_sup_norm_with_two_maxima_has_a_kink(self):
        tree = path(2)
        f = TreeFn.from_vector(tree, [1, 1])
        h = TreeFn.from_vector(tree, [1, -1])
        report = probe_smoothness(get_oracle('sup', tree, None), f, directions=[h])
        self.assertEqual(len(report.violations), 1)
        self.assertAlmostEqual(report.violations[0]['forward'], 1.0)
        self.assertAlmostEqual(report.violations[0]['backward'], -1.0)

    def test_euclidean_norm_is_smooth(self):
        tree = path(2)
        f = TreeFn.from_vector(tree, [1, 2])
        report = probe_smoothness(euclidean(tree, None), f, samples=6, seed=4)
        self.assertTrue(report.passed, report.violations)
        self.assertTrue(report.statistics['uniform'])

    def test_zero_function_is_rejected(self):
        tree = path(2)
        with self.assertRaises(ParamOutOfRange):
            probe_smoothness(get_oracle('sup', tree, None), TreeFn.zero(tree))


class DoublyBadProbeTests(SimpleTestCase):

    def test_lambda_weight_has_no_doubly_bad_node(self):
        tree = augment_pairs(injection_tree(2, 3))
        report = probe_doubly_bad(tree, derive_weights('lambda', tree))
        self.assertEqual(report.statistics['best_score'], '0')
        self.assertFalse(report.statistics['best_doubly_bad'])
        self.assertEqual(report.statistics['doubly_bad_nodes'], 0)

    def test_constant_weight_makes_the_root_doubly_bad(self):
        tree = augment_pairs(injection_tree(1, 4))
        constant = WeightFn({tree.class_of(node): 0 for node in tree.nodes})
        report = probe_doubly_bad(tree, constant)
        self.assertTrue(report.statistics['best_doubly_bad'])
        self.assertEqual(report.statistics['doubly_bad_nodes'], 1)

    def test_phi_must_be_increasing(self):
        tree = augment_pairs(injection_tree(1, 2))
        lam = derive_weights('lambda', tree)
        with self.assertRaises(InvalidWeight):
            probe_doubly_bad(tree, {c: -v for c, v in lam.rho.items()})


class ChoquetGameTests(SimpleTestCase):

    def test_nth_missing(self):
        self.assertEqual(nth_missing(0, {0, 1}), 2)
        self.assertEqual(nth_missing(2, {0, 2}), 4)

    def test_invariant_against_every_strategy(self):
        for strategy in BETA_STRATEGIES:
            for seed in range(1000):
                state = choquet_game(50, strategy, seed)
                self.assertEqual(state.verdict, 'PASS', (strategy, seed))
                self.assertEqual(len(state.r_list), 50)
                self.assertTrue(state.invariant_holds())

    def test_zero_rounds_is_vacuous(self):
        self.assertEqual(choquet_game(0, 'random', 7).verdict, 'VACUOUS')

    def test_adversarial_packing_is_avoided(self):
        state = choquet_game(20, 'adversarial', 0)
        played = set(state.current)
        self.assertTrue(played.issuperset({0, 1, 2}))
        self.assertFalse(played.intersection(state.r_list))
        replayed = replay_game(state.trace)
        self.assertEqual(replayed.r_list, state.r_list)
        self.assertEqual(replayed.verdict, 'PASS')

    def test_same_seed_same_trace(self):
        self.assertEqual(choquet_game(30, 'random', 9).trace, choquet_game(30, 'random', 9).trace)

    def test_illegal_moves(self):
        with self.assertRaises(IllegalMove):
            choquet_game(1, lambda state, rng: ((), 0))
        with self.assertRaises(IllegalMove):
            choquet_game(1, lambda state, rng: ((0, 0), 0))

        def below_q(state, rng):
            return state.current + (0,), state.q

        with self.assertRaises(IllegalMove):
            choquet_game(2, below_q)

    def test_unknown_strategy(self):
        with self.assertRaises(ParamOutOfRange):
            choquet_game(3, 'lazy', 0)
