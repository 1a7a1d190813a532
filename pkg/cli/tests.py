import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, override_settings

from norms.models import NormEvaluation
from utils.exceptions import SchemaMismatch
from .reports import build_report, format_diff, load_report, report_diff
from .runner import BUDGET, CONFIG, INVARIANT, OK, run
from .serializers import RunConfigSerializer

OMEGA_STAR = {
    'classes': [
        {'id': 'R', 'rho': '1/2', 'children': [{'target': 'L', 'multiplicity': 'omega'}]},
        {'id': 'L', 'rho': '1/2'},
    ],
}
CHAIN = {
    'classes': [
        {'id': 'A', 'rho': '1/2', 'children': [{'target': 'B'}]},
        {'id': 'B', 'rho': '3/4'},
    ],
}
BINARY_LOOP = {'classes': [{'id': 'K', 'rho': '1/2', 'children': [{'target': 'K'}, {'target': 'K'}]}]}
PATH3 = {
    'classes': [
        {'id': 'A', 'rho': '1/2', 'children': [{'target': 'B'}]},
        {'id': 'B', 'rho': '1/2', 'children': [{'target': 'C'}]},
        {'id': 'C', 'rho': '3/4'},
    ],
}


class WorkspaceMixin:
    """Temporary directory for tree, weight, function and report files"""

    def setUp(self):
        super().setUp()
        self._workspace = tempfile.TemporaryDirectory()
        self.workspace = Path(self._workspace.name)

    def tearDown(self):
        self._workspace.cleanup()
        super().tearDown()

    def write(self, name, document):
        path = self.workspace / name
        path.write_text(json.dumps(document))
        return str(path)

    def path(self, name):
        return str(self.workspace / name)

    def configure(self, **data):
        serializer = RunConfigSerializer(data=data)
        self.assertTrue(serializer.is_valid(), serializer.errors)
        return serializer.validated_data


class RunConfigTests(WorkspaceMixin, SimpleTestCase):

    def test_randomized_probe_needs_a_seed(self):
        serializer = RunConfigSerializer(data={'subcommand': 'probe', 'probe': 'mlur'})
        self.assertFalse(serializer.is_valid())
        self.assertIn('seed', serializer.errors)

    def test_referenced_files_must_exist(self):
        serializer = RunConfigSerializer(data={'subcommand': 'classify', 'tree': self.path('missing.json')})
        self.assertFalse(serializer.is_valid())
        self.assertEqual(serializer.errors['tree'][0].code, 'missing_file')

    def test_numeric_parameters_are_positive(self):
        tree = self.write('tree.json', CHAIN)
        serializer = RunConfigSerializer(data={'subcommand': 'classify', 'tree': tree, 'depth': 0})
        self.assertFalse(serializer.is_valid())
        self.assertIn('depth', serializer.errors)

    def test_schedule_parsing(self):
        tree = self.write('tree.json', OMEGA_STAR)
        config = self.configure(subcommand='probe', probe='kadec', tree=tree, norm='sup', schedule='1,3')
        self.assertEqual(config['schedule'], (1, 3))
        self.assertEqual(self.configure(subcommand='game', seed=1)['schedule'], (1, 2, 4, 8))
        serializer = RunConfigSerializer(data={'subcommand': 'game', 'seed': 1, 'schedule': '2,x'})
        self.assertFalse(serializer.is_valid())


class RunTests(WorkspaceMixin, SimpleTestCase):

    def test_generate_writes_the_injections(self):
        output = self.path('lambda.json')
        status, _ = run(self.configure(subcommand='generate', kind='lambda', h=2, N=3, output=output))
        self.assertEqual(status, OK)
        document = load_report(output)
        self.assertEqual(len(document['classes']), 1 + 3 + 6)
        labels = sorted(tuple(entry['label']) for entry in document['classes'])
        self.assertIn((2, 1), labels)
        self.assertEqual(document['roots'], ['L[]'])

    def test_classify_reports_bad_classes(self):
        tree = self.write('star.json', OMEGA_STAR)
        status, report = run(self.configure(subcommand='classify', tree=tree))
        self.assertEqual(status, OK)
        results = report['results']
        self.assertEqual(results['bad_classes'], ['R'])
        self.assertFalse(results['conditions']['T4_1']['passed'])
        self.assertTrue(results['conditions']['T7_1']['passed'])
        self.assertEqual([row['status'] for row in results['classes']], ['good', 'bad'])

    def test_weight_file_overrides_tree_rho(self):
        tree = self.write('star.json', OMEGA_STAR)
        weight = self.write('weight.json', {'rho': {'R': '1/2', 'L': '3/4'}})
        _, report = run(self.configure(subcommand='classify', tree=tree, weight=weight, theorem='T4_1'))
        self.assertEqual(report['results']['bad_classes'], [])
        self.assertEqual(list(report['results']['conditions']), ['T4_1'])

    def test_invalid_weight_is_a_config_failure(self):
        tree = self.write('chain.json', CHAIN)
        weight = self.write('weight.json', {'rho': {'A': '1', 'B': '1/2'}})
        status, report = run(self.configure(subcommand='classify', tree=tree, weight=weight))
        self.assertEqual(status, CONFIG)
        self.assertEqual(report['results']['error']['error'], 'InvalidWeight')

    @override_settings(RENORMLAB={'NODE_BUDGET': 50})
    def test_node_budget_has_its_own_status(self):
        tree = self.write('loop.json', BINARY_LOOP)
        status, report = run(self.configure(subcommand='classify', tree=tree, depth=10))
        self.assertEqual(status, BUDGET)
        self.assertEqual(report['results']['error']['witness']['budget'], 50)

    def test_matrix_and_triplets(self):
        tree = self.write('chain.json', CHAIN)
        triplets = self.path('matrix.txt')
        status, report = run(self.configure(subcommand='operator', tree=tree, operator='matrix', triplets=triplets))
        self.assertEqual(status, OK)
        self.assertEqual(report['results']['rank'], 2)
        self.assertTrue(report['results']['injective'])
        self.assertTrue(Path(triplets).read_text().startswith('# 4 x 2'))

    def test_operator_on_a_function_file(self):
        tree = self.write('chain.json', CHAIN)
        function = self.write('f.json', {'values': {'A.0#0': '1', 'A.0#0/B.0#0': '-1/2'}})
        status, report = run(self.configure(subcommand='operator', tree=tree, operator='R', function=function))
        self.assertEqual(status, OK)
        self.assertEqual(report['results']['values'], {'A.0#0': '1/2', 'A.0#0/B.0#0': '-1/8'})

    def test_unknown_node_in_function_file(self):
        tree = self.write('chain.json', CHAIN)
        function = self.write('f.json', {'values': {'Z.0#0': '1'}})
        status, report = run(self.configure(subcommand='norm', tree=tree, norm='sup', function=function))
        self.assertEqual(status, CONFIG)
        self.assertEqual(report['results']['error']['error'], 'UnknownNode')

    def test_dyadic_talagrand_on_generated_tree(self):
        tree = self.path('dyadic.json')
        run(self.configure(subcommand='generate', kind='augment_dyadic', h=1, N=3, output=tree))
        status, report = run(self.configure(
            subcommand='operator', tree=tree, operator='talagrand_dyadic', seed=1, budget=30,
        ))
        self.assertEqual(status, OK)
        self.assertEqual(report['results']['counterexamples'], [])
        self.assertEqual(report['results']['samples'], 30)

    def test_game_passes_and_replays(self):
        config = self.configure(subcommand='game', rounds=50, seed=7, repeat=3, jobs=2)
        status, first = run(config)
        self.assertEqual(status, OK)
        self.assertEqual(first['results']['verdicts'], ['PASS'])
        self.assertEqual([play['seed'] for play in first['results']['plays']], [7, 8, 9])
        _, second = run(config)
        self.assertEqual(first['results'], second['results'])

    def test_probe_routes_the_game(self):
        status, report = run(self.configure(subcommand='probe', probe='choquet_game', rounds=10, seed=3))
        self.assertEqual(status, OK)
        self.assertEqual(report['results']['plays'][0]['rounds'], 10)

    def test_probe_statistics_csv(self):
        path = self.path('mlur.csv')
        status, report = run(self.configure(
            subcommand='probe', probe='mlur', seed=1, budget=20, repeat=2, jobs=2, csv=path,
        ))
        self.assertEqual(status, OK)
        self.assertEqual([r['seed'] for r in report['results']['runs']], [1, 2])
        with open(path, newline='') as handle:
            rows = list(csv.DictReader(handle))
        self.assertEqual({row['seed'] for row in rows}, {'1', '2'})
        self.assertIn('admissible', {row['key'] for row in rows})

    def test_probe_mlur_on_a_composite_norm(self):
        tree = self.write('path.json', PATH3)
        status, report = run(self.configure(
            subcommand='probe', probe='mlur', norm='composite_mlur', tree=tree, seed=2, budget=5,
        ))
        self.assertEqual(status, OK)
        statistics = report['results']['runs'][0]['statistics']
        self.assertEqual(statistics['norm'], 'composite_mlur')
        self.assertFalse(statistics['asserted'])

    def test_probe_mlur_rejects_other_norms(self):
        serializer = RunConfigSerializer(data={'subcommand': 'probe', 'probe': 'mlur', 'norm': 'sup', 'seed': 0})
        self.assertFalse(serializer.is_valid())
        self.assertEqual(serializer.errors['norm'][0].code, 'invalid_choice')

    def test_report_echoes_config_and_version(self):
        _, report = run(self.configure(subcommand='game', rounds=3, seed=0))
        self.assertEqual(report['config']['seed'], 0)
        self.assertEqual(report['config']['schedule'], [1, 2, 4, 8])
        self.assertIn('tool_version', report)
        self.assertIn('generated_at', report['meta'])


class NormRecordTests(WorkspaceMixin, TestCase):

    def test_norm_with_record(self):
        tree = self.write('chain.json', CHAIN)
        function = self.write('f.json', {'values': {'A.0#0': '1', 'A.0#0/B.0#0': '-1/2'}})
        status, report = run(self.configure(subcommand='norm', tree=tree, norm='sup', function=function, record=True))
        self.assertEqual(status, OK)
        self.assertEqual(report['results']['value']['value'], '1')
        self.assertTrue(report['results']['exact'])
        record = report['results']['record']
        self.assertEqual(record['value'], '1')
        self.assertTrue(record['is_exact'])
        evaluation = NormEvaluation.objects.get(pk=record['id'])
        self.assertEqual(evaluation.norm, 'sup')
        self.assertTrue(evaluation.is_exact)


def value_report(value, radius, schema=None):
    report = build_report({}, {'norm': {'value': value, 'error_radius': radius}}, OK)
    if schema is not None:
        report['schema_version'] = schema
    return report


class ReportDiffTests(WorkspaceMixin, SimpleTestCase):

    def test_identical_runs_have_an_empty_diff(self):
        config = self.configure(subcommand='game', rounds=20, seed=4)
        self.assertEqual(report_diff(run(config)[1], run(config)[1]), [])

    def test_different_seeds(self):
        a = run(self.configure(subcommand='game', rounds=20, seed=4))[1]
        b = run(self.configure(subcommand='game', rounds=20, seed=5))[1]
        paths = {entry['path'] for entry in report_diff(a, b)}
        self.assertIn('config.seed', paths)
        self.assertIn('results.plays[0].seed', paths)

    def test_witness_sections_are_flagged(self):
        a = build_report({}, {'runs': [{'violations': []}]}, OK)
        b = build_report({}, {'runs': [{'violations': [{'kind': 'kink', 'seed': 2}]}]}, INVARIANT)
        entries = report_diff(a, b)
        flagged = [entry for entry in entries if entry['witness']]
        self.assertEqual([entry['path'] for entry in flagged], ['results.runs[0].violations'])
        self.assertIn('[witness]', format_diff(entries))

    def test_value_moves_within_the_certified_radius(self):
        entries = report_diff(value_report('1/2', '1/100'), value_report('51/100', '1/100'))
        self.assertEqual([entry['kind'] for entry in entries], ['within-certified-error'])
        entries = report_diff(value_report('1/2', '1/100'), value_report('3/4', '1/100'))
        self.assertEqual([entry['kind'] for entry in entries], ['changed'])

    def test_rationals_compare_exactly(self):
        self.assertEqual(report_diff(value_report('1/2', '0'), value_report('2/4', '0')), [])

    def test_schema_mismatch(self):
        with self.assertRaises(SchemaMismatch):
            report_diff(value_report('1', '0'), value_report('1', '0', schema=99))


class ManagementCommandTests(WorkspaceMixin, SimpleTestCase):

    def call(self, name, *args, **options):
        out, err = StringIO(), StringIO()
        call_command(name, *args, stdout=out, stderr=err, **options)
        return out.getvalue()

    def test_game_prints_its_report(self):
        report = json.loads(self.call('game', seed=7, rounds=50))
        self.assertEqual(report['results']['verdicts'], ['PASS'])

    def test_generate_to_file(self):
        output = self.path('chain.json')
        self.call('generate', kind='chain', n=3, output=output)
        self.assertEqual(len(load_report(output)['classes']), 3)

    def test_missing_seed_exits_with_config_code(self):
        with self.assertRaises(CommandError) as caught:
            self.call('probe', probe='mlur')
        self.assertEqual(caught.exception.returncode, CONFIG)

    def test_missing_tree_file(self):
        with self.assertRaises(CommandError) as caught:
            self.call('classify', tree=self.path('nowhere.json'))
        self.assertEqual(caught.exception.returncode, CONFIG)

    @override_settings(RENORMLAB={'NODE_BUDGET': 50})
    def test_budget_exit_code(self):
        tree = self.write('loop.json', BINARY_LOOP)
        with self.assertRaises(CommandError) as caught:
            self.call('classify', tree=tree, depth=10)
        self.assertEqual(caught.exception.returncode, BUDGET)

    def test_report_diff_command(self):
        a, b = self.path('a.json'), self.path('b.json')
        self.call('game', seed=1, rounds=10, output=a)
        self.call('game', seed=1, rounds=10, output=b)
        self.assertEqual(self.call('report_diff', a, b), '')
        self.call('game', seed=2, rounds=10, output=b)
        self.assertIn('config.seed', self.call('report_diff', a, b))

    def test_report_diff_schema_mismatch(self):
        a = self.write('a.json', value_report('1', '0'))
        b = self.write('b.json', value_report('1', '0', schema=99))
        with self.assertRaises(CommandError) as caught:
            self.call('report_diff', a, b)
        self.assertEqual(caught.exception.returncode, CONFIG)
