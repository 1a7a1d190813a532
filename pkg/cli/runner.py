"""
Batch runner behind the management commands.

run(config) returns (status, report): 0 for a clean run, 1 when a probe or
game found violations or a domain invariant failed, 2 for invalid input and
3 when a node or evaluation budget ran out.
"""
import logging
from concurrent.futures import ThreadPoolExecutor

from django.core.exceptions import ValidationError

from norms.oracles import get_oracle
from norms.serializers import NormEvaluationSerializer
from norms.services import NormEvaluationService, evaluate_norm
from operators.services import (
    OPERATORS, assemble_matrix, check_talagrand, export_triplets, linear_rank, sample_functions,
)
from probes.game import choquet_game
from probes.services import PROBES
from tree_core.generators import generate, injection_tree
from tree_core.serializers import presentation_to_document
from utils.exceptions import BudgetExceeded, RenormLabError, SizeBudgetExceeded
from weights.serializers import PointClassSerializer, classification_rows
from weights.services import THEOREMS, check_conditions, classify_points
from .loaders import load_function, load_presentation, load_tree, load_weight
from .reports import build_report, write_csv, write_report

logger = logging.getLogger(__name__)

OK, INVARIANT, CONFIG, BUDGET = 0, 1, 2, 3
TALAGRAND_OPERATORS = {'talagrand': 'T_special', 'talagrand_dyadic': 'T_dyadic'}


def status_for(exc) -> int:
    if isinstance(exc, (SizeBudgetExceeded, BudgetExceeded)):
        return BUDGET
    if isinstance(exc, ValidationError):
        return CONFIG
    return INVARIANT


def error_document(exc):
    if isinstance(exc, RenormLabError):
        return exc.as_dict()
    return {
        'error': type(exc).__name__,
        'code': getattr(exc, 'code', None),
        'message': '; '.join(exc.messages),
        'witness': getattr(exc, 'witness', None),
    }


def _seeds(config):
    first = config['seed'] or 0
    return [first + offset for offset in range(config['repeat'])]


def _parallel(task, seeds, jobs):
    """Results come back in seed order whatever the completion order"""
    if jobs == 1 or len(seeds) == 1:
        return [task(seed) for seed in seeds]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(task, seeds))


# Subcommands

def run_generate(config):
    params = {key: config[key] for key in ('n', 'k', 'h', 'N') if config.get(key) is not None}
    kind = config['kind']
    if kind in ('augment_pairs', 'augment_dyadic'):
        result = generate(kind, tree=injection_tree(params.get('h', 1), params.get('N', 1)))
    else:
        result = generate(kind, **params)
    presentation = getattr(result, 'presentation', result)
    document = presentation_to_document(presentation)
    return OK, {'kind': kind, 'params': params, 'tree': document}


def run_classify(config):
    presentation, tree = load_tree(config['tree'], config['depth'], config['copies'])
    weight = load_weight(config['weight'], presentation)
    classification = classify_points(presentation, weight)
    theorems = [config['theorem']] if config.get('theorem') else list(THEOREMS)
    conditions = {}
    for theorem in theorems:
        report = check_conditions(presentation, weight, theorem)
        conditions[theorem] = {'passed': report.passed, 'witnesses': list(report.witnesses), 'notes': list(report.notes)}
    return OK, {
        'classes': PointClassSerializer(classification_rows(classification), many=True).data,
        'bad_classes': sorted(classification.bad_classes),
        'conditions': conditions,
        'unfolded_nodes': len(tree),
    }


def run_norm(config):
    presentation, tree = load_tree(config['tree'], config['depth'], config['copies'])
    weight = load_weight(config['weight'], presentation)
    f = load_function(config['function'], tree)
    value = evaluate_norm(config['norm'], tree, weight, f)
    results = {'norm': config['norm'], 'value': value.as_document(), 'exact': value.is_exact}
    if config['record']:
        evaluation = NormEvaluationService.record(config['norm'], tree, weight, f, value)
        results['record'] = NormEvaluationSerializer(evaluation).data
    return OK, results


def run_operator(config):
    presentation, tree = load_tree(config['tree'], config['depth'], config['copies'])
    weight = load_weight(config['weight'], presentation)
    name = config['operator']
    if name == 'matrix':
        matrix = assemble_matrix(tree, weight)
        results = {'shape': list(matrix.shape), 'rank': linear_rank(matrix), 'nonzero': len(matrix.entries)}
        if config['triplets']:
            export_triplets(matrix, config['triplets'])
            results['triplets'] = config['triplets']
        results['injective'] = results['rank'] == matrix.shape[1]
        return OK, results
    if name in TALAGRAND_OPERATORS:
        operator = TALAGRAND_OPERATORS[name]
        apply = OPERATORS[operator]
        samples = sample_functions(tree, config['budget'], config['seed'])
        report = check_talagrand(lambda f: apply(tree, weight, f), samples, name=operator)
        document = {
            'oracle': report.oracle,
            'samples': report.samples,
            'witnesses': list(report.witnesses),
            'counterexamples': list(report.counterexamples),
        }
        return (INVARIANT if report.counterexamples else OK), document
    f = load_function(config['function'], tree)
    family = OPERATORS[name](tree, weight, f)
    return OK, {'operator': name, 'values': family.as_document(), 'sup': str(family.sup()), 'l1': str(family.l1())}


def _probe_once(config, seed):
    name = config['probe']
    if name == 'mlur':
        tree = weight = None
        if config['tree']:
            presentation, tree = load_tree(config['tree'], config['depth'], config['copies'])
            weight = load_weight(config['weight'], presentation)
        return PROBES[name](config['norm'] or 'osc', tree, weight, samples=config['budget'], seed=seed)
    if name == 'reverse_convergence':
        presentation = load_presentation(config['tree'])
        if not presentation.has_omega_edges() and all(r.label is not None for r in presentation.classes.values()):
            source = load_tree(config['tree'], config['depth'], config['copies'])[1]
        else:
            source = presentation
        return PROBES[name](source, copies=config['schedule'], depth=config['depth'])
    presentation, tree = load_tree(config['tree'], config['depth'], config['copies'])
    weight = load_weight(config['weight'], presentation)
    if name == 'kadec':
        return PROBES[name](presentation, weight, config['norm'], copies=config['schedule'], depth=config['depth'])
    if name == 'doubly_bad':
        return PROBES[name](tree, weight)
    oracle = get_oracle(config['norm'], tree, weight)
    if name == 'smoothness':
        f = load_function(config['function'], tree)
        return PROBES[name](oracle, f, samples=config['budget'], seed=seed)
    return PROBES[name](oracle, tree, weight, budget=config['budget'], seed=seed)


def run_probe(config):
    if config['probe'] == 'choquet_game':
        return run_game(config)
    seeds = _seeds(config) if config['seed'] is not None else [None]
    reports = _parallel(lambda seed: _probe_once(config, seed), seeds, config['jobs'])
    documents = [report.as_document() for report in reports]
    if config['csv']:
        write_csv(documents, config['csv'])
    status = OK if all(report.passed for report in reports) else INVARIANT
    return status, {'probe': config['probe'], 'runs': documents}


def run_game(config):
    def play(seed):
        return choquet_game(config['rounds'], config['strategy'], seed)

    states = _parallel(play, _seeds(config), config['jobs'])
    documents = [dict(state.as_document(), seed=seed) for state, seed in zip(states, _seeds(config))]
    verdicts = sorted({state.verdict for state in states})
    status = INVARIANT if 'FAIL' in verdicts else OK
    return status, {'strategy': config['strategy'], 'verdicts': verdicts, 'plays': documents}


SUBCOMMAND_RUNNERS = {
    'generate': run_generate,
    'classify': run_classify,
    'norm': run_norm,
    'operator': run_operator,
    'probe': run_probe,
    'game': run_game,
}


def echo(config):
    return {key: (list(value) if isinstance(value, tuple) else value) for key, value in sorted(config.items())}


def run(config):
    """
    Execute one validated run config. Domain and input failures become a
    status code plus an error section in the report instead of propagating.
    """
    subcommand = config['subcommand']
    try:
        status, results = SUBCOMMAND_RUNNERS[subcommand](config)
    except (RenormLabError, ValidationError) as exc:
        status = status_for(exc)
        results = {'error': error_document(exc)}
        logger.warning(f'{subcommand} stopped with status {status}: {exc}')
    if subcommand == 'generate' and status == OK:
        report = results['tree']
        write_report(report, config['output'])
        return status, report
    report = build_report(echo(config), results, status)
    write_report(report, config['output'])
    logger.info(f'{subcommand} finished with status {status}')
    return status, report
