"""
Evaluating registered norms and recording the results
"""
import hashlib
import json
import logging

from tree_core.domain import format_node
from tree_core.serializers import presentation_to_document
from utils.validators import format_fraction
from .domain import NormValue
from .models import NormEvaluation
from .oracles import get_oracle

logger = logging.getLogger(__name__)


def _digest(document) -> str:
    text = json.dumps(document, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode()).hexdigest()


def tree_digest(tree) -> str:
    return _digest({
        'presentation': presentation_to_document(tree.presentation),
        'nodes': [format_node(node) for node in tree.nodes],
    })


def weight_digest(weight) -> str:
    return _digest({c: format_fraction(v) for c, v in sorted(weight.rho.items())})


def function_digest(f) -> str:
    return _digest({format_node(n): format_fraction(v) for n, v in sorted(f.values.items())})


def evaluate_norm(name, tree, weight, f, **options) -> NormValue:
    oracle = get_oracle(name, tree, weight, **options)
    value = oracle(f)
    logger.info(
        f'{name} norm on {len(f.values)} support nodes = {float(value.value):.12g} '
        f'(radius {float(value.error_radius):.3g})'
    )
    return value


class NormEvaluationService:
    """
    Service for persisting norm evaluations
    """

    @staticmethod
    def record(name, tree, weight, f, value: NormValue) -> NormEvaluation:
        evaluation = NormEvaluation.objects.create(
            norm=name,
            tree_digest=tree_digest(tree),
            weight_digest=weight_digest(weight),
            input_digest=function_digest(f),
            value=format_fraction(value.value),
            error_radius=format_fraction(value.error_radius),
        )
        logger.info(f'Recorded {evaluation}')
        return evaluation

    @staticmethod
    def history(name, f):
        """Earlier evaluations of the same norm on the same input"""
        return NormEvaluation.objects.filter(norm=name, input_digest=function_digest(f))
