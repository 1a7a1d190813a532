"""
Reading tree, weight and function files into domain objects
"""
import json
import logging
from pathlib import Path

from norms.serializers import FunctionDocumentSerializer
from tree_core.services import build_presentation, error_codes, unfold
from utils.exceptions import InvalidWeight, ParamOutOfRange, UnknownNode
from weights.domain import WeightFn
from weights.serializers import WeightDocumentSerializer
from weights.services import derive_weights

logger = logging.getLogger(__name__)


def read_document(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParamOutOfRange(f'{path} is not valid JSON: {exc}', witness=str(path)) from exc


def load_presentation(path):
    return build_presentation(read_document(path))


def load_tree(path, depth, copies):
    presentation = load_presentation(path)
    tree = unfold(presentation, depth=depth, copies=copies)
    logger.info(f'Loaded {path}: {len(presentation.classes)} classes, {len(tree)} nodes')
    return presentation, tree


def load_weight(path, presentation) -> WeightFn:
    """
    Weight file when given, else the rho values carried by the tree file;
    labelled trees without rho values get the lambda weight.
    """
    if path is None:
        records = presentation.classes.values()
        if not presentation.rho_slots() and all(record.label is not None for record in records):
            return derive_weights('lambda', presentation)
        return WeightFn.from_presentation(presentation)
    serializer = WeightDocumentSerializer(data=read_document(path))
    if not serializer.is_valid():
        raise InvalidWeight(f'Invalid weight document: {serializer.errors}', witness=str(path))
    return serializer.to_weight()


def load_function(path, tree):
    serializer = FunctionDocumentSerializer(data=read_document(path), tree=tree)
    if not serializer.is_valid():
        if 'unknown_node' in set(error_codes(serializer.errors)):
            raise UnknownNode(f'Function document names unknown nodes: {serializer.errors}', witness=str(path))
        raise ParamOutOfRange(f'Invalid function document: {serializer.errors}', witness=str(path))
    return serializer.to_function()
