"""
Serializers for norm evaluation records and function documents
"""
from rest_framework import serializers

from tree_core.domain import TreeFn, parse_node
from utils.exceptions import UnknownNode
from utils.validators import parse_fraction, validate_fraction_string
from .models import NormEvaluation


class NormEvaluationSerializer(serializers.ModelSerializer):
    is_exact = serializers.ReadOnlyField()

    class Meta:
        model = NormEvaluation
        fields = (
            'id', 'norm', 'tree_digest', 'weight_digest', 'input_digest',
            'value', 'error_radius', 'is_exact', 'created_at',
        )
        read_only_fields = ('created_at',)


class FunctionDocumentSerializer(serializers.Serializer):
    """{"values": {"<node>": "p/q", ...}} against a given tree"""
    values = serializers.DictField(child=serializers.CharField(validators=[validate_fraction_string]))

    def __init__(self, *args, tree=None, **kwargs):
        super().__init__(*args, **kwargs)
        self.tree = tree

    def validate_values(self, value):
        parsed = {}
        for text, number in value.items():
            try:
                node = parse_node(text)
            except ValueError:
                raise serializers.ValidationError(f'Malformed node id "{text}"', code='unknown_node')
            if self.tree is not None and node not in self.tree:
                raise serializers.ValidationError(f'Node {text} is not in the tree', code='unknown_node')
            parsed[node] = parse_fraction(number)
        return parsed

    def to_function(self) -> TreeFn:
        if self.tree is None:
            raise UnknownNode('A function document needs a tree to resolve its nodes')
        return TreeFn(self.tree, self.validated_data['values'])
