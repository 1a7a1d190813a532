from rest_framework import serializers

from utils.validators import rational_validators, format_fraction
from .domain import Multiplicity, format_node


class EdgeSerializer(serializers.Serializer):
    target = serializers.CharField()
    multiplicity = serializers.CharField(default=Multiplicity.ONE.value)

    def validate_multiplicity(self, value):
        """Only "one" and "omega" are meaningful multiplicities"""
        if value not in {m.value for m in Multiplicity}:
            raise serializers.ValidationError(
                f'Multiplicity must be "one" or "omega", got "{value}"',
                code='bad_multiplicity',
            )
        return value


class ClassSerializer(serializers.Serializer):
    id = serializers.CharField()
    rho = serializers.CharField(required=False, allow_null=True, validators=rational_validators)
    children = EdgeSerializer(many=True, required=False, default=list)
    label = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False, allow_null=True)
    kind = serializers.CharField(required=False, allow_blank=True, default='')


class PresentationSerializer(serializers.Serializer):
    """Tree file document: classes plus optional root list"""
    classes = ClassSerializer(many=True)
    roots = serializers.ListField(child=serializers.CharField(), required=False)

    def validate_classes(self, value):
        if not value:
            raise serializers.ValidationError('A presentation needs at least one class')
        ids = [entry['id'] for entry in value]
        duplicates = sorted({i for i in ids if ids.count(i) > 1})
        if duplicates:
            raise serializers.ValidationError(f'Duplicate class ids: {", ".join(duplicates)}')
        return value

    def validate(self, data):
        """Every edge target and root must name a declared class"""
        declared = {entry['id'] for entry in data['classes']}
        for entry in data['classes']:
            for edge in entry['children']:
                if edge['target'] not in declared:
                    raise serializers.ValidationError(
                        f'Class {entry["id"]} points at undeclared class {edge["target"]}',
                        code='dangling_class',
                    )
        for root in data.get('roots', []):
            if root not in declared:
                raise serializers.ValidationError(f'Root {root} is not a declared class', code='dangling_class')
        return data


def presentation_to_document(presentation):
    """Inverse of build_presentation: the tree file document of a presentation"""
    classes = []
    for record in presentation.classes.values():
        entry = {
            'id': record.id,
            'children': [
                {'target': edge.target, 'multiplicity': edge.multiplicity.value}
                for edge in record.children
            ],
        }
        if record.rho is not None:
            entry['rho'] = format_fraction(record.rho)
        if record.label is not None:
            entry['label'] = list(record.label)
        if record.kind:
            entry['kind'] = record.kind
        classes.append(entry)
    return {'classes': classes, 'roots': list(presentation.roots)}


class FiniteTreeSerializer(serializers.Serializer):
    """Read-only export of a FiniteTree with class_of, copy_index and truncated flags"""
    nodes = serializers.SerializerMethodField()
    truncated = serializers.SerializerMethodField()
    size = serializers.SerializerMethodField()

    def get_nodes(self, tree):
        return [
            {
                'id': format_node(node),
                'parent': format_node(tree.parent(node)),
                'class_of': tree.class_of(node),
                'copy_index': tree.copy_index(node),
                'truncated': node in tree.truncated,
            }
            for node in tree.nodes
        ]

    def get_truncated(self, tree):
        return sorted(format_node(node) for node in tree.truncated)

    def get_size(self, tree):
        return len(tree)
