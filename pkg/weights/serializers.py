from rest_framework import serializers

from utils.validators import format_fraction, parse_fraction, validate_fraction_string
from .domain import WeightFn


class WeightDocumentSerializer(serializers.Serializer):
    """Weight file: {"rho": {"<class>": "p/q", ...}, "normalized": false}"""
    rho = serializers.DictField(child=serializers.CharField(validators=[validate_fraction_string]))
    normalized = serializers.BooleanField(default=False)

    def validate_rho(self, value):
        if not value:
            raise serializers.ValidationError('A weight needs at least one class value', code='invalid_weight')
        return {class_id: parse_fraction(number) for class_id, number in value.items()}

    def to_weight(self) -> WeightFn:
        return WeightFn(self.validated_data['rho'], normalized=self.validated_data['normalized'])


def weight_to_document(weight: WeightFn):
    return {
        'rho': {class_id: format_fraction(value) for class_id, value in sorted(weight.rho.items())},
        'normalized': weight.normalized,
    }


class PointClassSerializer(serializers.Serializer):
    """One row of a classification table"""
    class_id = serializers.CharField()
    status = serializers.CharField()
    rho = serializers.SerializerMethodField()
    delta = serializers.SerializerMethodField()
    equal_edges = serializers.ListField(child=serializers.IntegerField())
    fan = serializers.BooleanField()

    def get_rho(self, row):
        return format_fraction(row['rho'])

    def get_delta(self, row):
        return format_fraction(row['delta'])


def classification_rows(classification):
    return [
        {
            'class_id': class_id,
            'status': point.status,
            'rho': classification.weight(class_id),
            'delta': point.delta,
            'equal_edges': list(point.equal_edges),
            'fan': point.fan,
        }
        for class_id, point in sorted(classification.points.items())
    ]
