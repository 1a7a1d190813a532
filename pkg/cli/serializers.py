"""
Run configuration validation for the management commands
"""
import os

from rest_framework import serializers

from norms.oracles import NORM_REGISTRY
from operators.services import OPERATORS
from probes.game import BETA_STRATEGIES
from probes.services import PROBES
from tree_core.generators import GENERATORS

SUBCOMMANDS = ('generate', 'classify', 'norm', 'operator', 'probe', 'game')
OPERATOR_CHOICES = tuple(OPERATORS) + ('matrix', 'talagrand', 'talagrand_dyadic')
PROBE_CHOICES = tuple(PROBES) + ('choquet_game',)
RANDOMIZED_PROBES = ('strict_convexity', 'mlur', 'smoothness', 'choquet_game')
MLUR_NORMS = ('osc', 'composite_mlur')
NEEDS_TREE = ('strict_convexity', 'kadec', 'smoothness', 'reverse_convergence', 'doubly_bad')


def validate_existing_file(value):
    if value and not os.path.isfile(value):
        raise serializers.ValidationError(f'File not found: {value}', code='missing_file')


class ScheduleField(serializers.CharField):
    """Comma separated positive integers, e.g. "1,2,4,8" """

    def to_internal_value(self, data):
        text = super().to_internal_value(data)
        try:
            values = tuple(int(part) for part in text.split(',') if part.strip())
        except ValueError:
            raise serializers.ValidationError(f'Expected comma separated integers, got "{text}"')
        if not values or any(value < 1 for value in values):
            raise serializers.ValidationError('Copies schedule entries must be positive')
        return values

    def to_representation(self, value):
        return ','.join(str(v) for v in value)


class RunConfigSerializer(serializers.Serializer):
    """
    One batch run. File fields must point at existing files, numeric fields
    are positive and randomized probes need an explicit seed.
    """
    subcommand = serializers.ChoiceField(choices=SUBCOMMANDS)
    tree = serializers.CharField(required=False, allow_null=True, default=None, validators=[validate_existing_file])
    weight = serializers.CharField(required=False, allow_null=True, default=None, validators=[validate_existing_file])
    function = serializers.CharField(required=False, allow_null=True, default=None, validators=[validate_existing_file])
    output = serializers.CharField(required=False, allow_null=True, default=None)
    csv = serializers.CharField(required=False, allow_null=True, default=None)
    triplets = serializers.CharField(required=False, allow_null=True, default=None)

    depth = serializers.IntegerField(min_value=1, default=3)
    copies = serializers.IntegerField(min_value=1, default=4)
    schedule = ScheduleField(required=False, default=(1, 2, 4, 8))
    budget = serializers.IntegerField(min_value=1, default=100)
    seed = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    repeat = serializers.IntegerField(min_value=1, default=1)
    jobs = serializers.IntegerField(min_value=1, default=1)
    rounds = serializers.IntegerField(min_value=0, default=50)
    strategy = serializers.ChoiceField(choices=tuple(BETA_STRATEGIES), default='random')

    kind = serializers.ChoiceField(choices=tuple(GENERATORS), required=False, allow_null=True, default=None)
    n = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    k = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    h = serializers.IntegerField(min_value=0, required=False, allow_null=True, default=None)
    N = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    norm = serializers.ChoiceField(choices=tuple(NORM_REGISTRY), required=False, allow_null=True, default=None)
    operator = serializers.ChoiceField(choices=OPERATOR_CHOICES, required=False, allow_null=True, default=None)
    probe = serializers.ChoiceField(choices=PROBE_CHOICES, required=False, allow_null=True, default=None)
    theorem = serializers.CharField(required=False, allow_null=True, default=None)
    record = serializers.BooleanField(default=False)

    def _require(self, data, *fields):
        missing = [field for field in fields if data.get(field) is None]
        if missing:
            raise serializers.ValidationError(
                {field: f'Required for {data["subcommand"]}' for field in missing},
                code='required',
            )

    def validate(self, data):
        subcommand = data['subcommand']
        if subcommand == 'generate':
            self._require(data, 'kind')
        elif subcommand == 'classify':
            self._require(data, 'tree')
        elif subcommand == 'norm':
            self._require(data, 'tree', 'norm', 'function')
        elif subcommand == 'operator':
            self._require(data, 'tree', 'operator')
            if data['operator'] in OPERATORS:
                self._require(data, 'function')
            if data['operator'].startswith('talagrand'):
                self._require(data, 'seed')
        elif subcommand == 'probe':
            self._require(data, 'probe')
            probe = data['probe']
            if probe in RANDOMIZED_PROBES:
                self._require(data, 'seed')
            if probe in NEEDS_TREE:
                self._require(data, 'tree')
            if probe in ('strict_convexity', 'kadec', 'smoothness'):
                self._require(data, 'norm')
            if probe == 'smoothness':
                self._require(data, 'function')
            if probe == 'mlur' and data['norm'] is not None and data['norm'] not in MLUR_NORMS:
                raise serializers.ValidationError(
                    {'norm': f'mlur probes one of: {", ".join(MLUR_NORMS)}'}, code='invalid_choice',
                )
        elif subcommand == 'game':
            self._require(data, 'seed')
        return data
