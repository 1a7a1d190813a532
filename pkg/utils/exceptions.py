"""
Typed errors raised across renormlab apps
"""
from django.core.exceptions import ValidationError


class RenormLabError(Exception):
    """
    Base class for domain failures.

    `witness` carries whatever lets a caller replay the failure
    (a node, an edge, a class id, a sample seed).
    """
    default_code = 'renormlab_error'

    def __init__(self, message, witness=None, code=None):
        super().__init__(message)
        self.message = message
        self.witness = witness
        self.code = code or self.default_code

    def as_dict(self):
        return {
            'error': type(self).__name__,
            'code': self.code,
            'message': self.message,
            'witness': self.witness,
        }


class InputError(ValidationError):
    """Invalid input documents or parameters"""
    default_code = 'invalid'

    def __init__(self, message, witness=None, code=None):
        super().__init__(message, code=code or self.default_code)
        self.witness = witness


# Input validation

class DanglingClass(InputError):
    default_code = 'dangling_class'


class BadMultiplicity(InputError):
    default_code = 'bad_multiplicity'


class ParamOutOfRange(InputError):
    default_code = 'param_out_of_range'


class InvalidWeight(InputError):
    default_code = 'invalid_weight'


class UnknownNode(InputError):
    default_code = 'unknown_node'


class IndexOutOfRange(InputError):
    default_code = 'index_out_of_range'


# Domain failures

class SizeBudgetExceeded(RenormLabError):
    default_code = 'size_budget_exceeded'


class BudgetExceeded(RenormLabError):
    default_code = 'budget_exceeded'


class PremiseViolated(RenormLabError):
    default_code = 'premise_violated'


class UnsupportedPresentation(RenormLabError):
    default_code = 'unsupported_presentation'


class ShapeViolation(RenormLabError):
    default_code = 'shape_violation'


class NonContraction(RenormLabError):
    default_code = 'non_contraction'


class IllegalMove(RenormLabError):
    default_code = 'illegal_move'


class SchemaMismatch(RenormLabError):
    default_code = 'schema_mismatch'
