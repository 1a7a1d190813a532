"""
Persisted norm evaluations
"""
from django.db import models


class NormEvaluation(models.Model):
    """
    One evaluated norm value, keyed by digests of the tree, the weight and
    the input function so repeated runs can be compared
    """
    norm = models.CharField(max_length=32, help_text="Registry name, e.g. 'composite_lur'")
    tree_digest = models.CharField(max_length=64)
    weight_digest = models.CharField(max_length=64)
    input_digest = models.CharField(max_length=64)

    # Exact rationals as "p/q"
    value = models.CharField(max_length=512)
    error_radius = models.CharField(max_length=512, default='0')

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        verbose_name = 'Norm Evaluation'
        verbose_name_plural = 'Norm Evaluations'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['norm', 'input_digest']),
        ]

    def __str__(self):
        return f"{self.norm}({self.input_digest[:8]}) = {self.value}"

    @property
    def is_exact(self):
        return self.error_radius == '0'
