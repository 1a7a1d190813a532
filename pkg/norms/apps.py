from django.apps import AppConfig


class NormsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'norms'
    verbose_name = 'Norm evaluators'
