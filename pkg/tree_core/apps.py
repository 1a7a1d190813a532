from django.apps import AppConfig


class TreeCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tree_core'
    verbose_name = 'Trees and presentations'
