"""Experiments app configuration."""
from django.apps import AppConfig


class ExperimentsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.experiments'
    verbose_name = 'Experiments'
