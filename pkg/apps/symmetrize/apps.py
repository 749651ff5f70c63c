from django.apps import AppConfig


class SymmetrizeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.symmetrize'
    verbose_name = 'Symmetrization pipeline'
