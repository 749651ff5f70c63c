from django.apps import AppConfig


class NormsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.norms'
    verbose_name = 'Norms and functionals'
