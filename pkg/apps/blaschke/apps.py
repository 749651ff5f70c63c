from django.apps import AppConfig


class BlaschkeConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'apps.blaschke'
    verbose_name = 'Blaschke machinery'
