from django.apps import AppConfig


class ZetaConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'zeta'
