from django.apps import AppConfig


class HeightsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'heights'
