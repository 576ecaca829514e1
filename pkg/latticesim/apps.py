from django.apps import AppConfig


class LatticesimConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'latticesim'
