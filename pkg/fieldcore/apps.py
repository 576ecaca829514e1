from django.apps import AppConfig


class FieldcoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fieldcore'
