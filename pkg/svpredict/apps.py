from django.apps import AppConfig


class SvpredictConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'svpredict'
