from django.apps import AppConfig


class HlawkaConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'hlawka'
    verbose_name = 'Hornich-Hlawka verification'
