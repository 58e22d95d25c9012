from django.apps import AppConfig


class CoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tauberian_lab.core'
    verbose_name = 'Tauberian lab core mathematics'
