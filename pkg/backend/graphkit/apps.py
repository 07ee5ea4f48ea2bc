from django.apps import AppConfig


class GraphkitConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'graphkit'
    verbose_name = 'Graph Algorithms'
