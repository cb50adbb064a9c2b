from django.apps import AppConfig


class PdhgLpConfig(AppConfig):
    name = 'pdhglp'
    verbose_name = 'PDHG LP'
