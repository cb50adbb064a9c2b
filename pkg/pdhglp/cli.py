"""The ``pdhglp`` command line: the package's management commands without a Django project.

    pdhglp solve --input problem.mps
    pdhglp generate knapsack --items 100 --dims 10 --seed 7 --output knapsack.mps
    pdhglp regret --input problem.json --pred pred.csv --true true.csv
"""
import os
import sys

import django
from django.conf import settings
from django.core.management import ManagementUtility

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_ITERATION_LIMIT = 3

STANDALONE_SETTINGS = {
    'INSTALLED_APPS': ['pdhglp'],
    'TEMPLATES': [
        {
            'BACKEND': 'django.template.backends.django.DjangoTemplates',
            'APP_DIRS': True,
        },
    ],
}


def configure():
    """Configure minimal Django settings unless a settings module is in use."""
    if not settings.configured and not os.environ.get('DJANGO_SETTINGS_MODULE'):
        settings.configure(**STANDALONE_SETTINGS)
    django.setup()


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    configure()
    ManagementUtility(['pdhglp'] + argv).execute()
