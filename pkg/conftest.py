"""Configure Django for running the test suite under pytest, as ``runtests.py`` does."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'pdhglp.tests.settings')
django.setup()
