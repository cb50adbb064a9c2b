#!/usr/bin/env python
"""Script to run tests.

This file is required to run Django tests in tox. Tags given with ``--tag``/``--exclude-tag``
are passed to the test runner, e.g. ``runtests.py --exclude-tag slow``.
"""
import argparse
import os
import sys

import django
from django.conf import settings
from django.test.utils import get_runner


def runtests(argv=()):
    parser = argparse.ArgumentParser()
    parser.add_argument('--tag', action='append', dest='tags')
    parser.add_argument('--exclude-tag', action='append', dest='exclude_tags')
    parser.add_argument('labels', nargs='*', default=['pdhglp'])
    args = parser.parse_args(list(argv))

    os.environ['DJANGO_SETTINGS_MODULE'] = 'pdhglp.tests.settings'
    django.setup()
    TestRunner = get_runner(settings)
    test_runner = TestRunner(tags=args.tags, exclude_tags=args.exclude_tags)
    failures = test_runner.run_tests(args.labels)
    sys.exit(bool(failures))


if __name__ == '__main__':
    runtests(sys.argv[1:])
