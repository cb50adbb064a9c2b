#!/usr/bin/env python
from setuptools import find_packages, setup

VERSION = "0.1.0"

PACKAGES = find_packages()
REQUIREMENTS = ['django >=3.2,<5.0', 'numpy', 'scipy']
TEST_REQUIREMENTS = ['coverage']
EXTRAS_REQUIRE = {
    'quality': ['isort', 'flake8'],
    'test': TEST_REQUIREMENTS,
}
CLASSIFIERS = ['License :: OSI Approved :: MIT License',
               'Framework :: Django',
               'Intended Audience :: Science/Research',
               'Topic :: Scientific/Engineering :: Mathematics',
               'Programming Language :: Python',
               'Programming Language :: Python :: 3',
               'Programming Language :: Python :: 3 :: Only',
               'Programming Language :: Python :: 3.8',
               'Programming Language :: Python :: 3.9',
               'Programming Language :: Python :: 3.10']


DESCRIPTION = (
    "A Django app and command line tool solving linear programs with restarted average PDHG and "
    "reflected restarted Halpern PDHG, with SPO+ tools for decision-focused learning."
)

setup(
    name='django-pdhg-lp',
    version='%s' % VERSION,
    description=DESCRIPTION,
    long_description=DESCRIPTION,
    packages=PACKAGES,
    include_package_data=True,
    package_data={'pdhglp': ['templates/pdhglp/*.txt']},
    python_requires='>=3.8',
    install_requires=REQUIREMENTS,
    tests_require=TEST_REQUIREMENTS,
    extras_require=EXTRAS_REQUIRE,
    test_suite='runtests.runtests',
    entry_points={
        'console_scripts': ['pdhglp = pdhglp.cli:main'],
    },
    keywords=['django', 'linear programming', 'pdhg', 'first-order methods', 'spo+'],
    classifiers=CLASSIFIERS,
)
