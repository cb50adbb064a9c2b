"""Restarted PDHG solvers for linear programs, packaged as a Django app."""
default_app_config = 'pdhglp.apps.PdhgLpConfig'
