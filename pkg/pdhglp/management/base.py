"""Shared behaviour of the pdhglp management commands."""
import logging
import sys
from contextlib import contextmanager
from functools import partial

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from pdhglp.cli import EXIT_INFEASIBLE, EXIT_ITERATION_LIMIT, EXIT_OK, EXIT_USAGE
from pdhglp.conf import app_settings
from pdhglp.exceptions import InnerSolveError, PdhgLpError
from pdhglp.results import Status


def _usage_error(parser, message):
    """Report argument errors with the usage exit code."""
    if parser.called_from_command_line:
        parser.print_usage(sys.stderr)
        parser.exit(EXIT_USAGE, '{}: error: {}\n'.format(parser.prog, message))
    raise CommandError("Error: {}".format(message), returncode=EXIT_USAGE)


def status_exit_code(status):
    if Status(status).is_infeasible:
        return EXIT_INFEASIBLE
    if Status(status) is Status.ITERATION_LIMIT:
        return EXIT_ITERATION_LIMIT
    return EXIT_OK


class PdhgCommand(BaseCommand):
    requires_system_checks = []

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = partial(_usage_error, parser)
        return parser

    @contextmanager
    def logging_to_stderr(self, enabled, debug=False):
        """Send the package logger to the command's stderr while the block runs."""
        if not enabled:
            yield
            return
        logger = logging.getLogger(app_settings.LOGGER_NAME)
        handler = logging.StreamHandler(self.stderr)
        handler.setFormatter(logging.Formatter('%(message)s'))
        previous_level = logger.level
        logger.addHandler(handler)
        logger.setLevel(logging.DEBUG if debug else logging.INFO)
        try:
            yield
        finally:
            logger.removeHandler(handler)
            logger.setLevel(previous_level)

    @contextmanager
    def command_errors(self):
        """Translate package errors into ``CommandError`` with the matching exit code."""
        try:
            yield
        except InnerSolveError as err:
            raise CommandError(str(err), returncode=status_exit_code(err.status) or EXIT_USAGE)
        except ValidationError as err:
            raise CommandError("Invalid problem: {}".format("; ".join(err.messages)), returncode=EXIT_USAGE)
        except (PdhgLpError, OSError, ValueError) as err:
            raise CommandError(str(err), returncode=EXIT_USAGE)

    def write_output(self, text, path):
        if path:
            with self.command_errors(), open(path, 'w') as target:
                target.write(text)
        else:
            self.stdout.write(text, ending='' if text.endswith('\n') else '\n')
