"""
The spf-lab entry point: `spf-lab X ...` runs the management command spf_X.

Exit codes: 0 on success, 1 for input errors, 2 for numerical failures.
Errors are written to stderr as {"error": <class>, "detail": <message>}.
"""
import json
import logging
import os
import sys

SUBCOMMANDS = ('eval', 'norm', 'functional', 'blaschke', 'symmetrize', 'check', 'search', 'scan', 'series')

USAGE = (
    "usage: spf-lab <subcommand> [options]\n"
    f"subcommands: {', '.join(SUBCOMMANDS)}\n"
    "run 'spf-lab <subcommand> --help' for the options of one subcommand\n"
)

logger = logging.getLogger(__name__)


def _fail(stderr, error, detail, code):
    stderr.write(json.dumps({'error': error, 'detail': detail}) + '\n')
    return code


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    if not argv or argv[0] in ('-h', '--help'):
        (stdout if argv else stderr).write(USAGE)
        return 0 if argv else 1
    name, rest = argv[0], argv[1:]
    if name not in SUBCOMMANDS:
        stderr.write(USAGE)
        return _fail(stderr, 'UnknownSubcommand', f"Unknown subcommand {name!r}.", 1)

    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'core.settings')
    import django
    django.setup()

    from django.core.management import call_command
    from django.core.management.base import CommandError
    from rest_framework.exceptions import ValidationError

    from apps.core.exceptions import SPFLabError
    from core.manifest import current_invocation

    token = current_invocation.set(['spf-lab'] + argv)
    try:
        call_command(f'spf_{name}', *rest, stdout=stdout, stderr=stderr)
    except SPFLabError as exc:
        logger.error(f"spf-lab {name}: {exc.__class__.__name__}: {exc}")
        return _fail(stderr, exc.__class__.__name__, str(exc), exc.exit_code)
    except ValidationError as exc:
        logger.error(f"spf-lab {name}: invalid input: {exc.detail}")
        return _fail(stderr, 'ValidationError', exc.detail, 1)
    except CommandError as exc:
        return _fail(stderr, 'CommandError', str(exc), 1)
    except SystemExit as exc:
        # argparse --help
        return exc.code if isinstance(exc.code, int) else 0
    finally:
        current_invocation.reset(token)
    return 0


def main():
    sys.exit(dispatch())
