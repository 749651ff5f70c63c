import csv
import io
import json
import sys

from django.core.management.base import BaseCommand

from core.manifest import build_manifest, current_invocation, write_output


class SPFLabCommand(BaseCommand):
    """
    Shared plumbing for the spf_* commands: JSON/CSV emission and manifests.

    Domain errors are not caught here; core.cli.dispatch maps them to exit codes.
    """

    def emit_json(self, payload):
        self.stdout.write(json.dumps(payload, indent=2))

    def emit_csv(self, header, rows):
        self.stdout.write(to_csv(header, rows), ending='')

    def save(self, path, text, options, input_path=None, seed=None, fallback=''):
        argv = current_invocation.get() or ['spf-lab'] + sys.argv[1:]
        manifest = build_manifest(argv, input_path=input_path, seed=seed, fallback=fallback)
        write_output(path, text, manifest)


def to_csv(header, rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buffer.getvalue()
