import json

from django.core.management.base import BaseCommand, CommandError

from cli.reports import format_diff, load_report, report_diff
from cli.runner import CONFIG
from utils.exceptions import SchemaMismatch


class Command(BaseCommand):
    help = 'Semantic diff of two report files (timestamps ignored)'
    requires_migrations_checks = False

    def add_arguments(self, parser):
        parser.add_argument('a')
        parser.add_argument('b')
        parser.add_argument('--json', action='store_true', help='Print the diff entries as JSON')

    def handle(self, *args, **options):
        try:
            a, b = load_report(options['a']), load_report(options['b'])
        except (OSError, json.JSONDecodeError) as exc:
            raise CommandError(f'Cannot read report: {exc}', returncode=CONFIG)
        try:
            entries = report_diff(a, b)
        except SchemaMismatch as exc:
            raise CommandError(exc.message, returncode=CONFIG)
        if options['json']:
            self.stdout.write(json.dumps(entries, sort_keys=True, indent=2))
        elif entries:
            self.stdout.write(format_diff(entries))
        changed = [entry for entry in entries if entry['kind'] != 'within-certified-error']
        self.stderr.write(f'{len(entries)} difference(s), {len(changed)} beyond certified error')
