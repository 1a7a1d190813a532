"""
Shared plumbing of the renormlab management commands
"""
from django.core.management.base import BaseCommand, CommandError

from cli.reports import dump_report
from cli.runner import CONFIG, OK, run
from cli.serializers import RunConfigSerializer


class RenormLabCommand(BaseCommand):
    """
    Subclasses name their subcommand and add their own options; every run
    goes through RunConfigSerializer and cli.runner.run. A nonzero run
    status becomes a CommandError with that return code.
    """
    subcommand = None
    requires_migrations_checks = False

    def add_arguments(self, parser):
        parser.add_argument('--tree', help='Tree file (JSON presentation document)')
        parser.add_argument('--rho', '--weight', dest='weight', help='Weight file (JSON)')
        parser.add_argument('--depth', type=int, default=3, help='Unfolding depth')
        parser.add_argument('--copies', type=int, default=4, help='Copies per omega edge')
        parser.add_argument('--output', '-o', help='Write the report here instead of stdout')
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def build_config(self, options):
        fields = RunConfigSerializer().fields
        config = {key: value for key, value in options.items() if value is not None and key in fields}
        config['subcommand'] = self.subcommand
        return config

    def handle(self, *args, **options):
        serializer = RunConfigSerializer(data=self.build_config(options))
        if not serializer.is_valid():
            raise CommandError(f'Invalid configuration: {serializer.errors}', returncode=CONFIG)
        config = serializer.validated_data
        status, report = run(config)
        if not config['output']:
            self.stdout.write(dump_report(report), ending='')
        if status != OK:
            error = report.get('results', {}).get('error') if isinstance(report, dict) else None
            detail = error['message'] if error else 'violations found, see the report'
            raise CommandError(f'{self.subcommand} finished with status {status}: {detail}', returncode=status)
        self.stderr.write(self.style.SUCCESS(f'{self.subcommand}: done'))
