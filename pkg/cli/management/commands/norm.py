from ._base import RenormLabCommand


class Command(RenormLabCommand):
    help = 'Evaluate a registered norm on a function file'
    subcommand = 'norm'

    def add_command_arguments(self, parser):
        parser.add_argument('--norm', required=True)
        parser.add_argument('--function', required=True, help='Function file {"values": {"<node>": "p/q"}}')
        parser.add_argument('--record', action='store_true', help='Store the evaluation in the database')
