from ._base import RenormLabCommand


class Command(RenormLabCommand):
    help = 'Run a geometric probe or the Choquet game and write its report'
    subcommand = 'probe'

    def add_command_arguments(self, parser):
        parser.add_argument('--name', dest='probe', required=True)
        parser.add_argument('--norm')
        parser.add_argument('--function', help='Base point for the smoothness probe')
        parser.add_argument('--budget', type=int, default=100, help='Samples per run')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--repeat', type=int, default=1, help='Runs with seeds seed, seed+1, ...')
        parser.add_argument('--jobs', type=int, default=1, help='Worker threads over the repeated runs')
        parser.add_argument('--schedule', help='Copies schedule, e.g. 1,2,4,8')
        parser.add_argument('--rounds', type=int, default=50)
        parser.add_argument('--strategy', default='random')
        parser.add_argument('--csv', help='Also write probe statistics as CSV')
