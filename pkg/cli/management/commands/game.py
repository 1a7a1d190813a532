from ._base import RenormLabCommand


class Command(RenormLabCommand):
    help = "Play alpha's strategy in the Choquet game on the injection tree"
    subcommand = 'game'

    def add_command_arguments(self, parser):
        parser.add_argument('--rounds', type=int, default=50)
        parser.add_argument('--strategy', default='random', help='random, greedy or adversarial')
        parser.add_argument('--seed', type=int, required=True)
        parser.add_argument('--repeat', type=int, default=1)
        parser.add_argument('--jobs', type=int, default=1)
