from ._base import RenormLabCommand


class Command(RenormLabCommand):
    help = 'Write a tree file for one of the example trees (chain, kary, comb, lambda, augment_pairs, augment_dyadic)'
    subcommand = 'generate'

    def add_command_arguments(self, parser):
        parser.add_argument('--kind', required=True)
        parser.add_argument('--n', type=int, help='chain length')
        parser.add_argument('--k', type=int, help='branching of kary')
        parser.add_argument('--h', type=int, help='height of kary, or domain size bound of lambda')
        parser.add_argument('--N', type=int, help='label range of lambda')
