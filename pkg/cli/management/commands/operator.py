from ._base import RenormLabCommand


class Command(RenormLabCommand):
    help = 'Apply an operator, assemble the R+S matrix or run a Talagrand witness check'
    subcommand = 'operator'

    def add_command_arguments(self, parser):
        parser.add_argument('--operator', required=True,
                            help='R, S, T_special, T_dyadic, matrix, talagrand or talagrand_dyadic')
        parser.add_argument('--function', help='Function file for R, S, T_special, T_dyadic')
        parser.add_argument('--triplets', help='Write the matrix as sparse "row col p/q" lines')
        parser.add_argument('--budget', type=int, default=100, help='Random samples for the Talagrand check')
        parser.add_argument('--seed', type=int)
