from ._base import RenormLabCommand


class Command(RenormLabCommand):
    help = 'Classify the points of a weighted tree and check the theorem conditions'
    subcommand = 'classify'

    def add_command_arguments(self, parser):
        parser.add_argument('--theorem', help='Check only this theorem (T4_1, T5_1, T6_1, T7_1, T8_1)')
