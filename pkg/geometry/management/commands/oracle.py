from geometry.management.base import SpecCommand
from geometry.oracle import oracle_check


class Command(SpecCommand):
    help = 'Recompute the family by brute force and diff it against the engine'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--max-arity', type=int, default=3, help='largest arity compared')

    def family_arity(self, options, structure):
        return options['max_arity']

    def run(self, *args, **options):
        structure, spec = self.structure_and_spec(options)
        report = oracle_check(structure, spec, options['max_arity'])
        self.emit(report.to_text())
        return report.agrees
