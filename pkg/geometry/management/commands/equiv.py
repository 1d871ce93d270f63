from geometry.closure import Verdict, decide_equivalence
from geometry.management.base import GeometryCommand, load_spec, load_structure


class Command(GeometryCommand):
    help = 'Decide whether two structures define the same family; prints a witness otherwise'

    def add_arguments(self, parser):
        parser.add_argument('structure1')
        parser.add_argument('spec1')
        parser.add_argument('structure2')
        parser.add_argument('spec2')
        parser.add_argument('--arity', type=int, help='comparison arity override (default k**2)')

    def run(self, *args, **options):
        first = load_structure(options['structure1'])
        second = load_structure(options['structure2'])
        result = decide_equivalence(
            first, load_spec(options['spec1'], first),
            second, load_spec(options['spec2'], second),
            m=options['arity'],
        )
        self.emit(result.to_text())
        return result.verdict != Verdict.INEQUIVALENT
