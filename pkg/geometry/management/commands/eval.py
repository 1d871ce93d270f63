from geometry.evaluator import solution_set
from geometry.management.base import GeometryCommand, load_structure
from geometry.parsing import parse_formula
from geometry.syntax import max_free_var


class Command(GeometryCommand):
    help = 'Print the solution set of a formula over a structure'

    def add_arguments(self, parser):
        parser.add_argument('structure', help='structure file')
        parser.add_argument('formula', help='formula text, variables x1..xn')
        parser.add_argument('--arity', type=int, help='n; defaults to the largest free variable')
        parser.add_argument('--workers', type=int, help='worker processes for large assignment spaces')

    def run(self, *args, **options):
        structure = load_structure(options['structure'])
        phi = parse_formula(options['formula'], ctx=structure)
        n = options['arity'] or max(max_free_var(phi), 1)
        self.emit(solution_set(phi, n, structure, workers=options['workers']).to_text() + '\n')
        return True
