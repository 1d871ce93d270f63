from geometry.algebraic import ed_check
from geometry.management.base import GeometryCommand, load_structure


class Command(GeometryCommand):
    help = 'Check that unions of algebraic sets stay algebraic up to a bounded arity'

    def add_arguments(self, parser):
        parser.add_argument('structure', help='structure file (relations are ignored)')
        parser.add_argument('--bound', type=int, help='largest arity checked (default DEFGEO_ED_BOUND)')

    def run(self, *args, **options):
        report = ed_check(load_structure(options['structure']), options['bound'])
        self.emit(report.to_text())
        return report.passes
