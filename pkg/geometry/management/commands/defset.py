from geometry.closure import def_family
from geometry.exceptions import DefGeoError
from geometry.management.base import SpecCommand
from geometry.parsing import parse_relation


class Command(SpecCommand):
    help = 'Test membership of a relation in the n-ary slice of a definable family'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--arity', type=int, required=True, help='n')
        parser.add_argument('--query', help='relation text rel/k/n:{...}; without it the slice is printed')

    def run(self, *args, **options):
        structure, spec = self.structure_and_spec(options)
        family = def_family(structure, spec, options['arity'])
        if not options['query']:
            self.emit(family.serialize())
            return True
        query = parse_relation(options['query'])
        if query.k != structure.k or query.arity != family.n:
            raise DefGeoError(f"query is over {query.k}**{query.arity}, the slice over {structure.k}**{family.n}")
        if family.member(query):
            self.emit("member\n")
            return True
        self.emit("not member\n")
        return False
