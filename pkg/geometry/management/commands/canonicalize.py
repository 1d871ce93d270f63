from pathlib import Path

from geometry.closure import canonicalize
from geometry.management.base import SpecCommand


class Command(SpecCommand):
    help = 'Write a relational structure whose atoms define the same family'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--out', help='structure file to write; the atom spec goes next to it as .spec')
        parser.add_argument('--basis', action='store_true', help='list only the point closures (and the empty set)')
        parser.add_argument('--check-bound', type=int, help='largest arity the presentation is verified at')

    def run(self, *args, **options):
        structure, spec = self.structure_and_spec(options)
        presentation = canonicalize(structure, spec, basis_only=options['basis'], check_bound=options['check_bound'])
        text = presentation.structure.to_text()
        if not options['out']:
            self.emit(text)
            return True

        out = Path(options['out'])
        out.write_text(text, encoding='utf-8')
        out.with_suffix('.spec').write_text(presentation.spec.to_text(), encoding='utf-8')
        verified = ','.join(map(str, presentation.verified_arities)) or '-'
        skipped = ','.join(map(str, presentation.skipped_arities)) or '-'
        self.emit(
            f"canonical relations={len(presentation.structure.rels)} m={presentation.fingerprint.m} "
            f"digest={presentation.fingerprint.digest()} verified={verified} skipped={skipped}\n"
        )
        return True
