import hashlib

from geometry.classify import ClassificationMode
from geometry.closure import fingerprint
from geometry.management.base import SpecCommand


class Command(SpecCommand):
    help = 'Print the canonical fingerprint of a structure and formula class'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--arity', type=int, help='comparison arity override (default k**2)')
        parser.add_argument('--digest', action='store_true', help='print only the 64-bit digest')
        parser.add_argument('--cache', action='store_true', help='reuse fingerprints stored in the database')

    def run(self, *args, **options):
        structure, spec = self.structure_and_spec(options)
        if options['cache']:
            text = self.cached(structure, spec, options)
        else:
            text = fingerprint(structure, spec, m=options['arity']).text
        if options['digest']:
            self.emit(hashlib.sha256(text.encode('utf-8')).hexdigest()[:16] + '\n')
        else:
            self.emit(text)
        return True

    def cached(self, structure, spec, options):
        from geometry.models import FingerprintRecord

        m = options['arity'] or structure.k ** 2
        key = FingerprintRecord.objects.cache_key(structure.to_text(), spec.to_text(), m, options['approximate_depth'])
        record = FingerprintRecord.objects.lookup(key)
        if record is not None:
            return record.text
        text = fingerprint(structure, spec, m=options['arity']).text
        FingerprintRecord.objects.remember(
            key, structure_name=structure.name, mode=ClassificationMode.SPEC.value,
            universe_size=structure.k, arity=m, text=text,
        )
        return text
