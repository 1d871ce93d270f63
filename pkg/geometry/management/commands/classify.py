import logging
from pathlib import Path

from geometry.classify import ClassificationMode, classify, load_structures
from geometry.management.base import GeometryCommand
from geometry.oracle import oracle_classify

logger = logging.getLogger(__name__)


class Command(GeometryCommand):
    help = 'Partition a directory of structures by algebraic or L0 equivalence'

    def add_arguments(self, parser):
        parser.add_argument('directory', help='directory of .str files')
        parser.add_argument('--mode', choices=[ClassificationMode.ALGEBRAIC.value, ClassificationMode.L0.value],
                            default=ClassificationMode.L0.value)
        parser.add_argument('--out', help='report file; full fingerprints go to <out>.fingerprints/')
        parser.add_argument('--arity', type=int, help='comparison arity override (default k**2)')
        parser.add_argument('--ed-bound', type=int, help='equational-domain check bound (algebraic mode)')
        parser.add_argument('--approximate-depth', type=int,
                            help='depth-bounded terms for algebraic mode beyond the universe limit')
        parser.add_argument('--workers', type=int, help='worker processes')
        parser.add_argument('--cache', action='store_true', help='reuse fingerprints stored in the database')
        parser.add_argument('--record', action='store_true', help='store the run in the database')
        parser.add_argument('--verify', action='store_true',
                            help='re-partition by brute force and fail when the partitions differ')

    def run(self, *args, **options):
        structures = load_structures(options['directory'])
        report = classify(
            structures, options['mode'], m=options['arity'], ed_bound=options['ed_bound'],
            approximate_depth=options['approximate_depth'], workers=options['workers'], use_cache=options['cache'],
        )
        text = report.to_text()
        if options['out']:
            Path(options['out']).write_text(text, encoding='utf-8')
            report.write_sidecars(options['out'])
        else:
            self.emit(text)

        if options['record']:
            from geometry.models import ClassificationRun
            run = ClassificationRun.record(report, source=options['directory'])
            run.refresh_from_db()
            self.stderr.write(f"recorded {run.run_id}")

        if not options['verify']:
            return True
        expected = oracle_classify(structures, report.mode.value, m=report.m)
        agrees = expected == report.fingerprint_partition()
        logger.info("oracle partition compared classes=%s agrees=%s", len(expected), agrees)
        self.stderr.write(f"oracle partition {'agrees' if agrees else 'disagrees'}")
        return agrees
