"""
Shared plumbing for the geometry management commands.

Commands implement run(**options) and return True for an affirmative answer. A False
return means a negative verdict of a yes/no query and ends the process with status 1;
engine errors end it with status 2.
"""
import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from geometry.algebraic import atomic_spec
from geometry.closure import comparison_arity
from geometry.exceptions import DefGeoError, GrammarError
from geometry.parsing import parse_spec, parse_structure

VERBOSITY_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}

NEGATIVE_EXIT = 1
ERROR_EXIT = 2


def read_text(path):
    try:
        return Path(path).read_text(encoding='utf-8')
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc.strerror}", returncode=ERROR_EXIT) from None


def load_structure(path):
    try:
        return parse_structure(read_text(path))
    except GrammarError as exc:
        raise CommandError(f"{path}: {exc}", returncode=ERROR_EXIT) from None


def load_spec(path, structure):
    try:
        return parse_spec(read_text(path), ctx=structure)
    except GrammarError as exc:
        raise CommandError(f"{path}: {exc}", returncode=ERROR_EXIT) from None


class GeometryCommand(BaseCommand):
    requires_system_checks = []
    requires_migrations_checks = False

    def execute(self, *args, **options):
        level = VERBOSITY_LEVELS.get(options.get('verbosity', 1), logging.DEBUG)
        logging.getLogger('geometry').setLevel(level)
        return super().execute(*args, **options)

    def handle(self, *args, **options):
        try:
            affirmative = self.run(*args, **options)
        except DefGeoError as exc:
            raise CommandError(str(exc), returncode=ERROR_EXIT) from None
        if affirmative is False:
            self.stdout.flush()
            raise SystemExit(NEGATIVE_EXIT)

    def run(self, *args, **options):
        raise NotImplementedError('subclasses of GeometryCommand must provide a run() method')

    def emit(self, text):
        self.stdout.write(text, ending='')


class SpecCommand(GeometryCommand):
    """A command that reads a structure and a formula class spec (or builds an atomic one)"""

    def add_arguments(self, parser):
        parser.add_argument('structure', help='structure file')
        parser.add_argument('--spec', help='formula class spec file')
        parser.add_argument('--auto-atomic', action='store_true',
                            help='use all equations between term operations as generators')
        parser.add_argument('--max-term-arity', type=int,
                            help='term arity of the --auto-atomic equations (default: the family arity)')
        parser.add_argument('--approximate-depth', type=int,
                            help='bound the --auto-atomic terms by depth (approximate results)')

    def family_arity(self, options, structure):
        """Largest arity the command builds families at"""
        return options.get('arity') or comparison_arity(structure.k)

    def structure_and_spec(self, options):
        structure = load_structure(options['structure'])
        if options['auto_atomic']:
            if options['spec']:
                raise CommandError("--spec and --auto-atomic are exclusive", returncode=ERROR_EXIT)
            target = self.family_arity(options, structure)
            term_arity = target if options['max_term_arity'] is None else options['max_term_arity']
            if term_arity < 1:
                raise CommandError("--max-term-arity must be at least 1", returncode=ERROR_EXIT)
            if term_arity < target:
                self.stderr.write(
                    f"note: --max-term-arity {term_arity} is below the family arity {target}; "
                    f"equations in more variables are left out"
                )
            spec = atomic_spec(structure, term_arity, depth=options['approximate_depth'])
            return structure, spec
        if not options['spec']:
            raise CommandError("pass --spec <file> or --auto-atomic", returncode=ERROR_EXIT)
        return structure, load_spec(options['spec'], structure)
