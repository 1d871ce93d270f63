"""
Batch classification of finite algebras up to algebraic or L0-logical equivalence.

Every item gets a fingerprint at the comparison arity m = k**2. In algebraic mode an item is
only merged with others when it passes the equational-domain check at the configured bound;
the rest are listed as undetermined together with their digests.
"""
import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings
from django.db import models

from geometry.algebraic import AlgebraicFamily, EDVerdict, atomic_spec, ed_check
from geometry.closure import DefFamily, comparison_arity, def_family
from geometry.exceptions import DefGeoError, GuardExceeded, SymbolError, UniverseMismatch
from geometry.limits import get_limits
from geometry.parsing import parse_structure

logger = logging.getLogger(__name__)

REPORT_VERSION = 'defgeo-report v1'

# term arity of the equations used for approximate algebraic fingerprints
APPROXIMATE_TERM_ARITY = 2


class ClassificationMode(models.TextChoices):
    ALGEBRAIC = 'algebraic', 'Algebraic (equational-domain gated)'
    L0 = 'l0', 'L0 (quantifier-free)'
    SPEC = 'spec', 'Formula class spec'


class UndeterminedReason(models.TextChoices):
    ED_FAILS = 'ed_fails_at_bound', 'Equational-domain check fails at bound'
    APPROXIMATE = 'approximate', 'Approximate fingerprint'


@dataclass(frozen=True)
class ReportItem:
    name: str
    fingerprint: str = field(repr=False)
    ed_verdict: str | None = None
    reason: str | None = None

    @property
    def digest(self):
        return hashlib.sha256(self.fingerprint.encode('utf-8')).hexdigest()[:16]

    @property
    def determined(self):
        return self.reason is None


@dataclass
class ClassificationReport:
    mode: ClassificationMode
    k: int
    m: int
    override: bool = False
    ed_bound: int | None = None
    approximate_depth: int | None = None
    items: list = field(default_factory=list)
    classes: list = field(default_factory=list)

    @property
    def undetermined(self):
        return [item for item in self.items if not item.determined]

    @property
    def class_count(self):
        return len(self.classes)

    @property
    def exponent(self):
        """k**(k**2): the classes number at most 2**(2**exponent)"""
        return self.k ** (self.k * self.k)

    def bound_text(self):
        return f"2^(2^{self.exponent})"

    def fingerprint_partition(self):
        """Names grouped by fingerprint text alone, ignoring the ED gate"""
        buckets = {}
        for item in self.items:
            buckets.setdefault(item.fingerprint, []).append(item.name)
        return sorted((sorted(names) for names in buckets.values()), key=lambda names: names[0])

    def to_text(self):
        version = getattr(settings, 'DEFGEO_REPORT_VERSION', REPORT_VERSION) if settings.configured else REPORT_VERSION
        m = f"{self.m} (override)" if self.override else str(self.m)
        ed_bound = self.ed_bound if self.ed_bound is not None else '-'
        header = f"mode={self.mode.value} k={self.k} m={m} ed_bound={ed_bound}"
        if self.approximate_depth is not None:
            header += f" approximate_depth={self.approximate_depth}"
        lines = [version, header, f"bound={self.bound_text()}", f"items={len(self.items)}"]
        for item in self.items:
            lines.append(f"item {item.name} ed={item.ed_verdict or '-'} digest={item.digest}")
        lines.append(f"classes={self.class_count}")
        for names in self.classes:
            lines.append(f"class {names[0]} size={len(names)}: {', '.join(names)}")
        undetermined = self.undetermined
        lines.append(f"undetermined={len(undetermined)}")
        for item in undetermined:
            lines.append(f"undetermined {item.name} digest={item.digest} reason={item.reason}")
        return '\n'.join(lines) + '\n'

    def write_sidecars(self, out_path):
        """Full fingerprints as <out>.fingerprints/<name>.fp"""
        directory = Path(f"{out_path}.fingerprints")
        directory.mkdir(parents=True, exist_ok=True)
        for item in self.items:
            (directory / f"{item.name}.fp").write_text(item.fingerprint, encoding='utf-8')
        return directory


# ============================================
# PER-ITEM JOBS
# ============================================

def fingerprint_item(structure, mode, m, ed_bound=None, approximate_depth=None, limits=None):
    """
    Compute one item; returns (name, fingerprint text, ED verdict value or None).

    Runs in worker processes, so it takes and returns plain picklable values.
    """
    limits = get_limits(limits)
    if mode == ClassificationMode.L0:
        family = DefFamily.quantifier_free(structure, m, limits=limits)
        return structure.name, family.serialize(), None

    algebra = structure.reduct()
    report = ed_check(algebra, ed_bound, limits=limits)
    if approximate_depth is not None:
        spec = atomic_spec(algebra, APPROXIMATE_TERM_ARITY, depth=approximate_depth, limits=limits)
        family = def_family(algebra, spec, m, limits=limits)
    else:
        family = DefFamily.from_algebraic(AlgebraicFamily(algebra, m, limits=limits))
    return structure.name, family.serialize(), report.verdict.value


def _cache_key(structure, mode, m, approximate_depth):
    from geometry.models import FingerprintRecord
    return FingerprintRecord.objects.cache_key(structure.to_text(), mode.value, m, approximate_depth)


# ============================================
# CLASSIFICATION
# ============================================

def classify(structures, mode, m=None, ed_bound=None, approximate_depth=None, workers=None,
             use_cache=False, limits=None):
    """Partition structures by fingerprint; see the module docstring for the ED gate"""
    limits = get_limits(limits)
    mode = ClassificationMode(mode)
    if mode == ClassificationMode.SPEC:
        raise DefGeoError("classification runs in algebraic or l0 mode")
    structures = sorted(structures, key=lambda s: s.name)
    if not structures:
        raise DefGeoError("nothing to classify")
    names = [s.name for s in structures]
    if len(set(names)) != len(names):
        raise SymbolError("structure names must be unique within a classification batch")
    k = structures[0].k
    for structure in structures:
        if structure.k != k:
            raise UniverseMismatch(f"{structure.name} has universe size {structure.k}, expected {k}")

    if mode == ClassificationMode.ALGEBRAIC:
        ed_bound = limits.ed_bound if ed_bound is None else ed_bound
        if k > limits.algebraic_max_universe and approximate_depth is None:
            raise GuardExceeded('algebraic max universe', limits.algebraic_max_universe, k,
                                hint="pass an approximate depth for inequivalence-only results")
    else:
        ed_bound = None
        approximate_depth = None

    override = m is not None and m != comparison_arity(k)
    m = comparison_arity(k) if m is None else m
    workers = limits.workers if workers is None else workers

    results, pending, keys = {}, [], {}
    for structure in structures:
        if use_cache:
            from geometry.models import FingerprintRecord
            key = _cache_key(structure, mode, m, approximate_depth)
            record = FingerprintRecord.objects.lookup(key)
            if record is not None:
                results[structure.name] = (record.text, record.ed_verdict or None)
                continue
            keys[structure.name] = key
        pending.append(structure)

    args = [(s, mode, m, ed_bound, approximate_depth, limits) for s in pending]
    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            computed = list(pool.map(fingerprint_item, *zip(*args)))
    else:
        computed = [fingerprint_item(*a) for a in args]

    for name, text, verdict in computed:
        results[name] = (text, verdict)
        if use_cache:
            from geometry.models import FingerprintRecord
            FingerprintRecord.objects.remember(
                keys[name], structure_name=name, mode=mode.value, universe_size=k, arity=m,
                ed_verdict=verdict or '', text=text,
            )

    report = ClassificationReport(mode, k, m, override, ed_bound, approximate_depth)
    for name in names:
        text, verdict = results[name]
        reason = None
        if mode == ClassificationMode.ALGEBRAIC:
            if approximate_depth is not None:
                reason = UndeterminedReason.APPROXIMATE.value
            elif verdict != EDVerdict.PASSES_AT_BOUND.value:
                reason = UndeterminedReason.ED_FAILS.value
        report.items.append(ReportItem(name, text, verdict, reason))

    buckets = {}
    for item in report.items:
        if item.determined:
            buckets.setdefault(item.fingerprint, []).append(item.name)
    report.classes = sorted((sorted(group) for group in buckets.values()), key=lambda group: group[0])
    logger.info("classified mode=%s k=%s m=%s items=%s classes=%s undetermined=%s cached=%s",
                mode.value, k, m, len(report.items), report.class_count, len(report.undetermined),
                len(structures) - len(pending))
    return report


def load_structures(directory):
    """Parse every *.str file of a directory; items are named after the file stem"""
    directory = Path(directory)
    if not directory.is_dir():
        raise DefGeoError(f"{directory} is not a directory")
    structures = []
    for path in sorted(directory.glob('*.str')):
        structure = parse_structure(path.read_text(encoding='utf-8'))
        structures.append(structure.renamed(path.stem))
    if not structures:
        raise DefGeoError(f"no .str files in {directory}")
    return structures
