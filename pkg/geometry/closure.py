"""
Definable-set families, their fingerprints, Def-equivalence and canonical presentations.

A family of n-ary relations closed under intersection and union (and complement in
BOOLEAN mode) is stored through its point closures: V_t is the least member containing t.
A relation T is a member iff it is the union of the V_t with t in T, so the map t -> V_t,
the top element and whether the empty set is a member determine the family.
"""
import hashlib
import logging
from dataclasses import dataclass, field

import numpy as np
from django.db import models

from geometry.algebraic import AlgebraicFamily
from geometry.evaluator import solution_set
from geometry.exceptions import DefGeoError, GrammarError, GuardExceeded, ModeMismatch, UniverseMismatch
from geometry.limits import get_limits
from geometry.parsing import parse_relation, resolve_formula
from geometry.relations import MinorMap, Relation, next_closure
from geometry.structures import RelTable, Structure, Universe
from geometry.syntax import Atom, ClosureMode, FormulaClassSpec, Var, free_vars

logger = logging.getLogger(__name__)


# ============================================
# DEF FAMILIES
# ============================================

@dataclass(frozen=True, eq=False)
class DefFamily:
    """
    The n-ary slice of a definable-set family.

    basis maps a tuple index t to V_t; in LATTICE mode it is defined exactly on the tuples of
    top, in BOOLEAN mode on all of A^n, where the V_t are the blocks of a partition.
    """

    k: int
    n: int
    mode: ClosureMode
    basis: dict = field(compare=False, repr=False)
    top: Relation
    empty_flag: bool
    approximate: bool = False

    # constructors

    @classmethod
    def from_seeds(cls, seeds, k, n, mode, approximate=False):
        """
        Close seed relations under the connectives of mode.

        A BOOLEAN family always holds the empty set, since S & ~S is empty for any seed S.
        """
        seeds = list(seeds)
        if not seeds:
            raise DefGeoError("a definable family needs at least one seed relation")
        mode = ClosureMode(mode)
        size = k ** n
        if mode == ClosureMode.BOOLEAN:
            matrix = np.stack([s.mask() for s in seeds])
            _signatures, blocks = np.unique(matrix.T, axis=0, return_inverse=True)
            blocks = np.asarray(blocks).reshape(-1)
            relations = [Relation.from_mask(k, n, blocks == b) for b in range(int(blocks.max()) + 1)]
            basis = {t: relations[int(blocks[t])] for t in range(size)}
            return cls(k, n, mode, basis, Relation.full(k, n), True, approximate)

        full = (1 << size) - 1
        closures = {}
        top = 0
        meet = full
        for seed in seeds:
            top |= seed.bits
            meet &= seed.bits
            for t in seed.indices():
                closures[t] = closures.get(t, full) & seed.bits
        basis = {t: Relation(k, n, bits) for t, bits in closures.items()}
        return cls(k, n, mode, basis, Relation(k, n, top), meet == 0, approximate)

    @classmethod
    def from_algebraic(cls, family):
        """LATTICE family generated by all term equations: the algebraic point closures"""
        basis = family.point_closures()
        top = Relation.full(family.k, family.n)
        return cls(family.k, family.n, ClosureMode.LATTICE, basis, top, family.bottom.is_empty())

    @classmethod
    def quantifier_free(cls, structure, n, limits=None):
        """
        BOOLEAN family generated by all atomic formulas: a and t share a block iff each lies
        in the other's positive closure
        """
        family = AlgebraicFamily(structure, n, with_relations=True, limits=limits)
        closures = family.point_closures()
        basis = {}
        for t, v in closures.items():
            if t in basis:
                continue
            block = Relation(family.k, n, sum(1 << a for a in v.indices() if closures[a].contains_index(t)))
            for a in block.indices():
                basis[a] = block
        return cls(family.k, n, ClosureMode.BOOLEAN, basis, Relation.full(family.k, n), True)

    # queries

    def point_closure(self, t):
        """V_t, or None when t lies outside top"""
        return self.basis.get(t)

    def closures(self):
        """The distinct point closures in canonical order"""
        distinct = {v.bits: v for v in self.basis.values()}
        return [distinct[bits] for bits in sorted(distinct)]

    def member(self, relation):
        if relation.k != self.k:
            raise UniverseMismatch(f"relation over a universe of size {relation.k}, family over {self.k}")
        if relation.arity != self.n:
            raise DefGeoError(f"relation of arity {relation.arity} tested against a family of arity {self.n}")
        if relation.is_empty():
            return self.empty_flag
        if relation.bits & ~self.top.bits:
            return False
        bits = relation.bits
        return all(self.basis[t].bits & ~bits == 0 for t in relation.indices())

    def members(self, limits=None):
        """Every member, explicitly; guarded by the family cap"""
        limits = get_limits(limits)

        def close(bits):
            result = 0
            remaining = bits
            while remaining:
                low = remaining & -remaining
                result |= self.basis[low.bit_length() - 1].bits
                remaining ^= low
            return result

        produced = []
        for bits in next_closure(self.top.indices(), close):
            if bits == 0 and not self.empty_flag:
                continue
            produced.append(Relation(self.k, self.n, bits))
            limits.check_family(len(produced))
        return produced

    def serialize(self, override=False):
        header = (f"fingerprint mode={self.mode.value} k={self.k} m={self.n} "
                  f"empty={int(self.empty_flag)}")
        if self.approximate:
            header += ' approximate'
        if override:
            header += ' override'
        lines = [header, f"top={self.top.to_text()}"]
        lines.extend(v.to_text() for v in self.closures())
        return '\n'.join(lines) + '\n'


def member(family, relation):
    return family.member(relation)


# ============================================
# SEEDING
# ============================================

def generator_arity(phi):
    return max(free_vars(phi) | {1})


def seed_relations(structure, spec, n, limits=None):
    """
    Every n-ary minor of every generator's solution set, deduplicated, in first-seen order
    """
    limits = get_limits(limits)
    k = structure.k
    limits.check_arity(k, n)
    cap = limits.generator_cap(k)
    arities = []
    for phi in spec.generators:
        resolve_formula(phi, structure)
        r = generator_arity(phi)
        if r > cap:
            raise GuardExceeded('generator arity cap', cap, r, hint="raise DEFGEO_GENERATOR_ARITY_CAP")
        arities.append(r)
    maps = sum(n ** r for r in arities)
    if maps > limits.seed_cap:
        raise GuardExceeded('seed cap', limits.seed_cap, maps, hint=f"seeding at arity {n}")

    seeds = {}
    for phi, r in zip(spec.generators, arities):
        base = solution_set(phi, r, structure, limits=limits)
        for mm in MinorMap.all_maps(r, n):
            seed = base.minor(mm)
            seeds.setdefault(seed.bits, seed)
    logger.debug("seeded structure=%s n=%s generators=%s maps=%s seeds=%s",
                 structure.name, n, len(arities), maps, len(seeds))
    return list(seeds.values())


def seeding_cost(spec, n):
    return sum(n ** generator_arity(phi) for phi in spec.generators)


def def_family(structure, spec, n, limits=None):
    """The n-ary slice of the family generated by spec over structure"""
    if n < 1:
        raise DefGeoError("definable families are computed for arity n >= 1 only")
    seeds = seed_relations(structure, spec, n, limits=limits)
    family = DefFamily.from_seeds(seeds, structure.k, n, spec.mode, approximate=spec.approximate)
    logger.info("family built structure=%s mode=%s k=%s n=%s seeds=%s basis=%s",
                structure.name, spec.mode.value, structure.k, n, len(seeds), len(family.closures()))
    return family


# ============================================
# FINGERPRINTS
# ============================================

@dataclass(frozen=True)
class Fingerprint:
    """Canonical serialization of the family slice at the comparison arity"""

    family: DefFamily = field(repr=False)
    override: bool = False

    @property
    def mode(self):
        return self.family.mode

    @property
    def k(self):
        return self.family.k

    @property
    def m(self):
        return self.family.n

    @property
    def approximate(self):
        return self.family.approximate

    @property
    def text(self):
        return self.family.serialize(self.override)

    def digest(self):
        """First 64 bits of the SHA-256 of the text, in hex"""
        return hashlib.sha256(self.text.encode('utf-8')).hexdigest()[:16]

    def __eq__(self, other):
        if not isinstance(other, Fingerprint):
            return NotImplemented
        return self.text == other.text

    def __hash__(self):
        return hash(self.text)

    @classmethod
    def from_text(cls, text):
        """Rebuild a fingerprint (and its family) from its serialization"""
        lines = [line for line in text.splitlines() if line.strip()]
        if len(lines) < 2 or not lines[0].startswith('fingerprint ') or not lines[1].startswith('top='):
            raise GrammarError("not a fingerprint", 1, 1, 'fingerprint mode=<M> k=<k> m=<m> empty=<0|1>')
        fields, flags = {}, set()
        for word in lines[0].split()[1:]:
            key, sep, value = word.partition('=')
            if sep:
                fields[key] = value
            else:
                flags.add(key)
        try:
            mode, k, m, empty = ClosureMode(fields['mode']), int(fields['k']), int(fields['m']), fields['empty'] == '1'
        except (KeyError, ValueError) as exc:
            raise GrammarError(f"bad fingerprint header: {exc}", 1, 1) from None
        top = parse_relation(lines[1][len('top='):])
        closures = [parse_relation(line) for line in lines[2:]]
        basis = {}
        for t in top.indices():
            containing = [v for v in closures if v.contains_index(t)]
            bits = (1 << k ** m) - 1
            for v in containing:
                bits &= v.bits
            basis[t] = Relation(k, m, bits)
        family = DefFamily(k, m, mode, basis, top, empty, 'approximate' in flags)
        return cls(family, 'override' in flags)


def comparison_arity(k):
    return k * k


def fingerprint(structure, spec, m=None, limits=None):
    """Fingerprint of the family slice at arity m = k**2 (or an explicit override)"""
    k = structure.k
    override = m is not None and m != comparison_arity(k)
    m = comparison_arity(k) if m is None else m
    return Fingerprint(def_family(structure, spec, m, limits=limits), override)


# ============================================
# EQUIVALENCE
# ============================================

class Verdict(models.TextChoices):
    EQUIVALENT = 'equivalent', 'Equivalent'
    INEQUIVALENT = 'inequivalent', 'Inequivalent'
    UNDETERMINED = 'undetermined', 'Undetermined'


@dataclass(frozen=True)
class EquivalenceResult:
    verdict: Verdict
    witness: Relation | None = None
    side: int | None = None

    def to_text(self):
        if self.verdict == Verdict.INEQUIVALENT:
            return f"inequivalent\nwitness side={self.side} {self.witness.to_text()}\n"
        if self.verdict == Verdict.UNDETERMINED:
            return "undetermined (approximate fingerprints are equal)\n"
        return "equivalent\n"


def compare_families(first, second):
    """
    Decide equality of two family slices; an inequality comes with a relation that belongs
    to exactly one of them (side 1 or 2)
    """
    if first.k != second.k:
        raise UniverseMismatch(f"universe sizes differ: {first.k} and {second.k}")
    if first.mode != second.mode:
        raise ModeMismatch(f"closure modes differ: {first.mode.value} and {second.mode.value}")
    if first.n != second.n:
        raise DefGeoError(f"comparison arities differ: {first.n} and {second.n}")
    if first.serialize() == second.serialize():
        if first.approximate or second.approximate:
            return EquivalenceResult(Verdict.UNDETERMINED)
        return EquivalenceResult(Verdict.EQUIVALENT)
    for side, this, other in ((1, first, second), (2, second, first)):
        for v in this.closures():
            if not other.member(v):
                return EquivalenceResult(Verdict.INEQUIVALENT, v, side)
    empty = Relation.empty(first.k, first.n)
    return EquivalenceResult(Verdict.INEQUIVALENT, empty, 1 if first.empty_flag else 2)


def decide_equivalence(structure1, spec1, structure2, spec2, m=None, limits=None):
    if structure1.k != structure2.k:
        raise UniverseMismatch(f"universe sizes differ: {structure1.k} and {structure2.k}")
    if spec1.mode != spec2.mode:
        raise ModeMismatch(f"closure modes differ: {spec1.mode.value} and {spec2.mode.value}")
    first = fingerprint(structure1, spec1, m=m, limits=limits)
    second = fingerprint(structure2, spec2, m=m, limits=limits)
    return compare_families(first.family, second.family)


# ============================================
# CANONICAL PRESENTATIONS
# ============================================

@dataclass(frozen=True)
class CanonicalPresentation:
    structure: Structure
    spec: FormulaClassSpec
    fingerprint: Fingerprint
    verified_arities: tuple = ()
    skipped_arities: tuple = ()


def canonicalize(structure, spec, basis_only=False, check_bound=None, limits=None):
    """
    A relational structure with one m-ary relation s0, s1, ... per family member (or per
    distinct point closure plus the empty set with basis_only), and a formula class of its atoms.

    The presentation is checked to reproduce the fingerprint, and then to reproduce the
    whole family slice at every arity up to check_bound whose seeding fits the seed cap.
    """
    limits = get_limits(limits)
    check_bound = limits.canonical_check_bound if check_bound is None else check_bound
    original = fingerprint(structure, spec, limits=limits)
    family = original.family
    k, m = structure.k, family.n

    if basis_only:
        relations = family.closures()
        if family.empty_flag:
            relations = [Relation.empty(k, m)] + relations
    else:
        relations = sorted(family.members(limits=limits), key=lambda r: r.bits)

    rels = tuple(RelTable(f"s{i}", m, frozenset(r.tuples())) for i, r in enumerate(relations))
    presented = Structure(f"{structure.name}_canonical", Universe(k), (), rels)
    atoms = tuple(Atom(rel.name, tuple(Var(j) for j in range(1, m + 1))) for rel in rels)
    atom_spec = FormulaClassSpec(atoms, spec.mode, approximate=spec.approximate)

    reproduced = fingerprint(presented, atom_spec, limits=limits)
    if reproduced.text != original.text:
        raise DefGeoError("canonical presentation does not reproduce the fingerprint")

    verified, skipped = [], []
    for n in range(1, check_bound + 1):
        if n > limits.max_arity(k) or max(seeding_cost(spec, n), seeding_cost(atom_spec, n)) > limits.seed_cap:
            skipped.append(n)
            continue
        left = def_family(structure, spec, n, limits=limits)
        right = def_family(presented, atom_spec, n, limits=limits)
        if left.serialize() != right.serialize():
            raise DefGeoError(f"canonical presentation disagrees with the original family at arity {n}")
        verified.append(n)
    logger.info("canonicalized structure=%s relations=%s verified=%s skipped=%s",
                structure.name, len(rels), verified, skipped)
    return CanonicalPresentation(presented, atom_spec, original, tuple(verified), tuple(skipped))
