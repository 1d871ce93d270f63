"""
Brute-force verifiers.

These recompute what the engine computes by routes that share as little with it as
possible: formula substitution instead of relation minors, explicit closure of seed
intersections instead of point closures, and subalgebras of A x A instead of homomorphism
tables.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from operator import and_

import numpy as np

from geometry.algebraic import term_clone
from geometry.closure import DefFamily, def_family
from geometry.evaluator import solution_set
from geometry.exceptions import GuardExceeded
from geometry.limits import get_limits
from geometry.relations import MinorMap, Relation, all_tuples, tuple_index
from geometry.syntax import ClosureMode, free_vars, substitute

logger = logging.getLogger(__name__)


def _close_explicit(seeds, k, n, boolean, cap):
    full = (1 << (k ** n)) - 1
    family = set(seeds)
    if boolean:
        family |= {full ^ bits for bits in seeds}
    frontier = set(family)
    while frontier:
        fresh = set()
        for a in frontier:
            for b in family:
                for c in (a & b, a | b):
                    if c not in family:
                        fresh.add(c)
            if boolean and full ^ a not in family:
                fresh.add(full ^ a)
        family |= fresh
        frontier = fresh
        if len(family) > cap:
            raise GuardExceeded('oracle cap', cap, len(family))
    return family


def substituted_seeds(structure, spec, n, limits=None):
    """Bitsets of phi(x_sigma(1),...,x_sigma(r)) for every generator phi and every sigma into 1..n"""
    limits = get_limits(limits)
    seeds = set()
    for phi in spec.generators:
        r = max(free_vars(phi) | {1})
        for mm in MinorMap.all_maps(r, n):
            seeds.add(solution_set(substitute(phi, mm.as_dict()), n, structure, limits=limits).bits)
    return seeds


def _literals(structure, spec, n, limits):
    seeds = substituted_seeds(structure, spec, n, limits)
    if spec.mode == ClosureMode.BOOLEAN:
        full = (1 << (structure.k ** n)) - 1
        seeds |= {full ^ bits for bits in seeds}
    return seeds


def oracle_def(structure, spec, n, limits=None):
    """
    The n-ary slice as an explicit set of Relations: substituted generators, then pairwise
    intersection and union (and complement in BOOLEAN mode) until nothing new appears
    """
    limits = get_limits(limits)
    seeds = substituted_seeds(structure, spec, n, limits)
    family = _close_explicit(seeds, structure.k, n, spec.mode == ClosureMode.BOOLEAN, limits.oracle_cap)
    return {Relation(structure.k, n, bits) for bits in family}


def oracle_membership(structure, spec, n, limits=None):
    """
    Membership flags of all 2**(k**n) candidate relations, indexed by their bitsets.

    Closing the literals (seeds, and their complements in BOOLEAN mode) under intersection
    gives the meets; a nonempty candidate is a member iff it is the union of the meets it
    contains, and the empty one iff some meet is empty.
    """
    limits = get_limits(limits)
    count = 1 << (structure.k ** n)
    if count > limits.oracle_cap:
        raise GuardExceeded('oracle cap', limits.oracle_cap, count, hint=f"candidates at arity {n}")
    literals = _literals(structure, spec, n, limits)
    meets = set(literals)
    frontier = set(literals)
    while frontier:
        fresh = {a & b for a in frontier for b in literals} - meets
        meets |= fresh
        frontier = fresh
        if len(meets) > limits.oracle_cap:
            raise GuardExceeded('oracle cap', limits.oracle_cap, len(meets))
    candidates = np.arange(count, dtype=np.int64)
    covered = np.zeros(count, dtype=np.int64)
    for bits in meets:
        covered[(candidates & bits) == bits] |= bits
    flags = covered == candidates
    flags[0] = 0 in meets
    return flags


def oracle_basis(structure, spec, n, limits=None):
    """
    (closures, top, empty) of the n-ary slice as plain bitsets, straight from the literals:
    the least member holding t is the intersection of the literals holding t.

    Two slices of the same mode are equal iff these triples are.
    """
    limits = get_limits(limits)
    literals = _literals(structure, spec, n, limits)
    full = (1 << (structure.k ** n)) - 1
    top = reduce(lambda a, b: a | b, literals, 0)
    closures = set()
    for i in range(structure.k ** n):
        holding = [bits for bits in literals if bits >> i & 1]
        if holding:
            closures.add(reduce(and_, holding))
    return tuple(sorted(closures)), top, reduce(and_, literals, full) == 0


def oracle_algebraic_family(structure, n, limits=None):
    """Intersection closure of the equalizers of all pairs of n-ary term operations"""
    limits = get_limits(limits)
    k = structure.k
    clone = term_clone(structure.reduct(), n, limits=limits)
    equalizers = set()
    for f in clone.tables:
        for g in clone.tables:
            equalizers.add(sum(1 << i for i, (a, b) in enumerate(zip(f, g)) if a == b))
    family = set(equalizers)
    frontier = set(family)
    while frontier:
        fresh = {a & b for a in frontier for b in family} - family
        family |= fresh
        frontier = fresh
        if len(family) > limits.oracle_cap:
            raise GuardExceeded('oracle cap', limits.oracle_cap, len(family))
    return {Relation(k, n, bits) for bits in family}


# ============================================
# POINT CLOSURES THROUGH A x A
# ============================================

def _pair_closure(structure, pairs):
    closed = set(pairs)
    for op in structure.ops:
        if op.arity == 0:
            closed.add((op.table[0], op.table[0]))
    while True:
        fresh = set()
        current = list(closed)
        for op in structure.ops:
            if op.arity == 0:
                continue
            for args in product(current, repeat=op.arity):
                left = op.apply(tuple(a for a, _ in args), structure.k)
                right = op.apply(tuple(b for _, b in args), structure.k)
                if (left, right) not in closed:
                    fresh.add((left, right))
        if not fresh:
            return closed
        closed |= fresh


def _extends(structure, pairs, with_relations):
    closed = _pair_closure(structure, pairs)
    graph = {}
    for a, b in closed:
        if graph.setdefault(a, b) != b:
            return False
    if with_relations:
        for rel in structure.rels:
            for t in rel.tuples:
                if all(a in graph for a in t) and tuple(graph[a] for a in t) not in rel.tuples:
                    return False
    return True


def oracle_point_closures(structure, n, with_relations=False):
    """
    V_t = {b : the pairs (t_i, b_i) generate the graph of a homomorphism}, by brute force
    """
    if not with_relations:
        structure = structure.reduct()
    k = structure.k
    closures = {}
    for t in all_tuples(k, n):
        bits = 0
        for b in all_tuples(k, n):
            if _extends(structure, set(zip(t, b)), with_relations):
                bits |= 1 << tuple_index(b, k)
        closures[tuple_index(t, k)] = Relation(k, n, bits)
    return closures


def oracle_bottom(structure, n):
    """Diagonal tuples (c,...,c) with c generating a one-element subalgebra"""
    algebra = structure.reduct()
    k = algebra.k
    bits = 0
    for c in range(k):
        if {a for a, _ in _pair_closure(algebra, {(c, c)})} == {c}:
            bits |= 1 << tuple_index((c,) * n, k)
    return Relation(k, n, bits)


def oracle_family(structure, mode, m):
    """Family slice at arity m for classification, from brute-force point closures"""
    k = structure.k
    if mode == 'algebraic':
        closures = oracle_point_closures(structure, m)
        return DefFamily(k, m, ClosureMode.LATTICE, closures, Relation.full(k, m), oracle_bottom(structure, m).is_empty())
    closures = oracle_point_closures(structure, m, with_relations=True)
    basis = {}
    for t, v in closures.items():
        basis[t] = Relation(k, m, sum(1 << a for a in v.indices() if closures[a].contains_index(t)))
    return DefFamily(k, m, ClosureMode.BOOLEAN, basis, Relation.full(k, m), True)


def oracle_classify(structures, mode, m=None):
    """Partition of structure names by brute-force family slices, classes sorted by least name"""
    buckets = {}
    for structure in structures:
        arity = m if m is not None else structure.k ** 2
        text = oracle_family(structure, mode, arity).serialize()
        buckets.setdefault(text, []).append(structure.name)
    return sorted((sorted(names) for names in buckets.values()), key=lambda names: names[0])


# ============================================
# ENGINE VS ORACLE
# ============================================

@dataclass
class OracleReport:
    lines: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def agrees(self):
        return not self.mismatches

    def to_text(self):
        verdict = 'agree' if self.agrees else 'disagree'
        return '\n'.join(self.lines + [f"oracle {verdict}"]) + '\n'


def oracle_check(structure, spec, max_arity, limits=None):
    """
    Compare the engine's membership test with the oracles at arities 1..max_arity.

    When 2**(k**n) candidates fit the oracle cap every candidate relation is tested against
    the membership table, otherwise the explicit member sets are compared.
    """
    limits = get_limits(limits)
    k = structure.k
    report = OracleReport()
    for n in range(1, max_arity + 1):
        engine = def_family(structure, spec, n, limits=limits)
        size = k ** n
        if (1 << size) <= limits.oracle_cap:
            flags = oracle_membership(structure, spec, n, limits=limits)
            wrong = [bits for bits in range(1 << size) if engine.member(Relation(k, n, bits)) != flags[bits]]
            expected = int(flags.sum())
            checked = 1 << size
        else:
            expected_bits = {r.bits for r in oracle_def(structure, spec, n, limits=limits)}
            found = {r.bits for r in engine.members(limits=limits)}
            wrong = sorted(found ^ expected_bits)
            expected = len(expected_bits)
            checked = len(found | expected_bits)
        status = 'ok' if not wrong else 'MISMATCH'
        report.lines.append(f"n={n} members={expected} candidates={checked} {status}")
        if wrong:
            report.mismatches.append((n, Relation(k, n, wrong[0])))
            report.lines.append(f"  first difference {Relation(k, n, wrong[0]).to_text()}")
        logger.info("oracle arity checked structure=%s n=%s members=%s status=%s", structure.name, n, expected, status)
    return report
