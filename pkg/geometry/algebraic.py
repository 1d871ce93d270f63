"""
Term clones, algebraic sets and the equational-domain check.

Everything here rests on generate_subalgebra: a round-based fixpoint that builds the
subuniverse of a power A^d generated by some tuples, remembering one witnessing term per
element. Rows may be keyed on a prefix of their coordinates; two terms that agree on the key
but not on the remaining coordinates are reported to a collision callback. That is how
closures and separating equations are found without materialising the term clone.
"""
import logging
from dataclasses import dataclass, field
from functools import partial
from itertools import product
from math import prod

import numpy as np
from django.db import models

from geometry.exceptions import DefGeoError, GuardExceeded
from geometry.limits import get_limits
from geometry.relations import Relation, all_tuples, coordinate_grid, index_tuple, next_closure, tuple_index
from geometry.evaluator import term_table
from geometry.syntax import App, Atom, ClosureMode, Equality, FormulaClassSpec, Var, conj, eq, var

logger = logging.getLogger(__name__)

CHUNK = 1 << 15


# ============================================
# SUBALGEBRA GENERATION
# ============================================

@dataclass
class Subalgebra:
    """Generated subuniverse of A^width with one witnessing term per element"""

    rows: np.ndarray
    terms: list
    key_width: int
    complete: bool = True
    rounds: int = 0

    def __len__(self):
        return len(self.terms)


def _compose_term(symbol, terms, picks):
    return App(symbol, tuple(terms[i] for i in picks))


def generate_subalgebra(structure, generators, generator_terms, key_width=None, on_collision=None,
                        element_cap=None, cap_name='clone cap', limits=None):
    """
    Close the rows `generators` under the basic operations of `structure`, coordinatewise.

    Elements are identified by their first key_width coordinates (all of them by default).
    When a newly composed row matches an existing key but differs elsewhere,
    on_collision(existing_term, existing_row, row, make_term) is called; a true return
    value stops the generation and the result is marked incomplete.
    """
    limits = get_limits(limits)
    k = structure.k
    gens = np.asarray(generators, dtype=np.int64)
    if gens.ndim != 2:
        raise DefGeoError("generators must be a two-dimensional array of rows")
    width = gens.shape[1]
    key_width = width if key_width is None else key_width
    cap = element_cap if element_cap is not None else limits.clone_cap

    rows, terms, index = [], [], {}

    def admit(row, make_term):
        key = row[:key_width].tobytes()
        position = index.get(key)
        if position is None:
            if len(rows) >= cap:
                raise GuardExceeded(cap_name, cap, len(rows) + 1, hint="subalgebra elements")
            index[key] = len(rows)
            rows.append(row.copy())
            terms.append(make_term())
            return False
        if on_collision is not None and key_width < width and not np.array_equal(rows[position][key_width:], row[key_width:]):
            return bool(on_collision(terms[position], rows[position], row, make_term))
        return False

    def finish(complete, rounds):
        matrix = np.stack(rows) if rows else np.zeros((0, width), dtype=np.int64)
        return Subalgebra(matrix, terms, key_width, complete, rounds)

    for row, term in zip(gens, generator_terms):
        if admit(row.copy(), lambda term=term: term):
            return finish(False, 0)
    for op in structure.ops:
        if op.arity == 0:
            if admit(np.full(width, op.table[0], dtype=np.int64), partial(App, op.name, ())):
                return finish(False, 0)

    ops = [op for op in structure.ops if op.arity > 0]
    done, rounds, composed = 0, 0, 0
    while done < len(rows):
        current = len(rows)
        matrix = np.stack(rows[:current])
        for op in ops:
            table = op.as_array()
            r = op.arity
            # combos with their first "new" argument at position p
            for p in range(r):
                sizes = [done] * p + [current - done] + [current] * (r - p - 1)
                offsets = [0] * p + [done] + [0] * (r - p - 1)
                total = prod(sizes)
                if total == 0:
                    continue
                composed += total
                if composed > limits.composition_cap:
                    raise GuardExceeded('composition cap', limits.composition_cap, composed)
                for start in range(0, total, CHUNK):
                    flat = np.arange(start, min(start + CHUNK, total))
                    picks = [axis + offset for axis, offset in zip(np.unravel_index(flat, sizes), offsets)]
                    idx = np.zeros((flat.size, width), dtype=np.int64)
                    for pick in picks:
                        idx = idx * k + matrix[pick]
                    results = table[idx]
                    unique, first = np.unique(results, axis=0, return_index=True)
                    for row, j in zip(unique, first):
                        make_term = partial(_compose_term, op.name, terms, [int(pick[j]) for pick in picks])
                        if admit(row, make_term):
                            return finish(False, rounds + 1)
        done = current
        rounds += 1
    logger.debug("subalgebra generated width=%s elements=%s rounds=%s compositions=%s",
                 width, len(rows), rounds, composed)
    return finish(True, rounds)


# ============================================
# TERM CLONES
# ============================================

@dataclass
class TermClone:
    """The n-ary term operations of an algebra, each with one witnessing term"""

    k: int
    n: int
    tables: tuple
    witnesses: dict = field(repr=False)

    def __len__(self):
        return len(self.tables)

    def __contains__(self, table):
        return tuple(table) in self.witnesses

    def projections(self):
        grid = coordinate_grid(self.k, self.n)
        return [tuple(int(v) for v in grid[i]) for i in range(self.n)]

    def witness(self, table):
        return self.witnesses[tuple(table)]


def projection_rows(k, n):
    return coordinate_grid(k, n), [Var(i) for i in range(1, n + 1)]


def term_clone(structure, n, limits=None):
    """Least set of n-ary tables containing the projections and closed under the basic operations"""
    limits = get_limits(limits)
    k = structure.k
    limits.check_arity(k, n)
    grid, variables = projection_rows(k, n)
    sub = generate_subalgebra(structure, grid, variables, element_cap=limits.clone_cap, limits=limits)
    tables = tuple(tuple(int(v) for v in row) for row in sub.rows)
    logger.info("term clone k=%s n=%s size=%s rounds=%s", k, n, len(tables), sub.rounds)
    return TermClone(k, n, tables, dict(zip(tables, sub.terms)))


def bounded_terms(structure, n, depth, limits=None):
    """
    Tables of all n-ary terms of depth at most `depth`, with a witness each.

    Plain set-based enumeration, kept independent of generate_subalgebra so the two can
    check each other.
    """
    limits = get_limits(limits)
    k = structure.k
    limits.check_arity(k, n)
    tuples = list(all_tuples(k, n))
    found = {}
    for i in range(1, n + 1):
        found.setdefault(tuple(t[i - 1] for t in tuples), Var(i))
    for op in structure.ops:
        if op.arity == 0:
            found.setdefault((op.table[0],) * len(tuples), App(op.name, ()))
    frontier = set(found)
    composed = 0
    for _level in range(depth):
        known = list(found)
        fresh = {}
        for op in structure.ops:
            if op.arity == 0:
                continue
            for args in product(known, repeat=op.arity):
                if not any(a in frontier for a in args):
                    continue
                composed += 1
                if composed > limits.composition_cap:
                    raise GuardExceeded('composition cap', limits.composition_cap, composed)
                table = tuple(
                    op.table[sum(a[pos] * k ** (op.arity - 1 - j) for j, a in enumerate(args))]
                    for pos in range(len(tuples))
                )
                if table not in found and table not in fresh:
                    fresh[table] = App(op.name, tuple(found[a] for a in args))
        if not fresh:
            break
        found.update(fresh)
        frontier = set(fresh)
        if len(found) > limits.clone_cap:
            raise GuardExceeded('clone cap', limits.clone_cap, len(found))
    return found


def equation_solution(s, t, n, structure, limits=None):
    """{a in A^n : s(a) = t(a)}, computed on whole term tables at once"""
    get_limits(limits).check_arity(structure.k, n)
    mask = term_table(s, n, structure) == term_table(t, n, structure)
    return Relation.from_mask(structure.k, n, mask)


# ============================================
# ALGEBRAIC SETS
# ============================================

class AlgebraicFamily:
    """
    The algebraic subsets of A^n as a closure system.

    closure(S) is the least algebraic set containing S. With with_relations the atoms
    R(t1,...,tr) of the structure's relation symbols count as well, which gives the
    positive quantifier-free closure used for L0 blocks.
    """

    def __init__(self, structure, n, with_relations=False, limits=None):
        self.limits = get_limits(limits)
        self.structure = structure if with_relations else structure.reduct()
        self.with_relations = with_relations and bool(structure.rels)
        self.k = structure.k
        self.n = n
        self.limits.check_arity(self.k, n)
        self._homs = {}
        self._points = {}
        self._bottom = None

    # generation helpers

    def _columns(self, relation):
        members = relation.tuples() if relation is not None else []
        if not members:
            return np.zeros((self.n, 0), dtype=np.int64)
        return np.asarray(members, dtype=np.int64).T

    def _generate(self, key_columns, extra_columns, on_collision):
        generators = np.hstack([key_columns, extra_columns])
        return generate_subalgebra(
            self.structure, generators, [Var(i) for i in range(1, self.n + 1)],
            key_width=key_columns.shape[1], on_collision=on_collision,
            element_cap=self.limits.family_cap, cap_name='family cap', limits=self.limits,
        )

    def _relation_checks(self, sub, key_width, extra_width):
        """
        Yield (rel, picks, holds_at_extra) for every combo of elements whose key rows satisfy rel
        """
        count = len(sub)
        for rel in self.structure.rels:
            rel_mask = rel.to_relation(self.k).mask()
            r = rel.arity
            total = count ** r
            if total > self.limits.composition_cap:
                raise GuardExceeded('composition cap', self.limits.composition_cap, total, hint=f"relation {rel.name}")
            for start in range(0, total, CHUNK):
                flat = np.arange(start, min(start + CHUNK, total))
                picks = np.unravel_index(flat, (count,) * r)
                idx = np.zeros((flat.size, sub.rows.shape[1]), dtype=np.int64)
                for pick in picks:
                    idx = idx * self.k + sub.rows[pick]
                holds = rel_mask[idx]
                on_key = holds[:, :key_width].all(axis=1)
                if on_key.any():
                    yield rel, [pick[on_key] for pick in picks], holds[on_key, key_width:key_width + extra_width]

    # closure operator

    def closure(self, relation):
        """Least algebraic set containing relation"""
        self._check(relation)
        grid = coordinate_grid(self.k, self.n)
        keys = self._columns(relation)
        key_width = keys.shape[1]
        mask = np.ones(self.k ** self.n, dtype=bool)

        def narrow(existing_term, existing_row, row, make_term):
            np.logical_and(mask, existing_row[key_width:] == row[key_width:], out=mask)
            return False

        sub = self._generate(keys, grid, narrow)
        if self.with_relations:
            for _rel, _picks, holds in self._relation_checks(sub, key_width, grid.shape[1]):
                np.logical_and(mask, holds.all(axis=0), out=mask)
        result = Relation.from_mask(self.k, self.n, mask)
        logger.debug("closure k=%s n=%s in=%s out=%s elements=%s", self.k, self.n, len(relation), len(result), len(sub))
        return result

    def contains(self, relation):
        return self.closure(relation) == relation

    def separate(self, relation, point):
        """
        An atom true on every tuple of relation and false at point, or None when point is in
        the closure of relation
        """
        self._check(relation)
        point = tuple(point)
        keys = self._columns(relation)
        key_width = keys.shape[1]
        extra = np.asarray(point, dtype=np.int64).reshape(self.n, 1)
        witness = []

        def stop(existing_term, existing_row, row, make_term):
            witness.append(eq(existing_term, make_term()))
            return True

        sub = self._generate(keys, extra, stop)
        if witness:
            return witness[0]
        if self.with_relations:
            for rel, picks, holds in self._relation_checks(sub, key_width, 1):
                failing = np.flatnonzero(~holds[:, 0])
                if failing.size:
                    j = failing[0]
                    return Atom(rel.name, tuple(sub.terms[int(pick[j])] for pick in picks))
        return None

    @property
    def bottom(self):
        """Least algebraic set (closure of the empty set)"""
        if self._bottom is None:
            self._bottom = self.closure(Relation.empty(self.k, self.n))
        return self._bottom

    def _hom_images(self, values):
        """
        Every map values -> A that extends to a homomorphism of the subalgebra they generate,
        preserving relations when they count
        """
        cached = self._homs.get(values)
        if cached is not None:
            return cached
        keys = np.asarray(values, dtype=np.int64).reshape(len(values), 1)
        candidates = np.asarray(list(product(range(self.k), repeat=len(values))), dtype=np.int64).T
        valid = np.ones(candidates.shape[1], dtype=bool)

        def narrow(existing_term, existing_row, row, make_term):
            np.logical_and(valid, existing_row[1:] == row[1:], out=valid)
            return False

        sub = generate_subalgebra(
            self.structure, np.hstack([keys, candidates]), [Var(i) for i in range(1, len(values) + 1)],
            key_width=1, on_collision=narrow, element_cap=self.limits.family_cap, cap_name='family cap', limits=self.limits,
        )
        if self.with_relations:
            for _rel, _picks, holds in self._relation_checks(sub, 1, candidates.shape[1]):
                np.logical_and(valid, holds.all(axis=0), out=valid)
        homs = [dict(zip(values, (int(v) for v in candidates[:, j]))) for j in np.flatnonzero(valid)]
        self._homs[values] = homs
        return homs

    def point_closure(self, t):
        """Least algebraic set containing the tuple t (t may also be given by its index)"""
        index = t if isinstance(t, int) else tuple_index(t, self.k)
        cached = self._points.get(index)
        if cached is not None:
            return cached
        t = index_tuple(index, self.k, self.n)
        values = tuple(sorted(set(t)))
        bits = 0
        for h in self._hom_images(values):
            bits |= 1 << tuple_index(tuple(h[a] for a in t), self.k)
        result = Relation(self.k, self.n, bits)
        self._points[index] = result
        return result

    def point_closures(self):
        """Map tuple index -> point closure, for every tuple of A^n"""
        return {i: self.point_closure(i) for i in range(self.k ** self.n)}

    def members(self):
        """
        Every algebraic set, enumerated in lectic order by NextClosure
        """
        produced = []
        closed = next_closure(range(self.k ** self.n), lambda bits: self.closure(Relation(self.k, self.n, bits)).bits)
        for bits in closed:
            produced.append(Relation(self.k, self.n, bits))
            self.limits.check_family(len(produced))
        return produced

    def defining_system(self, relation):
        """
        A conjunction of atoms whose n-ary solution set is relation; relation must be algebraic
        """
        self._check(relation)
        atoms = []
        for z in all_tuples(self.k, self.n):
            if z in relation:
                continue
            atom = self.separate(relation, z)
            if atom is None:
                raise DefGeoError(f"{relation.to_text()} is not algebraic: {z} lies in its closure")
            if atom not in atoms:
                atoms.append(atom)
        if not atoms:
            return eq(var(1), var(1))
        return conj(*atoms)

    def _check(self, relation):
        if relation.k != self.k or relation.arity != self.n:
            raise DefGeoError(f"expected a relation over {self.k}^{self.n}, got {relation.k}^{relation.arity}")


def algebraic_family(structure, n, limits=None):
    return AlgebraicFamily(structure, n, limits=limits)


# ============================================
# EQUATIONAL DOMAIN CHECK
# ============================================

class EDVerdict(models.TextChoices):
    PASSES_AT_BOUND = 'passes_at_bound', 'Passes at bound'
    FAILS = 'fails', 'Fails'


@dataclass(frozen=True)
class EDReport:
    verdict: EDVerdict
    bound: int
    arity: int | None = None
    counterexample: tuple | None = None

    @property
    def passes(self):
        return self.verdict == EDVerdict.PASSES_AT_BOUND

    def to_text(self):
        lines = [f"edcheck verdict={self.verdict.value} bound={self.bound}"]
        if self.counterexample is not None:
            s, t = self.counterexample
            lines.append(f"arity={self.arity}")
            lines.append(f"S={s.to_text()}")
            lines.append(f"T={t.to_text()}")
            lines.append(f"union={(s | t).to_text()}")
        return '\n'.join(lines) + '\n'


def _minimise(family, support, z):
    # greedy: drop tuples while z stays in the closure
    kept = list(support)
    for x in list(kept):
        trial = [y for y in kept if y != x]
        if not trial:
            continue
        rel = Relation.from_tuples(family.k, family.n, trial)
        if family.separate(rel, z) is None:
            kept = trial
    return kept


def ed_check(structure, max_arity=None, limits=None):
    """
    Check that unions of two algebraic sets are algebraic at every arity up to max_arity.

    At each arity every union of point closures is an intersection of the sets
    N_z = {x : z not in V_x}; so the property holds iff no z outside the least algebraic set
    lies in the closure of N_z.
    """
    limits = get_limits(limits)
    bound = limits.ed_bound if max_arity is None else max_arity
    algebra = structure.reduct()
    for n in range(1, bound + 1):
        family = AlgebraicFamily(algebra, n, limits=limits)
        closures = family.point_closures()
        bottom = family.bottom
        for z_index in range(algebra.k ** n):
            if bottom.contains_index(z_index):
                continue
            outside = [x for x, v in closures.items() if not v.contains_index(z_index)]
            n_z = Relation(algebra.k, n, sum(1 << x for x in outside))
            z = index_tuple(z_index, algebra.k, n)
            if family.separate(n_z, z) is not None:
                continue
            support = _minimise(family, n_z.tuples(), z)
            s = family.point_closure(support[0])
            t = family.closure(Relation.from_tuples(algebra.k, n, support[1:]))
            logger.info("ed check failed structure=%s arity=%s point=%s", structure.name, n, z)
            return EDReport(EDVerdict.FAILS, bound, n, (s, t))
        logger.debug("ed check arity passed structure=%s arity=%s", structure.name, n)
    return EDReport(EDVerdict.PASSES_AT_BOUND, bound)


# ============================================
# ATOMIC SPECS
# ============================================

def atomic_spec(structure, term_arity, depth=None, limits=None):
    """
    LATTICE spec of equations between distinct term operations of arity term_arity.

    With depth the terms come from a depth-bounded search and the returned class is approximate.
    """
    limits = get_limits(limits)
    algebra = structure.reduct()
    if depth is None:
        clone = term_clone(algebra, term_arity, limits=limits)
        witnesses = [clone.witnesses[t] for t in clone.tables]
    else:
        witnesses = list(bounded_terms(algebra, term_arity, depth, limits=limits).values())
    pairs = len(witnesses) * (len(witnesses) - 1) // 2
    limits.check_family(pairs + 1, 'seed_cap')
    generators = [eq(var(1), var(1))]
    for i, s in enumerate(witnesses):
        for t in witnesses[i + 1:]:
            generators.append(Equality(s, t))
    return FormulaClassSpec(tuple(generators), ClosureMode.LATTICE, approximate=depth is not None)
