"""
Interpretation of terms and formulas over a finite structure.

solution_set enumerates every assignment of A^n exactly once, in index order.
Quantifiers iterate 0..k-1 and stop at the first witness (exists) or counterexample (forall).
"""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import islice

import numpy as np

from geometry.exceptions import ElementRangeError, SubstitutionError
from geometry.limits import get_limits
from geometry.relations import Relation, all_tuples, coordinate_grid
from geometry.syntax import And, App, Atom, Const, Equality, Exists, Forall, Not, Or, Var, free_vars

logger = logging.getLogger(__name__)

# below this many assignments a worker pool costs more than it saves
PARALLEL_THRESHOLD = 1 << 14


@dataclass(frozen=True, slots=True)
class Assignment:
    """values[i] is the value of x_{i+1}"""

    values: tuple

    @classmethod
    def of(cls, values, k):
        values = tuple(values)
        for v in values:
            if not 0 <= v < k:
                raise ElementRangeError(f"assignment value {v} is outside the universe 0..{k - 1}")
        return cls(values)

    @property
    def arity(self):
        return len(self.values)

    def env(self):
        return {i: v for i, v in enumerate(self.values, start=1)}


@dataclass
class EvaluationStats:
    """Instrumentation counter; assignments counts top-level assignments visited"""

    assignments: int = 0


def _env(a):
    if isinstance(a, Assignment):
        return a.env()
    if isinstance(a, dict):
        return dict(a)
    return {i: v for i, v in enumerate(a, start=1)}


# ============================================
# TERMS
# ============================================

def _term_value(t, env, structure):
    if isinstance(t, Var):
        return env[t.index]
    if isinstance(t, Const):
        return t.value
    op = structure.op(t.symbol)
    k = structure.k
    index = 0
    for arg in t.args:
        index = index * k + _term_value(arg, env, structure)
    return op.table[index]


def eval_term(t, a, structure):
    """Value of the term operation induced by t at the assignment a"""
    return _term_value(t, _env(a), structure)


def term_table(t, n, structure):
    """
    Table of the n-ary term operation of t as a numpy array of length k**n, in index order
    """
    k = structure.k
    coords = coordinate_grid(k, n)
    size = k ** n

    def walk(node):
        if isinstance(node, Var):
            if node.index > n:
                raise SubstitutionError(f"variable x{node.index} exceeds arity {n}")
            return coords[node.index - 1]
        if isinstance(node, Const):
            return np.full(size, node.value, dtype=np.int64)
        op = structure.op(node.symbol)
        table = op.as_array()
        if not node.args:
            return np.full(size, table[0], dtype=np.int64)
        index = np.zeros(size, dtype=np.int64)
        for arg in node.args:
            index = index * k + walk(arg)
        return table[index]

    return walk(t)


# ============================================
# FORMULAS
# ============================================

def _holds(phi, env, structure):
    if isinstance(phi, Equality):
        return _term_value(phi.left, env, structure) == _term_value(phi.right, env, structure)
    if isinstance(phi, Atom):
        args = tuple(_term_value(arg, env, structure) for arg in phi.args)
        return args in structure.rel(phi.symbol).tuples
    if isinstance(phi, And):
        return all(_holds(child, env, structure) for child in phi.children)
    if isinstance(phi, Or):
        return any(_holds(child, env, structure) for child in phi.children)
    if isinstance(phi, Not):
        return not _holds(phi.child, env, structure)
    if isinstance(phi, (Exists, Forall)):
        saved = env.get(phi.var)
        want = isinstance(phi, Exists)
        result = not want
        for value in range(structure.k):
            env[phi.var] = value
            if _holds(phi.child, env, structure) == want:
                result = want
                break
        if saved is None:
            env.pop(phi.var, None)
        else:
            env[phi.var] = saved
        return result
    raise TypeError(f"not a formula: {phi!r}")


def satisfies(phi, a, structure):
    """A |= phi(a)"""
    env = _env(a)
    missing = free_vars(phi) - set(env)
    if missing:
        raise SubstitutionError(f"assignment does not cover free variables {sorted(missing)}")
    return _holds(phi, env, structure)


def _solve_range(phi, n, structure, start, stop):
    # membership flags of the assignments with index in [start, stop)
    flags = np.zeros(stop - start, dtype=bool)
    for offset, t in enumerate(islice(all_tuples(structure.k, n), start, stop)):
        env = {i: v for i, v in enumerate(t, start=1)}
        flags[offset] = _holds(phi, env, structure)
    return flags


def solution_set(phi, n, structure, limits=None, stats=None, workers=None):
    """
    The n-ary relation {a in A^n : A |= phi(a)}.

    With more than one worker the index range is split into disjoint contiguous chunks
    whose flags are joined back in order; the result does not depend on the number of workers.
    """
    limits = get_limits(limits)
    if n < 1:
        raise SubstitutionError("solution sets are defined for arity n >= 1 only")
    missing = {i for i in free_vars(phi) if i > n}
    if missing:
        names = ', '.join(f"x{i}" for i in sorted(missing))
        raise SubstitutionError(f"free variables {names} exceed arity {n}")
    k = structure.k
    limits.check_arity(k, n)
    size = k ** n
    workers = limits.workers if workers is None else workers

    if workers > 1 and size >= PARALLEL_THRESHOLD:
        step = -(-size // workers)
        bounds = [(start, min(start + step, size)) for start in range(0, size, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_solve_range, phi, n, structure, lo, hi) for lo, hi in bounds]
            flags = np.concatenate([future.result() for future in futures])
        if stats is not None:
            stats.assignments += size
        logger.debug("solution set k=%s n=%s workers=%s chunks=%s", k, n, workers, len(bounds))
        return Relation.from_mask(k, n, flags)

    flags = np.zeros(size, dtype=bool)
    for index, t in enumerate(all_tuples(k, n)):
        env = {i: v for i, v in enumerate(t, start=1)}
        flags[index] = _holds(phi, env, structure)
        if stats is not None:
            stats.assignments += 1
    return Relation.from_mask(k, n, flags)
