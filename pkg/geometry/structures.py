"""
Finite first-order structures: a universe, operation tables and relation tables.
"""
from dataclasses import dataclass, field

import numpy as np

from geometry.exceptions import ArityError, ElementRangeError, SymbolError
from geometry.relations import Relation, tuple_index


@dataclass(frozen=True, slots=True)
class Universe:
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ElementRangeError("universe size must be at least 1")

    def elements(self):
        return range(self.size)


@dataclass(frozen=True, slots=True)
class OpTable:
    """
    An r-ary operation given by its flat table of length k**r.

    The entry for (a1,...,ar) sits at index sum(ai * k**(r-i)); arity 0 is a constant.
    """

    name: str
    arity: int
    table: tuple

    def validate(self, k):
        if self.arity < 0:
            raise ArityError(f"operation {self.name} has negative arity")
        if len(self.table) != k ** self.arity:
            raise ArityError(
                f"operation {self.name}/{self.arity}: table length {len(self.table)} != {k}^{self.arity} = {k ** self.arity}"
            )
        for value in self.table:
            if not 0 <= value < k:
                raise ElementRangeError(f"operation {self.name}: value {value} is outside the universe 0..{k - 1}")

    def apply(self, args, k):
        return self.table[tuple_index(args, k)]

    def as_array(self):
        return np.asarray(self.table, dtype=np.int64)


@dataclass(frozen=True, slots=True)
class RelTable:
    """An r-ary basic relation given by its tuples"""

    name: str
    arity: int
    tuples: frozenset

    def validate(self, k):
        if self.arity < 1:
            raise ArityError(f"relation {self.name} must have arity at least 1")
        for t in self.tuples:
            if len(t) != self.arity:
                raise ArityError(f"relation {self.name}/{self.arity}: tuple {t} has length {len(t)}")
            for value in t:
                if not 0 <= value < k:
                    raise ElementRangeError(f"relation {self.name}: value {value} is outside the universe 0..{k - 1}")

    def to_relation(self, k):
        return Relation.from_tuples(k, self.arity, self.tuples)


@dataclass(frozen=True)
class Structure:
    """
    A finite structure (A, ops, rels). Symbol names are unique across ops and rels.
    """

    name: str
    universe: Universe
    ops: tuple = ()
    rels: tuple = ()
    _symbols: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, 'ops', tuple(self.ops))
        object.__setattr__(self, 'rels', tuple(self.rels))
        symbols = {}
        for entry in self.ops + self.rels:
            if entry.name in symbols:
                raise SymbolError(f"duplicate symbol {entry.name!r} in structure {self.name}")
            entry.validate(self.k)
            symbols[entry.name] = entry
        object.__setattr__(self, '_symbols', symbols)

    @classmethod
    def build(cls, name, k, ops=None, rels=None):
        """
        Convenience constructor from {name: table} and {name: (arity, tuples)} dicts.

        An op value may also be (arity, table), which is needed when k = 1.
        """
        op_tables = []
        for op_name, table in (ops or {}).items():
            if len(table) == 2 and isinstance(table[1], (list, tuple)):
                arity, table = table[0], tuple(int(v) for v in table[1])
            else:
                table = tuple(int(v) for v in table)
                arity = _arity_from_length(len(table), k, op_name)
            op_tables.append(OpTable(op_name, arity, table))
        rel_tables = []
        for rel_name, spec in (rels or {}).items():
            arity, tuples = spec
            rel_tables.append(RelTable(rel_name, arity, frozenset(tuple(t) for t in tuples)))
        return cls(name, Universe(k), tuple(op_tables), tuple(rel_tables))

    @property
    def k(self):
        return self.universe.size

    def symbol(self, name):
        try:
            return self._symbols[name]
        except KeyError:
            raise SymbolError(f"unknown symbol {name!r} in structure {self.name}") from None

    def op(self, name):
        entry = self.symbol(name)
        if not isinstance(entry, OpTable):
            raise SymbolError(f"{name!r} is a relation symbol, not an operation")
        return entry

    def rel(self, name):
        entry = self.symbol(name)
        if not isinstance(entry, RelTable):
            raise SymbolError(f"{name!r} is an operation symbol, not a relation")
        return entry

    def has_symbol(self, name):
        return name in self._symbols

    def is_algebra(self):
        return not self.rels

    def reduct(self):
        """The algebra obtained by dropping every relation"""
        return Structure(self.name, self.universe, self.ops, ())

    def renamed(self, name):
        return Structure(name, self.universe, self.ops, self.rels)

    def to_text(self):
        from geometry.syntax import print_structure
        return print_structure(self)


def _arity_from_length(length, k, name):
    arity, size = 0, 1
    while size < length:
        size *= k
        arity += 1
        if k == 1:
            break
    if size != length:
        raise ArityError(f"operation {name}: table length {length} is not a power of {k}")
    return arity
