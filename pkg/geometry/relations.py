"""
Finitary relations over a universe {0..k-1} stored as integer bitsets.

Bit i of a relation of arity n is set iff the tuple with index i belongs to it, where the
index of (a1,...,an) is sum(ai * k**(n-i)) (argument 1 most significant). Python ints
give word-parallel AND/OR/XOR; minors go through numpy index maps.
"""
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from geometry.exceptions import ArityError, ElementRangeError, UniverseMismatch


# ============================================
# TUPLE ENCODING
# ============================================

def tuple_index(t, k):
    """Positional index of tuple t over a universe of size k"""
    index = 0
    for a in t:
        if not 0 <= a < k:
            raise ElementRangeError(f"element {a} is outside the universe 0..{k - 1}")
        index = index * k + a
    return index


def index_tuple(index, k, n):
    """Inverse of tuple_index for arity n"""
    if not 0 <= index < k ** n:
        raise ElementRangeError(f"index {index} is outside 0..{k ** n - 1}")
    digits = [0] * n
    for i in range(n - 1, -1, -1):
        index, digits[i] = divmod(index, k)
    return tuple(digits)


def all_tuples(k, n):
    """Every n-tuple over the universe, in index order"""
    return product(range(k), repeat=n)


@lru_cache(maxsize=512)
def coordinate_grid(k, n):
    """Array of shape (n, k**n); column i holds the tuple with index i"""
    return np.indices((k,) * n, dtype=np.int64).reshape(n, -1)


@lru_cache(maxsize=1024)
def _minor_source(k, sigma, target):
    # target index -> source index under (a_sigma(1), ..., a_sigma(n))
    coords = coordinate_grid(k, target)
    source = np.zeros(k ** target, dtype=np.int64)
    for s in sigma:
        source = source * k + coords[s - 1]
    return source


def _unpack(bits, size):
    raw = np.frombuffer(bits.to_bytes((size + 7) // 8, 'little'), dtype=np.uint8)
    return np.unpackbits(raw, count=size, bitorder='little').astype(bool)


def _pack(mask):
    return int.from_bytes(np.packbits(np.asarray(mask, dtype=bool), bitorder='little').tobytes(), 'little')


# ============================================
# MINOR MAPS
# ============================================

@dataclass(frozen=True, slots=True)
class MinorMap:
    """A total map sigma: {1..source} -> {1..target}"""

    source: int
    target: int
    sigma: tuple

    def __post_init__(self):
        if len(self.sigma) != self.source:
            raise ArityError(f"minor map lists {len(self.sigma)} images for source arity {self.source}")
        if self.target < 1:
            raise ArityError("minor maps need a target arity of at least 1")
        for s in self.sigma:
            if not 1 <= s <= self.target:
                raise ArityError(f"minor map image {s} is outside 1..{self.target}")

    @classmethod
    def from_mapping(cls, mapping, target=None):
        """Build from a dict {i: sigma(i)} over 1..n or from a sequence of images"""
        if isinstance(mapping, dict):
            n = max(mapping, default=0)
            if sorted(mapping) != list(range(1, n + 1)):
                raise ArityError("minor map must be defined on exactly 1..n")
            images = tuple(mapping[i] for i in range(1, n + 1))
        else:
            images = tuple(mapping)
        if target is None:
            target = max(images, default=1)
        return cls(len(images), target, images)

    @classmethod
    def identity(cls, n):
        return cls(n, n, tuple(range(1, n + 1)))

    @classmethod
    def inclusion(cls, n, m):
        """x_i -> x_i from arity n into a larger arity m (cylindrification)"""
        return cls(n, m, tuple(range(1, n + 1)))

    @classmethod
    def all_maps(cls, source, target):
        """Every map {1..source} -> {1..target}, in lexicographic order of images"""
        for images in product(range(1, target + 1), repeat=source):
            yield cls(source, target, images)

    def compose(self, after):
        """The map i -> after(self(i)); minor(minor(B, self), after) == minor(B, self.compose(after))"""
        if after.source != self.target:
            raise ArityError(f"cannot compose a map into arity {self.target} with one from arity {after.source}")
        return MinorMap(self.source, after.target, tuple(after.sigma[s - 1] for s in self.sigma))

    def as_dict(self):
        return {i: s for i, s in enumerate(self.sigma, start=1)}

    def __str__(self):
        images = ','.join(f"{i}->{s}" for i, s in enumerate(self.sigma, start=1))
        return f"{{{images}}}/{self.target}"


# ============================================
# RELATIONS
# ============================================

@dataclass(frozen=True, slots=True)
class Relation:
    """An n-ary relation on {0..k-1}; bits is a Python int of k**n bits"""

    k: int
    arity: int
    bits: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ElementRangeError("universe size must be at least 1")
        if self.arity < 1:
            raise ArityError("relations of arity 0 are not supported")
        if self.bits < 0 or self.bits >> (self.k ** self.arity):
            raise ElementRangeError(f"bitset does not fit {self.k}**{self.arity} tuples")

    # constructors

    @classmethod
    def empty(cls, k, n):
        return cls(k, n, 0)

    @classmethod
    def full(cls, k, n):
        return cls(k, n, (1 << (k ** n)) - 1)

    @classmethod
    def from_tuples(cls, k, n, tuples):
        bits = 0
        for t in tuples:
            t = tuple(t)
            if len(t) != n:
                raise ArityError(f"tuple {t} does not have arity {n}")
            bits |= 1 << tuple_index(t, k)
        return cls(k, n, bits)

    @classmethod
    def from_mask(cls, k, n, mask):
        """Build from a boolean array of length k**n in index order"""
        mask = np.asarray(mask, dtype=bool).reshape(-1)
        if mask.size != k ** n:
            raise ArityError(f"mask has {mask.size} entries, expected {k ** n}")
        return cls(k, n, _pack(mask))

    # views

    @property
    def size(self):
        """Number of candidate tuples k**n"""
        return self.k ** self.arity

    @property
    def full_bits(self):
        return (1 << self.size) - 1

    def mask(self):
        return _unpack(self.bits, self.size)

    def indices(self):
        """Indices of member tuples, ascending"""
        bits = self.bits
        if bits == 0:
            return []
        if self.size <= 64:
            return [i for i in range(bits.bit_length()) if bits >> i & 1]
        return np.flatnonzero(self.mask()).tolist()

    def tuples(self):
        return [index_tuple(i, self.k, self.arity) for i in self.indices()]

    def contains_index(self, index):
        return bool(self.bits >> index & 1)

    def __contains__(self, t):
        t = tuple(t)
        if len(t) != self.arity:
            raise ArityError(f"tuple {t} does not have arity {self.arity}")
        return self.contains_index(tuple_index(t, self.k))

    def __len__(self):
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.tuples())

    def __bool__(self):
        return self.bits != 0

    def is_empty(self):
        return self.bits == 0

    def is_full(self):
        return self.bits == self.full_bits

    def _check_same(self, other):
        if self.k != other.k:
            raise UniverseMismatch(f"universe sizes differ: {self.k} and {other.k}")
        if self.arity != other.arity:
            raise ArityError(f"arities differ: {self.arity} and {other.arity}")

    def issubset(self, other):
        self._check_same(other)
        return self.bits & ~other.bits == 0

    # Boolean structure

    def intersect(self, other):
        self._check_same(other)
        return Relation(self.k, self.arity, self.bits & other.bits)

    def union(self, other):
        self._check_same(other)
        return Relation(self.k, self.arity, self.bits | other.bits)

    def complement(self):
        return Relation(self.k, self.arity, self.full_bits ^ self.bits)

    __and__ = intersect
    __or__ = union
    __invert__ = complement

    def minor(self, mm):
        """{a in A^m : (a_sigma(1), ..., a_sigma(n)) in self}"""
        if mm.source != self.arity:
            raise ArityError(f"minor map has source arity {mm.source}, relation has arity {self.arity}")
        if self.bits == 0:
            return Relation.empty(self.k, mm.target)
        if self.is_full():
            return Relation.full(self.k, mm.target)
        source = _minor_source(self.k, mm.sigma, mm.target)
        return Relation.from_mask(self.k, mm.target, self.mask()[source])

    # text

    def to_text(self):
        body = ','.join('(' + ','.join(map(str, t)) + ')' for t in self.tuples())
        return f"rel/{self.k}/{self.arity}:{{{body}}}"

    def __str__(self):
        return self.to_text()


# ============================================
# OPERATIONS
# ============================================

def intersect(s, t):
    return s.intersect(t)


def union(s, t):
    return s.union(t)


def complement(s):
    return s.complement()


def minor(relation, mm):
    return relation.minor(mm)


def intersect_all(relations, k, n):
    """Intersection of an iterable of n-ary relations; A^n when it is empty"""
    bits = (1 << (k ** n)) - 1
    for r in relations:
        bits &= r.bits
    return Relation(k, n, bits)


def union_all(relations, k, n):
    bits = 0
    for r in relations:
        bits |= r.bits
    return Relation(k, n, bits)


# ============================================
# CHARACTERISTIC FUNCTIONS
# ============================================

@dataclass(frozen=True, slots=True)
class CharFunction:
    """The indicator A^n -> {0,1} of a relation"""

    relation: Relation

    @property
    def arity(self):
        return self.relation.arity

    def __call__(self, *args):
        return 1 if tuple(args) in self.relation else 0

    def values(self):
        """Function table in index order"""
        return tuple(int(v) for v in self.relation.mask())

    def meet(self, other):
        return CharFunction(self.relation.intersect(other.relation))

    def join(self, other):
        return CharFunction(self.relation.union(other.relation))

    def to_relation(self):
        return self.relation


def char_fn(relation):
    return CharFunction(relation)


def char_minor(f, mm):
    """The function (a1..am) -> f(a_sigma(1), ..., a_sigma(n))"""
    if mm.source != f.arity:
        raise ArityError(f"minor map has source arity {mm.source}, function has arity {f.arity}")
    source = _minor_source(f.relation.k, mm.sigma, mm.target)
    values = np.asarray(f.values(), dtype=bool)[source]
    return CharFunction(Relation.from_mask(f.relation.k, mm.target, values))


# ============================================
# CLOSED-SET ENUMERATION
# ============================================

def next_closure(ground, close):
    """
    Yield every closed bitset of a closure operator, in lectic order (NextClosure).

    ground lists the bit positions that closed sets may contain; close maps a bitset to
    its closure and must be extensive, monotone and idempotent on subsets of ground.
    """
    order = sorted(ground, reverse=True)
    current = close(0)
    yield current
    while True:
        for i in order:
            bit = 1 << i
            if current & bit:
                continue
            below = bit - 1
            candidate = close((current & below) | bit)
            if (candidate & ~current) & below == 0:
                current = candidate
                break
        else:
            return
        yield current
