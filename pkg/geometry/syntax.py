"""
Terms, formulas and formula classes, with free variables, substitution and printing.

Variables are x1, x2, ... and are represented by their positive index.
"""
from dataclasses import dataclass

from django.db import models

from geometry.exceptions import DefGeoError, SubstitutionError


# ============================================
# TERMS
# ============================================

@dataclass(frozen=True, slots=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise SubstitutionError(f"variable index {self.index} must be positive")


@dataclass(frozen=True, slots=True)
class Const:
    """An element literal 0..k-1 used as a constant"""

    value: int


@dataclass(frozen=True, slots=True)
class App:
    symbol: str
    args: tuple = ()


# ============================================
# FORMULAS
# ============================================

@dataclass(frozen=True, slots=True)
class Equality:
    left: object
    right: object


@dataclass(frozen=True, slots=True)
class Atom:
    symbol: str
    args: tuple


@dataclass(frozen=True, slots=True)
class And:
    children: tuple


@dataclass(frozen=True, slots=True)
class Or:
    children: tuple


@dataclass(frozen=True, slots=True)
class Not:
    child: object


@dataclass(frozen=True, slots=True)
class Exists:
    var: int
    child: object


@dataclass(frozen=True, slots=True)
class Forall:
    var: int
    child: object


QUANTIFIERS = (Exists, Forall)


class ClosureMode(models.TextChoices):
    LATTICE = 'LATTICE', 'Lattice (and, or, minors)'
    BOOLEAN = 'BOOLEAN', 'Boolean (and, or, not, minors)'


@dataclass(frozen=True)
class FormulaClassSpec:
    """
    Generators of a formula class together with the connectives it is closed under.

    approximate marks classes whose generators come from a depth-bounded term search;
    equal fingerprints of such classes prove nothing.
    """

    generators: tuple
    mode: ClosureMode = ClosureMode.LATTICE
    approximate: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'generators', tuple(self.generators))
        object.__setattr__(self, 'mode', ClosureMode(self.mode))
        if not self.generators:
            raise DefGeoError("a formula class needs at least one generator formula")

    def to_text(self):
        lines = [f"mode: {self.mode.value}"]
        lines.extend(print_formula(phi) for phi in self.generators)
        return '\n'.join(lines) + '\n'


# ============================================
# VARIABLES
# ============================================

def term_vars(t):
    if isinstance(t, Var):
        return {t.index}
    if isinstance(t, App):
        found = set()
        for arg in t.args:
            found |= term_vars(arg)
        return found
    return set()


def free_vars(phi):
    """Indices of the variables occurring free in phi"""
    if isinstance(phi, Equality):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Atom):
        found = set()
        for arg in phi.args:
            found |= term_vars(arg)
        return found
    if isinstance(phi, (And, Or)):
        found = set()
        for child in phi.children:
            found |= free_vars(child)
        return found
    if isinstance(phi, Not):
        return free_vars(phi.child)
    if isinstance(phi, QUANTIFIERS):
        return free_vars(phi.child) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def all_vars(phi):
    """Every variable index occurring in phi, free or bound"""
    if isinstance(phi, (Equality, Atom)):
        return free_vars(phi)
    if isinstance(phi, (And, Or)):
        found = set()
        for child in phi.children:
            found |= all_vars(child)
        return found
    if isinstance(phi, Not):
        return all_vars(phi.child)
    if isinstance(phi, QUANTIFIERS):
        return all_vars(phi.child) | {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def max_free_var(phi):
    return max(free_vars(phi), default=0)


# ============================================
# SUBSTITUTION
# ============================================

def substitute_term(t, mapping):
    if isinstance(t, Var):
        return Var(mapping[t.index])
    if isinstance(t, App):
        return App(t.symbol, tuple(substitute_term(arg, mapping) for arg in t.args))
    return t


def substitute(phi, sigma):
    """
    Simultaneous substitution x_i -> x_sigma(i).

    sigma is a dict {i: j}, a sequence of images for 1..n, or a MinorMap. Bound variables
    that collide with the range of sigma are renamed to the smallest index occurring
    neither in phi, nor in the range, nor among names already issued.
    """
    if hasattr(sigma, 'sigma'):
        sigma = sigma.as_dict()
    elif not isinstance(sigma, dict):
        sigma = {i: s for i, s in enumerate(sigma, start=1)}
    missing = free_vars(phi) - set(sigma)
    if missing:
        names = ', '.join(f"x{i}" for i in sorted(missing))
        raise SubstitutionError(f"free variables {names} are outside the domain of the substitution")

    image = set(sigma.values())
    used = all_vars(phi) | image
    issued = []

    def fresh():
        candidate = 1
        while candidate in used:
            candidate += 1
        used.add(candidate)
        issued.append(candidate)
        return candidate

    def walk(node, mapping):
        if isinstance(node, Equality):
            return Equality(substitute_term(node.left, mapping), substitute_term(node.right, mapping))
        if isinstance(node, Atom):
            return Atom(node.symbol, tuple(substitute_term(arg, mapping) for arg in node.args))
        if isinstance(node, And):
            return And(tuple(walk(child, mapping) for child in node.children))
        if isinstance(node, Or):
            return Or(tuple(walk(child, mapping) for child in node.children))
        if isinstance(node, Not):
            return Not(walk(node.child, mapping))
        if isinstance(node, QUANTIFIERS):
            bound = fresh() if node.var in image else node.var
            inner = dict(mapping)
            inner[node.var] = bound
            return type(node)(bound, walk(node.child, inner))
        raise TypeError(f"not a formula: {node!r}")

    return walk(phi, dict(sigma))


def alpha_equal(phi, psi):
    """Structural equality up to renaming of bound variables"""

    def terms(s, t, left, right):
        if isinstance(s, Var) and isinstance(t, Var):
            a, b = left.get(s.index), right.get(t.index)
            if a is None and b is None:
                return s.index == t.index
            return a == b
        if isinstance(s, App) and isinstance(t, App):
            return (s.symbol == t.symbol and len(s.args) == len(t.args)
                    and all(terms(x, y, left, right) for x, y in zip(s.args, t.args)))
        if isinstance(s, Const) and isinstance(t, Const):
            return s.value == t.value
        return False

    def walk(a, b, left, right, depth):
        if type(a) is not type(b):
            return False
        if isinstance(a, Equality):
            return terms(a.left, b.left, left, right) and terms(a.right, b.right, left, right)
        if isinstance(a, Atom):
            return (a.symbol == b.symbol and len(a.args) == len(b.args)
                    and all(terms(x, y, left, right) for x, y in zip(a.args, b.args)))
        if isinstance(a, (And, Or)):
            return (len(a.children) == len(b.children)
                    and all(walk(x, y, left, right, depth) for x, y in zip(a.children, b.children)))
        if isinstance(a, Not):
            return walk(a.child, b.child, left, right, depth)
        if isinstance(a, QUANTIFIERS):
            return walk(a.child, b.child, {**left, a.var: depth}, {**right, b.var: depth}, depth + 1)
        raise TypeError(f"not a formula: {a!r}")

    return walk(phi, psi, {}, {}, 0)


# ============================================
# CONSTRUCTION HELPERS
# ============================================

def var(i):
    return Var(i)


def eq(s, t):
    return Equality(s, t)


def conj(*children):
    return children[0] if len(children) == 1 else And(tuple(children))


def disj(*children):
    return children[0] if len(children) == 1 else Or(tuple(children))


def pp_formula(atoms, bound=()):
    """exists-prefixed conjunction of atoms; used only as a generator formula"""
    phi = conj(*atoms)
    for index in reversed(tuple(bound)):
        phi = Exists(index, phi)
    return phi


def is_quantifier_free(phi):
    if isinstance(phi, (Equality, Atom)):
        return True
    if isinstance(phi, (And, Or)):
        return all(is_quantifier_free(child) for child in phi.children)
    if isinstance(phi, Not):
        return is_quantifier_free(phi.child)
    return False


# ============================================
# PRINTING
# ============================================

def print_term(t):
    if isinstance(t, Var):
        return f"x{t.index}"
    if isinstance(t, Const):
        return str(t.value)
    if not t.args:
        return t.symbol
    return f"{t.symbol}({','.join(print_term(arg) for arg in t.args)})"


def _print_operand(phi, parent):
    text = print_formula(phi)
    if isinstance(phi, QUANTIFIERS) or isinstance(phi, parent) or (parent is And and isinstance(phi, Or)):
        return f"({text})"
    return text


def print_formula(phi):
    """Render phi in the ASCII formula grammar; parsing the result gives phi back"""
    if isinstance(phi, Equality):
        return f"{print_term(phi.left)} = {print_term(phi.right)}"
    if isinstance(phi, Atom):
        return f"{phi.symbol}({','.join(print_term(arg) for arg in phi.args)})"
    if isinstance(phi, And):
        return ' /\\ '.join(_print_operand(child, And) for child in phi.children)
    if isinstance(phi, Or):
        return ' \\/ '.join(_print_operand(child, Or) for child in phi.children)
    if isinstance(phi, Not):
        child = phi.child
        text = print_formula(child)
        if isinstance(child, (Atom, Not)):
            return f"~{text}"
        return f"~({text})"
    if isinstance(phi, Exists):
        return f"exists x{phi.var} ({print_formula(phi.child)})"
    if isinstance(phi, Forall):
        return f"forall x{phi.var} ({print_formula(phi.child)})"
    raise TypeError(f"not a formula: {phi!r}")


def print_structure(structure):
    """Render a Structure in the structure-file grammar"""
    lines = [f"structure {structure.name} {{", f"  universe {structure.k};"]
    for op in structure.ops:
        lines.append(f"  op {op.name}/{op.arity} = [{','.join(map(str, op.table))}];")
    for rel in structure.rels:
        tuples = sorted(rel.tuples, key=lambda t: t)
        body = ','.join('(' + ','.join(map(str, t)) + ')' for t in tuples)
        lines.append(f"  rel {rel.name}/{rel.arity} = {{{body}}};")
    lines.append('}')
    return '\n'.join(lines) + '\n'
