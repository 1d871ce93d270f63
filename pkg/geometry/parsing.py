"""
Parsers for structure files, formulas, spec files and canonical relation text.

Grammars are built with pyparsing; every ParseException is converted to a GrammarError
carrying the line, the column and an excerpt of the rule that was expected.
"""
import logging

import pyparsing as pp

from geometry.exceptions import ArityError, DefGeoError, ElementRangeError, GrammarError, SymbolError
from geometry.relations import Relation
from geometry.structures import OpTable, RelTable, Structure, Universe
from geometry.syntax import (
    And, App, Atom, ClosureMode, Const, Equality, Exists, Forall, FormulaClassSpec, Not, Or, Var,
)

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()


# ============================================
# GRAMMAR EXCERPTS (shown in error messages)
# ============================================

STRUCTURE_RULES = {
    'file': 'file := "structure" IDENT "{" decl* "}"',
    'universe': 'decl := "universe" INT ";"',
    'op': 'decl := "op" IDENT "/" INT "=" "[" INT ("," INT)* "]" ";"',
    'rel': 'decl := "rel" IDENT "/" INT "=" "{" tuple ("," tuple)* "}" ";" | "rel" IDENT "/" INT "=" "{" "}" ";"',
}

FORMULA_RULE = (
    'formula := atom | "~" formula | formula "/\\" formula | formula "\\/" formula'
    ' | ("exists"|"forall") var formula | "(" formula ")";'
    ' atom := term "=" term | IDENT "(" term,* ")"; term := var | INT | IDENT | IDENT "(" term,* ")"'
)

SPEC_RULE = 'spec := "mode:" ("LATTICE"|"BOOLEAN") NEWLINE (formula NEWLINE)*'

RELATION_RULE = 'relation := "rel/" INT "/" INT ":{" [ "(" INT ("," INT)* ")" ("," ...)* ] "}"'


# ============================================
# TOKENS
# ============================================

LPAR, RPAR, LBRACE, RBRACE, LBRACK, RBRACK = map(pp.Suppress, '(){}[]')
COMMA, SEMI, SLASH, EQUALS = map(pp.Suppress, ',;/=')

INT = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0])).set_name('integer')
KEYWORD = pp.Keyword('exists') | pp.Keyword('forall')
VAR = pp.Regex(r'x(\d+)(?![A-Za-z0-9_])').set_name('variable')
IDENT = (~KEYWORD + ~VAR + pp.Word(pp.alphas + '_', pp.alphanums + '_')).set_name('identifier')


def _located(tag):
    def action(s, loc, toks):
        return [(tag, pp.lineno(loc, s), *toks)]
    return action


# ============================================
# STRUCTURE FILES
# ============================================

_tuple = pp.Group(LPAR + pp.DelimitedList(INT) + RPAR).set_parse_action(lambda t: [tuple(t[0])])
_universe_decl = (pp.Suppress(pp.Keyword('universe')) + INT + SEMI).set_parse_action(_located('universe'))
_op_decl = (
    pp.Suppress(pp.Keyword('op')) + IDENT + SLASH + INT + EQUALS
    + LBRACK + pp.Group(pp.DelimitedList(INT)) + RBRACK + SEMI
).set_parse_action(_located('op'))
_rel_decl = (
    pp.Suppress(pp.Keyword('rel')) + IDENT + SLASH + INT + EQUALS
    + LBRACE + pp.Group(pp.Optional(pp.DelimitedList(_tuple))) + RBRACE + SEMI
).set_parse_action(_located('rel'))
_decl = (_universe_decl | _op_decl | _rel_decl).set_name('declaration')

STRUCTURE_FILE = (
    pp.Suppress(pp.Keyword('structure')) + IDENT + LBRACE + pp.Group(pp.ZeroOrMore(_decl)) + RBRACE + pp.StringEnd()
)
STRUCTURE_FILE.ignore(pp.python_style_comment)


def _rule_for(line_text):
    words = line_text.split()
    head = words[0] if words else ''
    return STRUCTURE_RULES.get(head, STRUCTURE_RULES['file'])


def parse_structure(text):
    """Parse a structure file into a Structure"""
    try:
        name, decls = STRUCTURE_FILE.parse_string(text, parse_all=True)
    except pp.ParseBaseException as exc:
        raise GrammarError(exc.msg, exc.lineno, exc.col, _rule_for(exc.line)) from None

    universes = [d for d in decls if d[0] == 'universe']
    if not universes:
        raise GrammarError(f"structure {name} declares no universe", rule=STRUCTURE_RULES['universe'])
    if len(universes) > 1:
        raise GrammarError("universe declared twice", universes[1][1], 1, STRUCTURE_RULES['universe'])
    k = universes[0][2]
    if k < 1:
        raise ElementRangeError(f"line {universes[0][1]}: universe size must be at least 1")

    ops, rels, seen = [], [], set()
    for decl in decls:
        tag, line = decl[0], decl[1]
        if tag == 'universe':
            continue
        symbol, arity, body = decl[2], decl[3], decl[4]
        if symbol in seen:
            raise SymbolError(f"line {line}: duplicate symbol {symbol!r}")
        seen.add(symbol)
        if tag == 'op':
            entry = OpTable(symbol, arity, tuple(body))
        else:
            entry = RelTable(symbol, arity, frozenset(body))
        try:
            entry.validate(k)
        except DefGeoError as exc:
            raise type(exc)(f"line {line}: {exc}") from None
        (ops if tag == 'op' else rels).append(entry)

    structure = Structure(name, Universe(k), tuple(ops), tuple(rels))
    logger.debug("structure parsed name=%s k=%s ops=%s rels=%s", name, k, len(ops), len(rels))
    return structure


# ============================================
# FORMULAS
# ============================================

_term = pp.Forward().set_name('term')
_var = VAR.copy().set_parse_action(lambda t: [Var(int(t[0][1:]))])
_const = INT.copy().set_parse_action(lambda t: [Const(int(t[0]))])
_app = (IDENT + LPAR + pp.Group(pp.Optional(pp.DelimitedList(_term))) + RPAR).set_parse_action(
    lambda t: [App(t[0], tuple(t[1]))]
)
_bare = IDENT.copy().set_parse_action(lambda t: [App(t[0], ())])
_term <<= _var | _app | _bare | _const

_equality = (_term + EQUALS + _term).set_parse_action(lambda t: [Equality(t[0], t[1])])
_rel_atom = (IDENT + LPAR + pp.Group(pp.Optional(pp.DelimitedList(_term))) + RPAR).set_parse_action(
    lambda t: [Atom(t[0], tuple(t[1]))]
)
_atom = (_equality | _rel_atom).set_name('atom')

_formula = pp.Forward().set_name('formula')


def _quantify(t):
    kind, variable, body = t
    node = Exists if kind == 'exists' else Forall
    return [node(variable.index, body)]


_quantified = (KEYWORD + _var + _formula).set_parse_action(_quantify)
_primary = _quantified | (LPAR + _formula + RPAR) | _atom
_unary = pp.Forward()
_unary <<= (pp.Suppress('~') + _unary).set_parse_action(lambda t: [Not(t[0])]) | _primary
_conj = (_unary + pp.ZeroOrMore(pp.Suppress('/\\') + _unary)).set_parse_action(
    lambda t: [t[0] if len(t) == 1 else And(tuple(t))]
)
_disj = (_conj + pp.ZeroOrMore(pp.Suppress('\\/') + _conj)).set_parse_action(
    lambda t: [t[0] if len(t) == 1 else Or(tuple(t))]
)
_formula <<= _disj

FORMULA = _formula + pp.StringEnd()


def resolve_term(t, ctx):
    """Check the symbols and constants of a term against a structure"""
    if isinstance(t, Const):
        if not 0 <= t.value < ctx.k:
            raise ElementRangeError(f"constant {t.value} is outside the universe 0..{ctx.k - 1}")
    elif isinstance(t, App):
        op = ctx.op(t.symbol)
        if op.arity != len(t.args):
            raise ArityError(f"operation {t.symbol} has arity {op.arity}, used with {len(t.args)} arguments")
        for arg in t.args:
            resolve_term(arg, ctx)
    return t


def resolve_formula(phi, ctx):
    """Check every symbol of phi against a structure and return phi unchanged"""
    if isinstance(phi, Equality):
        resolve_term(phi.left, ctx)
        resolve_term(phi.right, ctx)
    elif isinstance(phi, Atom):
        rel = ctx.rel(phi.symbol)
        if rel.arity != len(phi.args):
            raise ArityError(f"relation {phi.symbol} has arity {rel.arity}, used with {len(phi.args)} arguments")
        for arg in phi.args:
            resolve_term(arg, ctx)
    elif isinstance(phi, (And, Or)):
        for child in phi.children:
            resolve_formula(child, ctx)
    elif isinstance(phi, (Not, Exists, Forall)):
        resolve_formula(phi.child, ctx)
    return phi


def parse_formula(text, ctx=None, line_offset=0):
    """Parse a formula; symbols are resolved against ctx when it is given"""
    try:
        phi = FORMULA.parse_string(text, parse_all=True)[0]
    except pp.ParseBaseException as exc:
        raise GrammarError(exc.msg, exc.lineno + line_offset, exc.col, FORMULA_RULE) from None
    if ctx is not None:
        resolve_formula(phi, ctx)
    return phi


# ============================================
# SPEC FILES
# ============================================

def parse_spec(text, ctx=None):
    """
    Parse a spec file: a "mode:" header followed by one generator formula per line.

    Blank lines and lines starting with # are skipped.
    """
    mode = None
    generators = []
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if mode is None:
            head, sep, value = line.partition(":")
            if head.strip() != "mode" or not sep:
                raise GrammarError("spec files start with a mode header", number, 1, SPEC_RULE)
            value = value.strip().upper()
            if value not in ClosureMode.values:
                raise GrammarError(f"unknown closure mode {value!r}", number, raw.find(':') + 2, SPEC_RULE)
            mode = ClosureMode(value)
            continue
        generators.append(parse_formula(line, ctx, line_offset=number - 1))
    if mode is None:
        raise GrammarError("spec file is empty", rule=SPEC_RULE)
    if not generators:
        raise GrammarError("spec file lists no generator formulas", rule=SPEC_RULE)
    return FormulaClassSpec(tuple(generators), mode)


# ============================================
# RELATIONS
# ============================================

RELATION = (
    pp.Suppress('rel') + SLASH + INT + SLASH + INT + pp.Suppress(':')
    + LBRACE + pp.Group(pp.Optional(pp.DelimitedList(_tuple))) + RBRACE
)


def parse_relation(text):
    """Parse the canonical relation text rel/k/n:{(t),...}"""
    try:
        k, n, tuples = RELATION.parse_string(text.strip(), parse_all=True)
    except pp.ParseBaseException as exc:
        raise GrammarError(exc.msg, exc.lineno, exc.col, RELATION_RULE) from None
    if k < 1:
        raise ElementRangeError("universe size must be at least 1")
    if n < 1:
        raise ArityError("relations of arity 0 are not supported")
    return Relation.from_tuples(k, n, list(tuples))
