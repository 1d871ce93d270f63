import hypothesis
import hypothesis.strategies as s
import numpy as np
from django.test import SimpleTestCase, override_settings, tag

from geometry.algebraic import AlgebraicFamily, atomic_spec
from geometry.closure import (
    DefFamily, Fingerprint, Verdict, canonicalize, compare_families, comparison_arity, decide_equivalence, def_family,
    fingerprint,
)
from geometry.exceptions import GuardExceeded, ModeMismatch, UniverseMismatch
from geometry.limits import EngineLimits, get_limits
from geometry.oracle import oracle_basis, oracle_check, oracle_def, oracle_membership
from geometry.parsing import parse_formula, parse_structure
from geometry.relations import MinorMap, Relation, char_fn, char_minor
from geometry.syntax import ClosureMode, FormulaClassSpec

from .strategies import algebras, equational_sides, minor_maps, specs, structures
from .utils import binary_algebra, sample_spec, sample_structure

DIAG = Relation.from_tuples(2, 2, [(0, 0), (1, 1)])
FULL = Relation.full(2, 2)


def equation_side(table, name, text):
    algebra = binary_algebra(table, name)
    return algebra, FormulaClassSpec((parse_formula(text, ctx=algebra),))


# meet with x1 <= x2 and join with x1 <= x2 define the same sets
MEET_SIDE = equation_side((0, 0, 0, 1), 'meet', "f(x1,x2) = x1")
JOIN_SIDE = equation_side((0, 1, 1, 1), 'join', "f(x1,x2) = x2")


@s.composite
def family_cases(draw, k=2, mode=None, max_arity=2, quantifiers=False):
    """(structure, spec) with generators of arity at most max_arity"""
    structure = draw(structures(k))
    return structure, draw(specs(structure, mode, max_arity=max_arity, quantifiers=quantifiers))


def basis_triple(family):
    return tuple(v.bits for v in family.closures()), family.top.bits, family.empty_flag


class DefFamilyTests(SimpleTestCase):

    def setUp(self):
        self.gf2 = sample_structure('gf2')

    def test_lattice_family_of_equality(self):
        family = def_family(self.gf2, sample_spec('equality_lattice', self.gf2), 2)
        self.assertEqual(family.closures(), [DIAG, FULL])
        self.assertFalse(family.empty_flag)
        self.assertTrue(family.member(DIAG))
        self.assertFalse(family.member(Relation.empty(2, 2)))
        self.assertFalse(family.member(Relation.from_tuples(2, 2, [(0, 1)])))
        self.assertEqual({r.bits for r in family.members()}, {DIAG.bits, FULL.bits})
        self.assertEqual(
            family.serialize(),
            "fingerprint mode=LATTICE k=2 m=2 empty=0\n"
            "top=rel/2/2:{(0,0),(0,1),(1,0),(1,1)}\n"
            "rel/2/2:{(0,0),(1,1)}\n"
            "rel/2/2:{(0,0),(0,1),(1,0),(1,1)}\n",
        )

    def test_boolean_family_of_equality(self):
        family = def_family(self.gf2, sample_spec('equality_boolean', self.gf2), 2)
        self.assertTrue(family.empty_flag)
        self.assertEqual(len(family.members()), 4)
        self.assertTrue(family.member(~DIAG))
        self.assertTrue(family.member(Relation.empty(2, 2)))

    def test_top_is_union_of_seeds(self):
        family = def_family(self.gf2, FormulaClassSpec((parse_formula("x1 = one", ctx=self.gf2),)), 2)
        self.assertEqual(family.top.tuples(), [(0, 1), (1, 0), (1, 1)])
        self.assertFalse(family.member(FULL))
        self.assertIsNone(family.point_closure(0))

    def test_member_arguments_are_checked(self):
        family = def_family(self.gf2, sample_spec('equality_lattice', self.gf2), 2)
        with self.assertRaises(UniverseMismatch):
            family.member(Relation.full(3, 2))

    def test_generator_arity_cap(self):
        with self.assertRaises(GuardExceeded):
            def_family(self.gf2, sample_spec('gf2_equations', self.gf2), 2,
                       limits=EngineLimits(generator_arity_cap=2))

    def test_seed_cap(self):
        with self.assertRaisesMessage(GuardExceeded, 'seed cap'):
            def_family(self.gf2, sample_spec('gf2_equations', self.gf2), 4, limits=EngineLimits(seed_cap=10))

    @override_settings(DEFGEO_LIMITS={'arity_cap_binary': 3})
    def test_arity_cap_from_settings(self):
        self.assertEqual(get_limits().arity_cap_binary, 3)
        with self.assertRaisesMessage(GuardExceeded, 'arity cap'):
            def_family(self.gf2, sample_spec('equality_lattice', self.gf2), 4)

    def test_boolean_family_of_a_full_seed_holds_the_empty_set(self):
        family = DefFamily.from_seeds([FULL], 2, 2, ClosureMode.BOOLEAN)
        self.assertTrue(family.empty_flag)
        self.assertTrue(family.member(Relation.empty(2, 2)))
        self.assertEqual(family.closures(), [FULL])
        self.assertIn('empty=1', family.serialize())

    @hypothesis.given(algebras())
    @hypothesis.settings(max_examples=8)
    def test_lattice_atomic_family_is_the_algebraic_family(self, algebra):
        spec = atomic_spec(algebra, 2)
        self.assertEqual(def_family(algebra, spec, 2).serialize(),
                         DefFamily.from_algebraic(AlgebraicFamily(algebra, 2)).serialize())

    @hypothesis.given(structures(2, with_relation=False))
    @hypothesis.settings(max_examples=8)
    def test_boolean_atomic_family_is_the_quantifier_free_family(self, algebra):
        spec = FormulaClassSpec(atomic_spec(algebra, 2).generators, ClosureMode.BOOLEAN)
        self.assertEqual(def_family(algebra, spec, 2).serialize(),
                         DefFamily.quantifier_free(algebra, 2).serialize())


class FamilyLawTests(SimpleTestCase):
    """Slices are closed under their connectives and minors, and the comparison slice generates the rest"""

    @hypothesis.given(s.data())
    @hypothesis.settings(max_examples=60)
    def test_members_are_closed_under_connectives_and_minors(self, data):
        structure, spec = data.draw(family_cases())
        n = data.draw(s.integers(1, 3))
        family = def_family(structure, spec, n)
        members = family.members()
        a, b = data.draw(s.sampled_from(members)), data.draw(s.sampled_from(members))
        self.assertTrue(family.member(a & b))
        self.assertTrue(family.member(a | b))
        if spec.mode == ClosureMode.BOOLEAN:
            self.assertTrue(family.member(~a))
        mm = data.draw(minor_maps(n, data.draw(s.integers(1, 3))))
        self.assertTrue(def_family(structure, spec, mm.target).member(a.minor(mm)))

    @hypothesis.given(s.data())
    @hypothesis.settings(max_examples=60)
    def test_indicators_form_a_clonoid(self, data):
        structure, spec = data.draw(family_cases())
        n = data.draw(s.integers(1, 3))
        family = def_family(structure, spec, n)
        members = family.members()
        fa, fb = (char_fn(data.draw(s.sampled_from(members))) for _ in range(2))
        self.assertTrue(family.member(fa.meet(fb).to_relation()))
        self.assertTrue(family.member(fa.join(fb).to_relation()))
        mm = data.draw(minor_maps(n, data.draw(s.integers(1, 3))))
        self.assertTrue(def_family(structure, spec, mm.target).member(char_minor(fa, mm).to_relation()))

    @tag('slow')
    @hypothesis.given(s.data())
    @hypothesis.settings(max_examples=25)
    def test_comparison_slice_generates_every_arity(self, data):
        structure, spec = data.draw(family_cases())
        n = data.draw(s.integers(1, 6))
        m = comparison_arity(structure.k)
        comparison = def_family(structure, spec, m)
        generators = comparison.closures() + [comparison.top]
        if comparison.empty_flag:
            generators.append(Relation.empty(structure.k, m))
        seeds = [v.minor(mm) for v in generators for mm in MinorMap.all_maps(m, n)]
        self.assertEqual(DefFamily.from_seeds(seeds, structure.k, n, spec.mode).serialize(),
                         def_family(structure, spec, n).serialize())


class OracleAgreementTests(SimpleTestCase):
    """Membership agrees with explicitly closed families on every candidate relation"""

    def assertAgrees(self, case, max_arity):
        report = oracle_check(*case, max_arity)
        self.assertTrue(report.agrees, msg=report.to_text())

    @hypothesis.given(family_cases(mode=ClosureMode.LATTICE))
    @hypothesis.settings(max_examples=25)
    def test_lattice_specs(self, case):
        self.assertAgrees(case, 3)

    @hypothesis.given(family_cases(mode=ClosureMode.BOOLEAN))
    @hypothesis.settings(max_examples=12)
    def test_boolean_specs(self, case):
        self.assertAgrees(case, 3)

    @hypothesis.given(family_cases(k=3))
    @hypothesis.settings(max_examples=8)
    def test_three_element_universe(self, case):
        self.assertAgrees(case, 2)

    @hypothesis.given(family_cases(mode=ClosureMode.LATTICE, quantifiers=True))
    @hypothesis.settings(max_examples=8)
    def test_quantified_generators(self, case):
        self.assertAgrees(case, 3)

    @hypothesis.given(family_cases(max_arity=3))
    @hypothesis.settings(max_examples=20)
    def test_membership_table_matches_explicit_closure(self, case):
        structure, spec = case
        for n in (1, 2, 3):
            table = oracle_membership(structure, spec, n)
            self.assertEqual(set(np.flatnonzero(table).tolist()), {r.bits for r in oracle_def(structure, spec, n)})
            self.assertEqual(oracle_basis(structure, spec, n), basis_triple(def_family(structure, spec, n)))

    def test_report_lines(self):
        gf2 = sample_structure('gf2')
        report = oracle_check(gf2, sample_spec('equality_lattice', gf2), 2)
        self.assertEqual(report.to_text(), "n=1 members=1 candidates=4 ok\nn=2 members=2 candidates=16 ok\noracle agree\n")

    def test_membership_table_is_guarded(self):
        gf2 = sample_structure('gf2')
        with self.assertRaisesMessage(GuardExceeded, 'oracle cap'):
            oracle_membership(gf2, sample_spec('equality_lattice', gf2), 3, limits=EngineLimits(oracle_cap=255))

    @tag('slow')
    @hypothesis.given(family_cases(mode=ClosureMode.LATTICE, max_arity=3))
    @hypothesis.settings(max_examples=200)
    def test_lattice_specs_at_arity_four(self, case):
        self.assertAgrees(case, 4)

    @tag('slow')
    @hypothesis.given(family_cases(mode=ClosureMode.BOOLEAN, max_arity=3))
    @hypothesis.settings(max_examples=100)
    def test_boolean_specs_at_arity_four(self, case):
        self.assertAgrees(case, 4)


class FingerprintTests(SimpleTestCase):

    def setUp(self):
        self.gf2 = sample_structure('gf2')

    def test_header_and_digest(self):
        fp = fingerprint(self.gf2, sample_spec('equality_lattice', self.gf2))
        self.assertTrue(fp.text.startswith("fingerprint mode=LATTICE k=2 m=4 empty=0\ntop=rel/2/4:"))
        self.assertEqual(fp.m, 4)
        self.assertRegex(fp.digest(), r'^[0-9a-f]{16}$')

    def test_override_is_labelled(self):
        fp = fingerprint(self.gf2, sample_spec('equality_lattice', self.gf2), m=3)
        self.assertTrue(fp.text.startswith("fingerprint mode=LATTICE k=2 m=3 empty=0 override\n"))

    def test_rebuilt_from_text(self):
        for name in ('equality_lattice', 'equality_boolean', 'gf2_equations'):
            fp = fingerprint(self.gf2, sample_spec(name, self.gf2))
            rebuilt = Fingerprint.from_text(fp.text)
            self.assertEqual(rebuilt, fp)
            self.assertEqual(rebuilt.family.closures(), fp.family.closures())

    def test_deterministic(self):
        spec = sample_spec('gf2_equations', self.gf2)
        self.assertEqual(fingerprint(self.gf2, spec).text, fingerprint(self.gf2, spec).text)


class EquivalenceTests(SimpleTestCase):

    def setUp(self):
        self.gf2 = sample_structure('gf2')

    def test_same_input_is_equivalent(self):
        spec = sample_spec('gf2_equations', self.gf2)
        result = decide_equivalence(self.gf2, spec, self.gf2, spec)
        self.assertEqual(result.verdict, Verdict.EQUIVALENT)
        self.assertEqual(result.to_text(), "equivalent\n")

    def test_renamed_symbols_are_equivalent(self):
        other = parse_structure("structure other { universe 2; op add/2 = [0,1,1,0]; }")
        spec = FormulaClassSpec((parse_formula("add(x1,x2) = x3", ctx=other),))
        gf2_spec = FormulaClassSpec((parse_formula("plus(x1,x2) = x3", ctx=self.gf2),))
        self.assertEqual(decide_equivalence(other, spec, self.gf2, gf2_spec).verdict, Verdict.EQUIVALENT)

    def test_witness_lies_in_exactly_one_family(self):
        first = sample_spec('equality_lattice', self.gf2)
        second = sample_spec('gf2_equations', self.gf2)
        result = decide_equivalence(self.gf2, first, self.gf2, second)
        self.assertEqual(result.verdict, Verdict.INEQUIVALENT)
        families = {1: def_family(self.gf2, first, 4), 2: def_family(self.gf2, second, 4)}
        self.assertTrue(families[result.side].member(result.witness))
        self.assertFalse(families[3 - result.side].member(result.witness))
        self.assertTrue(result.to_text().startswith(f"inequivalent\nwitness side={result.side} rel/2/4:"))

    def test_mismatches(self):
        lattice = sample_spec('equality_lattice', self.gf2)
        with self.assertRaises(ModeMismatch):
            decide_equivalence(self.gf2, lattice, self.gf2, sample_spec('equality_boolean', self.gf2))
        with self.assertRaises(UniverseMismatch):
            decide_equivalence(self.gf2, lattice, sample_structure('trivial'), lattice)

    def test_approximate_equality_is_undetermined(self):
        spec = atomic_spec(self.gf2, 1, depth=1)
        family = def_family(self.gf2, spec, 2)
        self.assertEqual(compare_families(family, family).verdict, Verdict.UNDETERMINED)

    @hypothesis.given(equational_sides(), equational_sides(), equational_sides())
    @hypothesis.example(MEET_SIDE, JOIN_SIDE, MEET_SIDE)
    @hypothesis.settings(max_examples=40)
    def test_verdicts_form_an_equivalence_relation(self, first, second, third):
        def decide(x, y):
            return decide_equivalence(*x, *y)

        self.assertEqual(decide(first, first).verdict, Verdict.EQUIVALENT)
        forward, backward = decide(first, second), decide(second, first)
        self.assertEqual(forward.verdict, backward.verdict)
        families = [fingerprint(*side).family for side in (first, second)]
        for result, (this, other) in ((forward, families), (backward, families[::-1])):
            if result.verdict == Verdict.INEQUIVALENT:
                self.assertEqual(this.member(result.witness), result.side == 1)
                self.assertEqual(other.member(result.witness), result.side == 2)
        if forward.verdict == Verdict.EQUIVALENT and decide(second, third).verdict == Verdict.EQUIVALENT:
            self.assertEqual(decide(first, third).verdict, Verdict.EQUIVALENT)

    def check_fingerprint_decides(self, first, second, bound):
        # equal fingerprints at m = 4 mean equal families at every arity, and unequal ones
        # come with a witness
        result = decide_equivalence(*first, *second)
        if result.verdict == Verdict.EQUIVALENT:
            for n in range(1, bound + 1):
                self.assertEqual(oracle_basis(*first, n), oracle_basis(*second, n), msg=f"arity {n}")
        else:
            held = [bool(oracle_membership(*side, 4)[result.witness.bits]) for side in (first, second)]
            self.assertNotEqual(held[0], held[1])
            self.assertEqual(held[0], result.side == 1)

    @hypothesis.given(equational_sides(), equational_sides())
    @hypothesis.example(MEET_SIDE, JOIN_SIDE)
    @hypothesis.settings(max_examples=25)
    def test_fingerprint_equality_decides_small_arities(self, first, second):
        self.check_fingerprint_decides(first, second, 4)

    @tag('slow')
    @hypothesis.given(equational_sides(), equational_sides())
    @hypothesis.example(MEET_SIDE, JOIN_SIDE)
    @hypothesis.settings(max_examples=200)
    def test_fingerprint_equality_decides_every_arity(self, first, second):
        self.check_fingerprint_decides(first, second, 6)


class CanonicalPresentationTests(SimpleTestCase):

    def setUp(self):
        self.gf2 = sample_structure('gf2')

    def test_basis_presentation_reproduces_the_family(self):
        spec = sample_spec('equality_lattice', self.gf2)
        presentation = canonicalize(self.gf2, spec, basis_only=True, check_bound=3)
        self.assertEqual(presentation.structure.name, 'gf2_canonical')
        self.assertEqual(len(presentation.structure.rels), 8)
        self.assertEqual(presentation.verified_arities, (1, 2, 3))
        self.assertEqual(fingerprint(presentation.structure, presentation.spec).text, presentation.fingerprint.text)
        reparsed = parse_structure(presentation.structure.to_text())
        self.assertEqual(reparsed, presentation.structure)

    def test_member_presentation(self):
        spec = sample_spec('equality_boolean', self.gf2)
        presentation = canonicalize(self.gf2, spec, check_bound=2)
        self.assertEqual(len(presentation.structure.rels), 2 ** 8)
        self.assertEqual(presentation.spec.mode, ClosureMode.BOOLEAN)


    def check_round_trip(self, structure, spec, bound):
        presentation = canonicalize(structure, spec, basis_only=True, check_bound=bound)
        self.assertEqual(presentation.verified_arities, tuple(range(1, bound + 1)))
        self.assertEqual(fingerprint(presentation.structure, presentation.spec).text, fingerprint(structure, spec).text)
        for n in range(1, bound + 1):
            self.assertEqual(oracle_basis(structure, spec, n),
                             oracle_basis(presentation.structure, presentation.spec, n), msg=f"arity {n}")

    @hypothesis.given(family_cases())
    @hypothesis.settings(max_examples=5)
    def test_generated_specs_round_trip(self, case):
        self.check_round_trip(*case, 3)

    @tag('slow')
    @hypothesis.given(family_cases())
    @hypothesis.settings(max_examples=20)
    def test_generated_specs_round_trip_to_arity_six(self, case):
        self.check_round_trip(*case, 6)
