import hypothesis
import hypothesis.strategies as s
from django.test import SimpleTestCase, tag

from geometry.algebraic import (
    AlgebraicFamily, EDVerdict, atomic_spec, bounded_terms, ed_check, equation_solution, generate_subalgebra,
    term_clone,
)
from geometry.classify import load_structures
from geometry.closure import DefFamily, def_family
from geometry.evaluator import solution_set
from geometry.exceptions import GuardExceeded
from geometry.limits import EngineLimits
from geometry.oracle import oracle_algebraic_family, oracle_bottom, oracle_point_closures
from geometry.parsing import parse_formula, parse_structure
from geometry.relations import Relation, all_tuples, tuple_index
from geometry.syntax import ClosureMode, Var

from .strategies import algebras, specs, structures
from .utils import SAMPLES, binary_algebra, sample_structure


class TermCloneTests(SimpleTestCase):

    def test_semilattice_binary_terms(self):
        clone = term_clone(sample_structure('meet'), 2)
        self.assertEqual(len(clone), 3)
        for projection in clone.projections():
            self.assertIn(projection, clone)
        self.assertIn((0, 0, 0, 1), clone)

    def test_unary_polynomials_of_the_field(self):
        clone = term_clone(sample_structure('gf2'), 1)
        self.assertEqual(sorted(clone.tables), [(0, 0), (0, 1), (1, 0), (1, 1)])

    def test_witnesses_evaluate_to_their_tables(self):
        gf2 = sample_structure('gf2')
        clone = term_clone(gf2, 2)
        self.assertEqual(len(clone), 16)
        for table in clone.tables:
            self.assertEqual(equation_solution(clone.witness(table), Var(1), 2, gf2),
                             Relation.from_mask(2, 2, [v == a for v, (a, _b) in zip(table, all_tuples(2, 2))]))

    @hypothesis.given(algebras())
    @hypothesis.settings(max_examples=10)
    def test_bounded_search_reaches_the_clone(self, algebra):
        clone = term_clone(algebra, 2)
        found = bounded_terms(algebra, 2, depth=16)
        self.assertEqual(set(found), set(clone.tables))

    def test_depth_zero_keeps_projections_and_constants(self):
        found = bounded_terms(sample_structure('gf2'), 1, depth=0)
        self.assertEqual(set(found), {(0, 1), (0, 0), (1, 1)})

    def test_clone_cap(self):
        limits = EngineLimits(clone_cap=4)
        with self.assertRaises(GuardExceeded):
            term_clone(sample_structure('gf2'), 2, limits=limits)

    def test_subalgebra_of_a_power(self):
        # the subalgebra of (Z2, +)^2 generated by (1,0) is {(1,0), (0,0)}
        xor = binary_algebra((0, 1, 1, 0))
        sub = generate_subalgebra(xor, [[1, 0]], [Var(1)])
        self.assertTrue(sub.complete)
        self.assertEqual(sorted(map(tuple, sub.rows.tolist())), [(0, 0), (1, 0)])


class AlgebraicFamilyTests(SimpleTestCase):

    def test_equation_solution_agrees_with_solution_set(self):
        gf2 = sample_structure('gf2')
        phi = parse_formula("plus(times(x1,x2),x3) = one", ctx=gf2)
        self.assertEqual(equation_solution(phi.left, phi.right, 3, gf2), solution_set(phi, 3, gf2))

    def test_closure_in_the_semilattice(self):
        family = AlgebraicFamily(sample_structure('meet'), 2)
        closed = family.closure(Relation.from_tuples(2, 2, [(0, 1)]))
        self.assertEqual(closed.tuples(), [(0, 0), (0, 1), (1, 1)])
        self.assertTrue(family.contains(closed))
        self.assertFalse(family.contains(Relation.from_tuples(2, 2, [(0, 1)])))

    def test_bottom(self):
        self.assertTrue(AlgebraicFamily(sample_structure('gf2'), 1).bottom.is_empty())
        meet = sample_structure('meet')
        self.assertEqual(AlgebraicFamily(meet, 2).bottom.tuples(), [(0, 0), (1, 1)])
        self.assertEqual(AlgebraicFamily(meet, 2).bottom, oracle_bottom(meet, 2))

    def test_point_closures_agree_with_closure_of_singletons(self):
        gf2 = sample_structure('gf2')
        family = AlgebraicFamily(gf2, 2)
        for t in all_tuples(2, 2):
            self.assertEqual(family.point_closure(t), family.closure(Relation.from_tuples(2, 2, [t])))
            self.assertEqual(family.point_closure(t).tuples(), [t])

    @hypothesis.given(s.data())
    @hypothesis.settings(max_examples=24)
    def test_point_closures_match_brute_force(self, data):
        k, n = data.draw(s.sampled_from(((2, 2), (2, 3), (3, 2))))
        algebra = data.draw(structures(k, with_relation=False))
        self.assertEqual(AlgebraicFamily(algebra, n).point_closures(), oracle_point_closures(algebra, n))

    @hypothesis.given(structures(2))
    @hypothesis.settings(max_examples=8)
    def test_point_closures_with_relations_match_brute_force(self, structure):
        engine = AlgebraicFamily(structure, 2, with_relations=True).point_closures()
        self.assertEqual(engine, oracle_point_closures(structure, 2, with_relations=True))

    @hypothesis.given(structures(2, with_relation=False))
    @hypothesis.settings(max_examples=6)
    def test_members_match_equalizer_intersections(self, algebra):
        engine = {r.bits for r in AlgebraicFamily(algebra, 2).members()}
        self.assertEqual(engine, {r.bits for r in oracle_algebraic_family(algebra, 2)})

    def assertClosureLaws(self, k, n, closure_of):
        # t lies in V_t, and s in V_t gives V_s inside V_t
        for t in all_tuples(k, n):
            v = closure_of(tuple_index(t, k))
            if v is None:
                continue
            self.assertIn(t, v)
            for index in v.indices():
                self.assertTrue(closure_of(index).issubset(v))

    @hypothesis.given(s.data())
    @hypothesis.settings(max_examples=30)
    def test_point_closure_laws(self, data):
        k, n = data.draw(s.sampled_from(((2, 1), (2, 2), (2, 3), (3, 1), (3, 2))))
        structure = data.draw(structures(k))
        with_relations = data.draw(s.booleans())
        family = AlgebraicFamily(structure, n, with_relations=with_relations)
        closures = family.point_closures()
        self.assertClosureLaws(k, n, closures.get)
        for t in all_tuples(k, n):
            self.assertEqual(family.point_closure(t), closures[tuple_index(t, k)])

    @hypothesis.given(s.data())
    @hypothesis.settings(max_examples=30)
    def test_definable_point_closure_laws(self, data):
        structure = data.draw(structures(2))
        spec = data.draw(specs(structure))
        n = data.draw(s.integers(1, 3))
        family = def_family(structure, spec, n)
        self.assertClosureLaws(2, n, family.point_closure)
        for index in family.top.indices():
            self.assertIsNotNone(family.point_closure(index))

    def test_separating_atom(self):
        gf2 = sample_structure('gf2')
        family = AlgebraicFamily(gf2, 2)
        relation = Relation.from_tuples(2, 2, [(0, 0), (0, 1)])
        atom = family.separate(relation, (1, 1))
        solved = solution_set(atom, 2, gf2)
        self.assertTrue(relation.issubset(solved))
        self.assertNotIn((1, 1), solved)
        self.assertIsNone(family.separate(relation, (0, 1)))

    def test_defining_system(self):
        meet = sample_structure('meet')
        family = AlgebraicFamily(meet, 3)
        for relation in family.members():
            self.assertEqual(solution_set(family.defining_system(relation), 3, meet), relation)

    def test_relation_atoms_separate(self):
        structure = parse_structure("structure p { universe 2; op g/1 = [1,0]; rel P/1 = {(0)}; }")
        family = AlgebraicFamily(structure, 1, with_relations=True)
        atom = family.separate(Relation.from_tuples(2, 1, [(0,)]), (1,))
        self.assertEqual(solution_set(atom, 1, structure).tuples(), [(0,)])


class AtomicSpecTests(SimpleTestCase):

    def test_exact_spec_lists_equations_between_term_operations(self):
        spec = atomic_spec(sample_structure('meet'), 2)
        self.assertEqual(spec.mode, ClosureMode.LATTICE)
        self.assertFalse(spec.approximate)
        self.assertEqual(len(spec.generators), 1 + 3)

    def test_depth_bounded_spec_is_approximate(self):
        spec = atomic_spec(sample_structure('gf2'), 2, depth=1)
        self.assertTrue(spec.approximate)


class EquationalDomainTests(SimpleTestCase):

    def test_field_passes(self):
        report = ed_check(sample_structure('gf2'), 3)
        self.assertEqual(report.verdict, EDVerdict.PASSES_AT_BOUND)
        self.assertEqual(report.to_text(), "edcheck verdict=passes_at_bound bound=3\n")

    @tag('slow')
    def test_field_passes_at_four_and_contains_unions(self):
        gf2 = sample_structure('gf2')
        self.assertTrue(ed_check(gf2, 4).passes)
        union = Relation.from_tuples(2, 4, [t for t in all_tuples(2, 4) if t[0] == t[1] or t[2] == t[3]])
        self.assertEqual(len(union), 10)
        self.assertTrue(AlgebraicFamily(gf2, 4).contains(union))

    def test_trivial_algebra_passes(self):
        self.assertTrue(ed_check(sample_structure('trivial'), 3).passes)

    def test_semilattice_fails_with_a_counterexample(self):
        meet = sample_structure('meet')
        report = ed_check(meet, 3)
        self.assertEqual(report.verdict, EDVerdict.FAILS)
        self.assertEqual(report.arity, 3)
        first, second = report.counterexample
        family = AlgebraicFamily(meet, 3)
        self.assertTrue(family.contains(first))
        self.assertTrue(family.contains(second))
        self.assertFalse(family.contains(first | second))
        self.assertIn('union=rel/2/3:', report.to_text())

    @tag('slow')
    def test_passing_algebras_have_union_closed_algebraic_sets(self):
        # past the check at bound 4 the lattice slice from term equations is exactly the algebraic sets
        passed = 0
        for algebra in load_structures(SAMPLES / 'ops2'):
            if not ed_check(algebra, 4).passes:
                continue
            passed += 1
            family = AlgebraicFamily(algebra, 4)
            algebraic_sets = family.members()
            definable = DefFamily.from_algebraic(family)
            generated = DefFamily.from_seeds(algebraic_sets, 2, 4, ClosureMode.LATTICE)
            self.assertEqual(definable.serialize(), generated.serialize(), msg=algebra.name)
            self.assertEqual({r.bits for r in definable.members()}, {r.bits for r in algebraic_sets}, msg=algebra.name)
        self.assertGreater(passed, 0)
