import itertools

from django.test import SimpleTestCase
from hypothesis import given, settings as hypothesis_settings, strategies as st

from graphkit.algorithms import root_components
from graphkit.digraph import Digraph
from rounds.services import complete_run, self_loop_run, skeleton_at, stable_skeleton
from .exceptions import GenerationFailed, ParameterOutOfRange, SubsetTooSmall
from .generators import (
    gen_arbitrary, gen_complete, gen_lower_bound_run, gen_random_psrcs, gen_two_roots,
)
from .serializers import PredicateReportSerializer, represent_cover
from .services import min_k, p_src_holds, p_srcs_holds, two_source_cover


def _stable_roots(run):
    skeleton, _ = stable_skeleton(run)
    return root_components(Digraph.over_processes(run.n, skeleton.edges))


class TwoSourceTests(SimpleTestCase):

    def test_complete_run_every_process_is_a_source(self):
        run = complete_run(4)
        for p in range(4):
            for subset in itertools.combinations(range(4), 2):
                self.assertTrue(p_src_holds(run, p, subset))

    def test_self_loops_only_has_no_source(self):
        run = self_loop_run(4)
        for p in range(4):
            self.assertFalse(p_src_holds(run, p, {0, 1, 2}))

    def test_hub_is_source_of_two_non_loners(self):
        run = gen_lower_bound_run(6, 3)
        self.assertTrue(p_src_holds(run, 2, {0, 3, 5}))
        self.assertTrue(p_src_holds(run, 2, {2, 4}))
        self.assertFalse(p_src_holds(run, 2, {0, 1, 4}))

    def test_source_need_not_be_in_subset(self):
        run = gen_lower_bound_run(6, 3)
        self.assertTrue(p_src_holds(run, 2, {4, 5}))

    def test_subset_too_small(self):
        with self.assertRaises(SubsetTooSmall):
            p_src_holds(complete_run(3), 0, {1})
        with self.assertRaises(SubsetTooSmall):
            p_src_holds(complete_run(3), 0, [1, 1])


class KSourcesTests(SimpleTestCase):

    def test_complete_run_holds_for_every_k(self):
        run = complete_run(5)
        for k in range(1, 5):
            report = p_srcs_holds(run, k)
            self.assertTrue(report.holds)
            self.assertIsNone(report.violating_subset)
            self.assertEqual(len(report.witness_sources), len(list(itertools.combinations(range(5), k + 1))))

    def test_self_loops_fail_with_first_subset(self):
        report = p_srcs_holds(self_loop_run(4), 2)
        self.assertFalse(report.holds)
        self.assertIsNone(report.witness_sources)
        self.assertEqual(report.violating_subset, (0, 1, 2))

    def test_vacuous_for_k_at_least_n(self):
        for k in (3, 4, 10):
            report = p_srcs_holds(self_loop_run(3), k)
            self.assertTrue(report.holds)
            self.assertEqual(report.witness_sources, {})

    def test_k_must_be_positive(self):
        with self.assertRaises(ParameterOutOfRange):
            p_srcs_holds(complete_run(3), 0)

    def test_lower_bound_run_is_tight(self):
        for n in range(3, 9):
            for k in range(2, n):
                run = gen_lower_bound_run(n, k)
                self.assertTrue(p_srcs_holds(run, k).holds, (n, k))
                self.assertFalse(p_srcs_holds(run, k - 1).holds, (n, k))

    @hypothesis_settings(max_examples=100, deadline=None)
    @given(
        st.integers(min_value=2, max_value=7),
        st.integers(min_value=0, max_value=10_000),
        st.sampled_from((0.1, 0.3, 0.6)),
    )
    def test_monotone_in_k(self, n, seed, density):
        run = gen_arbitrary(n, seed, prefix_len=2, density=density)
        results = [p_srcs_holds(run, k).holds for k in range(1, n + 1)]
        first = results.index(True)
        self.assertTrue(all(results[first:]))
        self.assertEqual(min_k(run), first + 1)

    @hypothesis_settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10_000))
    def test_root_components_bounded_by_min_k(self, n, seed):
        run = gen_arbitrary(n, seed, prefix_len=2, density=0.25)
        self.assertLessEqual(len(_stable_roots(run)), min_k(run))


class MinKTests(SimpleTestCase):

    def test_complete_run(self):
        self.assertEqual(min_k(complete_run(5)), 1)

    def test_lower_bound_run(self):
        self.assertEqual(min_k(gen_lower_bound_run(6, 3)), 3)

    def test_self_loops(self):
        self.assertEqual(min_k(self_loop_run(4)), 4)
        self.assertEqual(min_k(self_loop_run(1)), 1)


class TwoSourceCoverTests(SimpleTestCase):

    def test_cover_names_receivers(self):
        cover = two_source_cover(gen_lower_bound_run(4, 2), 2)
        witness = cover[(0, 2, 3)]
        self.assertEqual(witness.source, 1)
        self.assertEqual(witness.receivers, (2, 3))

    def test_cover_marks_uncovered_subsets(self):
        cover = two_source_cover(self_loop_run(3), 1)
        self.assertEqual(set(cover), {(0, 1), (0, 2), (1, 2)})
        self.assertTrue(all(witness is None for witness in cover.values()))

    def test_cover_serialization(self):
        rows = represent_cover(two_source_cover(gen_lower_bound_run(3, 2), 2))
        self.assertEqual(rows[0]['subset'], [0, 1, 2])
        self.assertEqual(rows[0]['source'], 1)
        self.assertEqual(rows[0]['receivers'], [1, 2])


class ReportSerializerTests(SimpleTestCase):

    def test_failed_report(self):
        data = PredicateReportSerializer(p_srcs_holds(self_loop_run(3), 1)).data
        self.assertFalse(data['holds'])
        self.assertEqual(data['violating_subset'], [0, 1])
        self.assertIsNone(data['witness_sources'])

    def test_witnesses_sorted(self):
        report = p_srcs_holds(gen_lower_bound_run(4, 2), 2)
        data = PredicateReportSerializer(report, context={'min_k': 2}).data
        subsets = [row['subset'] for row in data['witness_sources']]
        self.assertEqual(subsets, sorted(subsets))
        self.assertEqual(data['min_k'], 2)


class LowerBoundGeneratorTests(SimpleTestCase):

    def test_timely_neighbourhoods(self):
        run = gen_lower_bound_run(6, 3)
        self.assertEqual(run.prefix_length, 0)
        self.assertEqual(run.tail.in_neighbors(0), {0})
        self.assertEqual(run.tail.in_neighbors(1), {1})
        for p in range(2, 6):
            self.assertEqual(run.tail.in_neighbors(p), {p, 2})

    def test_custom_loners_and_hub(self):
        run = gen_lower_bound_run(5, 3, loner_ids={3, 4}, hub=0)
        self.assertEqual(run.tail.in_neighbors(3), {3})
        self.assertEqual(run.tail.in_neighbors(1), {1, 0})
        self.assertTrue(p_srcs_holds(run, 3).holds)

    def test_smallest_instance(self):
        run = gen_lower_bound_run(3, 2)
        self.assertEqual(run.tail.in_neighbors(0), {0})
        self.assertEqual(run.tail.in_neighbors(2), {2, 1})

    def test_rejects_bad_parameters(self):
        for kwargs in (
            {'n': 4, 'k': 1},
            {'n': 4, 'k': 4},
            {'n': 5, 'k': 3, 'loner_ids': {0}},
            {'n': 5, 'k': 3, 'loner_ids': {0, 7}},
            {'n': 5, 'k': 3, 'loner_ids': {0, 1}, 'hub': 1},
            {'n': 5, 'k': 3, 'hub': 9},
        ):
            with self.assertRaises(ParameterOutOfRange, msg=str(kwargs)):
                gen_lower_bound_run(**kwargs)


class TwoRootsGeneratorTests(SimpleTestCase):

    def test_prefix_skeleton_shrinks_to_stable(self):
        run = gen_two_roots()
        stable, stabilization_round = stable_skeleton(run)
        self.assertEqual(stabilization_round, 4)
        self.assertTrue(stable.edges < skeleton_at(run, 2).edges)

    def test_two_root_components_and_sink(self):
        run = gen_two_roots()
        self.assertEqual(_stable_roots(run), [frozenset({0, 1}), frozenset({2, 3, 4})])
        stable, _ = stable_skeleton(run)
        self.assertEqual(stable.in_neighbors(5), {1, 4, 5})

    def test_predicate(self):
        run = gen_two_roots()
        self.assertTrue(p_srcs_holds(run, 3).holds)
        self.assertEqual(min_k(run), 2)


class RandomGeneratorTests(SimpleTestCase):

    def test_samples_satisfy_predicate(self):
        for n in range(2, 8):
            for k in range(1, n):
                for seed in range(3):
                    run = gen_random_psrcs(n, k, seed)
                    self.assertTrue(p_srcs_holds(run, k).holds, (n, k, seed))
                    self.assertLessEqual(len(_stable_roots(run)), k)

    def test_deterministic_in_seed(self):
        self.assertEqual(gen_random_psrcs(6, 2, 11), gen_random_psrcs(6, 2, 11))
        self.assertEqual(gen_arbitrary(6, 11), gen_arbitrary(6, 11))

    def test_prefix_length(self):
        self.assertEqual(gen_random_psrcs(5, 2, 0, prefix_len=5).prefix_length, 5)
        self.assertEqual(gen_random_psrcs(5, 2, 0, prefix_len=0).prefix_length, 0)

    def test_rejects_bad_parameters(self):
        with self.assertRaises(ParameterOutOfRange):
            gen_random_psrcs(4, 4, 0)
        with self.assertRaises(ParameterOutOfRange):
            gen_random_psrcs(4, 0, 0)
        with self.assertRaises(ParameterOutOfRange):
            gen_arbitrary(4, 0, density=1.5)

    def test_exhausted_budget(self):
        with self.settings(KSET_RANDOM_MAX_ATTEMPTS=0):
            with self.assertRaises(GenerationFailed):
                gen_random_psrcs(4, 2, 0)

    def test_complete_generator(self):
        self.assertEqual(gen_complete(3), complete_run(3))


class ProcessLimitTests(SimpleTestCase):

    def test_generators_stop_at_max_processes(self):
        with self.settings(KSET_MAX_PROCESSES=5):
            gen_complete(5)
            for build in (
                lambda: gen_complete(6),
                lambda: gen_arbitrary(6, 0),
                lambda: gen_random_psrcs(6, 2, 0),
                lambda: gen_lower_bound_run(6, 2),
            ):
                with self.assertRaises(ParameterOutOfRange) as ctx:
                    build()
                self.assertEqual(ctx.exception.parameter, 'n')

    def test_empty_system_rejected(self):
        with self.assertRaises(ParameterOutOfRange):
            gen_complete(0)
