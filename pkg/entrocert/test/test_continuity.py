import math
import unittest

import numpy as np
import pydantic

from entrocert.channels.service import ChannelService
from entrocert.classical.schema import Distribution
from entrocert.classical.service import ClassicalService
from entrocert.cmn.errors import UnsupportedStateSet
from entrocert.cmn.sampling import Sampler
from entrocert.continuity.schema import ConvergenceReport, StateSet
from entrocert.continuity.service import ContinuityService
from entrocert.quantum.schema import DensityMatrix
from entrocert.quantum.service import QuantumService


def _geometric_set() -> StateSet:
    return StateSet(kind="explicit-list", distributions=[ClassicalService.geometric(0.5, 40)])


class TestConvergenceReport(unittest.TestCase):
    def test_certified_must_match_last_bound(self):
        with self.assertRaises(pydantic.ValidationError):
            ConvergenceReport(functional="shannon", k_values=[1, 2], gap_bounds=[0.5, 0.1],
                              set_descriptor="x", threshold=0.2, certified=False)

    def test_k_values_strictly_increasing(self):
        with self.assertRaises(pydantic.ValidationError):
            ConvergenceReport(functional="shannon", k_values=[2, 2], gap_bounds=[0.5, 0.1],
                              set_descriptor="x", threshold=0.2, certified=True)

    def test_rows_track_first_certification(self):
        report = ConvergenceReport(functional="shannon", k_values=[1, 2, 3], gap_bounds=[0.5, 0.1, 0.05],
                                   set_descriptor="x", threshold=0.2, certified=True)
        self.assertEqual([r[2] for r in report.rows()], [False, True, True])
        self.assertEqual(report.certified_at, 2)

    def test_empty_grid_is_not_certified(self):
        report = ConvergenceReport(functional="shannon", k_values=[], gap_bounds=[],
                                   set_descriptor="x", threshold=0.2, certified=False)
        self.assertEqual(report.rows(), [])


class TestStateSet(unittest.TestCase):
    def test_explicit_list_needs_one_payload(self):
        with self.assertRaises(pydantic.ValidationError):
            StateSet(kind="explicit-list")

    def test_ball_needs_dominator(self):
        with self.assertRaises(pydantic.ValidationError):
            StateSet(kind="majorization-ball")

    def test_describe(self):
        s = StateSet(kind="explicit-list", distributions=[Distribution.of([1.0])] * 3)
        self.assertEqual(s.describe(), "explicit-list of 3 distributions")


class TestCertifyShannon(unittest.TestCase):
    def test_geometric_decays(self):
        report = ContinuityService.certify_shannon_set(_geometric_set(), 10, threshold=1e-2)
        self.assertEqual(report.k_values, list(range(1, 11)))
        self.assertTrue(report.certified)
        self.assertTrue(report.is_monotone(1e-10))
        self.assertTrue(report.bound_based)
        r = 2.0 ** -10
        self.assertAlmostEqual(report.gap_bounds[-1], -math.log(1 - r) - r * math.log(r) / (1 - r), delta=1e-6)

    def test_finite_support_set_reaches_zero(self):
        s = StateSet(kind="explicit-list", distributions=[Distribution.of([0.5, 0.5]), Distribution.of([0.2] * 5)])
        report = ContinuityService.certify_shannon_set(s, 5, threshold=1e-3)
        self.assertEqual(report.gap_bounds[-1], 0.0)
        self.assertTrue(report.certified)
        self.assertAlmostEqual(report.gap_bounds[0], math.log(5), places=12)

    def test_uncertified_keeps_bounds(self):
        report = ContinuityService.certify_shannon_set(_geometric_set(), 3, threshold=1e-3)
        self.assertFalse(report.certified)
        self.assertEqual(len(report.gap_bounds), 3)

    def test_ball_bound_dominates_members(self):
        x0 = ClassicalService.geometric(0.6, 12)
        s = StateSet(kind="majorization-ball", dominator=x0)
        report = ContinuityService.certify_shannon_set(s, 6, threshold=1e-3)
        samples = ContinuityService.majorization_samples(x0, 20, np.random.default_rng(0))
        for x in samples:
            self.assertTrue(ClassicalService.majorizes(x, x0))
            for k, bound in zip(report.k_values, report.gap_bounds):
                self.assertLessEqual(ClassicalService.delta_k_shannon_bound(x, k), bound + 1e-12)

    def test_coarse_entropy_dominated_inside_ball(self):
        x0 = ClassicalService.geometric(0.5, 40)
        samples = ContinuityService.majorization_samples(x0, 500, np.random.default_rng(3))
        ceiling = [ClassicalService.shannon_entropy(ClassicalService.coarse_grain(x0, k)) for k in range(1, 9)]
        for x in samples:
            for k in range(1, 9):
                coarse = ClassicalService.shannon_entropy(ClassicalService.coarse_grain(x, k))
                self.assertLessEqual(coarse, ceiling[k - 1] + 1e-10)

    def test_spectrum_family_rejected(self):
        s = StateSet(kind="spectrum-family", spectra=[Distribution.of([0.5, 0.5])])
        self.assertFalse(s.is_classical)
        with self.assertRaises(UnsupportedStateSet):
            ContinuityService.certify_shannon_set(s, 3)

    def test_quantum_set_rejected(self):
        s = StateSet(kind="explicit-list", states=[DensityMatrix.maximally_mixed(2)])
        with self.assertRaises(UnsupportedStateSet):
            ContinuityService.certify_shannon_set(s, 3)


class TestCertifyVonNeumann(unittest.TestCase):
    def test_explicit_states(self):
        sampler = Sampler(1)
        s = StateSet(kind="explicit-list", states=[sampler.density_matrix(4), sampler.density_matrix(4, rank=2)])
        report = ContinuityService.certify_vn_set(s, 4, threshold=1e-6)
        self.assertEqual(report.gap_bounds[-1], 0.0)
        self.assertTrue(report.certified)
        self.assertTrue(any("necessity" in n for n in report.notes))

    def test_spectrum_family_matches_classical(self):
        x = ClassicalService.geometric(0.5, 20)
        quantum = ContinuityService.certify_vn_set(StateSet(kind="spectrum-family", spectra=[x]), 5)
        classical = ContinuityService.certify_shannon_set(StateSet(kind="explicit-list", distributions=[x]), 5)
        np.testing.assert_allclose(quantum.gap_bounds, classical.gap_bounds, atol=1e-10)

    def test_ball_bound_from_dominator(self):
        s = StateSet(kind="majorization-ball", dominator=Distribution.of([0.5, 0.25, 0.25]))
        report = ContinuityService.certify_vn_set(s, 3)
        self.assertAlmostEqual(report.gap_bounds[0], 1.5 * math.log(2), places=12)
        self.assertAlmostEqual(report.gap_bounds[1], ClassicalService.shannon_entropy(Distribution.of([0.75, 0.25])), places=12)
        self.assertEqual(report.gap_bounds[2], 0.0)


class TestChannelImage(unittest.TestCase):
    def test_levels_and_monotone(self):
        sampler = Sampler(2)
        phi = sampler.channel(4, 4, 2)
        s = StateSet(kind="explicit-list", states=[sampler.density_matrix(4)])
        report = ContinuityService.certify_channel_image_set(phi, s, 4, threshold=1e-6)
        self.assertEqual(report.k_values, [2, 4, 6, 8])
        self.assertTrue(report.is_monotone(0.0))
        self.assertAlmostEqual(report.gap_bounds[-1], 0.0, places=10)

    def test_never_exceeds_input_bound(self):
        sampler = Sampler(3)
        phi, rho = sampler.channel(4, 3, 2), sampler.density_matrix(4)
        s = StateSet(kind="explicit-list", states=[rho])
        report = ContinuityService.certify_channel_image_set(phi, s, 3)
        for k, bound in zip((1, 2, 3), report.gap_bounds):
            self.assertLessEqual(bound, QuantumService.delta_k_vn_bound(rho, k) + 1e-9)


class TestAudits(unittest.TestCase):
    def test_mi_audit_identity_channel(self):
        rho = DensityMatrix.diagonal([0.4, 0.3, 0.2, 0.1])
        s = StateSet(kind="explicit-list", states=[rho])
        record = ContinuityService.audit_corollary_mi(ChannelService.identity(4), s, 3,
                                                      degrading=ChannelService.trace_out(4))
        self.assertTrue(record.degradable)
        self.assertTrue(record.passed)
        for row in record.rows:
            self.assertAlmostEqual(row.values["mi_bound"], 2 * row.values["vn_bound"], places=9)
            self.assertIn("mi_ge_vn", [c.name for c in row.checks])

    def test_mi_audit_random_channel(self):
        sampler = Sampler(4)
        s = StateSet(kind="explicit-list", states=[sampler.density_matrix(3) for _ in range(2)])
        record = ContinuityService.audit_corollary_mi(sampler.channel(3, 2, 2), s, 3)
        self.assertIsNone(record.degradable)
        self.assertTrue(record.passed)
        self.assertEqual(record.rows[-1].values["mi_bound"], 0.0)

    def test_chi_audit(self):
        sampler = Sampler(5)
        s = StateSet(kind="explicit-list", states=[sampler.density_matrix(3)])
        record = ContinuityService.audit_corollary_chi(sampler.channel(3, 3, 2), s, 3)
        self.assertTrue(record.passed)
        for row in record.rows:
            self.assertLessEqual(row.values["output_gap"], row.values["vn_bound"] + 1e-9)

    def test_mi_audit_dephasing_degraded_by_identity(self):
        sampler = Sampler(7)
        s = StateSet(kind="explicit-list", states=[sampler.density_matrix(2), DensityMatrix.diagonal([0.6, 0.4])])
        record = ContinuityService.audit_corollary_mi(ChannelService.dephasing(2), s, 1,
                                                      degrading=ChannelService.identity(2))
        self.assertTrue(record.degradable)
        self.assertLess(record.degrading_residual, 1e-12)
        self.assertTrue(record.passed)
        row = record.rows[0]
        self.assertGreaterEqual(row.values["mi_bound"], row.values["vn_bound"] - 1e-8)
        self.assertLessEqual(row.values["mi_bound"], 2 * row.values["vn_bound"] + 1e-9)

    def test_chi_audit_constant_output_channel(self):
        s = StateSet(kind="explicit-list", states=[Sampler(8).density_matrix(2)])
        record = ContinuityService.audit_corollary_chi(ChannelService.completely_depolarizing(2), s, 1)
        self.assertAlmostEqual(record.rows[0].values["output_gap"], 0.0, places=10)

    def test_chi_audit_identity_channel(self):
        rho = DensityMatrix.diagonal([0.5, 0.3, 0.2])
        s = StateSet(kind="explicit-list", states=[rho])
        record = ContinuityService.audit_corollary_chi(ChannelService.identity(3), s, 2)
        for row in record.rows:
            self.assertAlmostEqual(row.values["output_gap"], row.values["vn_bound"], places=10)

    def test_audit_needs_explicit_states(self):
        s = StateSet(kind="spectrum-family", spectra=[Distribution.of([0.5, 0.5])])
        with self.assertRaises(UnsupportedStateSet):
            ContinuityService.audit_corollary_chi(ChannelService.identity(2), s, 2)


class TestApproximationProfile(unittest.TestCase):
    def test_shannon_profile(self):
        x = ClassicalService.geometric(0.5, 30)
        profile = ContinuityService.approximation_profile(x, 8)
        self.assertTrue(profile.is_nondecreasing(1e-12))
        self.assertTrue(profile.never_exceeds(1e-12))
        self.assertAlmostEqual(profile.lower_bounds[0], 0.0, places=12)

    def test_vn_profile(self):
        rho = Sampler(6).density_matrix(4)
        profile = ContinuityService.vn_approximation_profile(rho, 4)
        self.assertTrue(profile.is_nondecreasing(1e-10))
        self.assertAlmostEqual(profile.lower_bounds[-1], profile.value, places=12)


if __name__ == "__main__":
    unittest.main()
