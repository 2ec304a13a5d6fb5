#!/usr/bin/env python3
import math
import tempfile
import unittest
from pathlib import Path

from klingen.evaluator import TruncationParams, UpperHalfPoint, klingen_context
from klingen.harness import (
    SCHEMA_VERSION,
    VerificationReport,
    _cor13_rhs,
    conventions_used,
    lambda_structure,
    load_form,
    timed,
    verify_cor14,
    verify_para_properties,
    verify_phi_limit,
    verify_pointwise,
    verify_representative_independence,
)
from klingen.qseries import SOURCE_BUILTIN, SOURCE_ETA, delta_qexp, write_coefficients
from klingen.quadforms import lambda_set
from klingen.summation import exact_sum

SMALL = TruncationParams(
    coset_height=8,
    cd_bound=2,
    fourier_cutoff=4,
    qexp_order=64,
    prune_tol=1e-16,
    rankin_cutoff=200,
    sym2_cutoff=50,
)


class VerificationReportTests(unittest.TestCase):
    def test_relative_error_decides(self) -> None:
        report = VerificationReport("demo", 2 + 0j, 2 + 1e-7j, 1e-6, SMALL.to_dict())
        self.assertAlmostEqual(report.rel_err, 5e-8)
        self.assertTrue(report.passed)
        self.assertTrue(report.summary().startswith("PASS demo"))
        failing = VerificationReport("demo", 2 + 0j, 3 + 0j, 1e-6, SMALL.to_dict())
        self.assertFalse(failing.passed)
        self.assertTrue(failing.summary().startswith("FAIL"))

    def test_zero_lhs_and_absolute_reports_use_abs_error(self) -> None:
        self.assertEqual(VerificationReport("z", 0j, 1e-9 + 0j, 1e-8, {}).rel_err, 1e-9)
        absolute = VerificationReport("a", 100 + 0j, 100.5 + 0j, 1.0, {}, absolute=True)
        self.assertEqual(absolute.rel_err, 0.5)
        self.assertTrue(absolute.passed)

    def test_non_finite_never_passes(self) -> None:
        report = VerificationReport("inf", complex(math.inf), 0j, 1e300, {})
        self.assertFalse(report.passed)

    def test_exceeding_the_error_bounds_fails(self) -> None:
        report = VerificationReport("demo", 1 + 0j, 1 + 1e-9j, 1e-6, {}, bound_excess=3e-10)
        self.assertLess(report.rel_err, report.tolerance)
        self.assertFalse(report.passed)
        self.assertIn("exceeds the error bounds", report.summary())
        self.assertEqual(report.to_dict()["bound_excess"], 3e-10)

    def test_to_dict(self) -> None:
        report = VerificationReport("demo", 1 + 0j, 1 + 0j, 1e-6, SMALL.to_dict(), details={"x": 1})
        data = report.to_dict()
        self.assertEqual(
            set(data),
            {"schema", "claim", "lhs", "rhs", "abs_err", "rel_err", "tolerance", "bound_excess", "pass", "truncation", "conventions", "details", "runtime_ms"},
        )
        self.assertEqual(data["schema"], SCHEMA_VERSION)
        self.assertEqual(data["lhs"], [1.0, 0.0])
        self.assertTrue(data["pass"])
        self.assertEqual(data["truncation"]["coset_height"], 8)
        self.assertNotIn("runtime_ms", report.to_dict(include_runtime=False))

    def test_conventions_are_sorted_key_value_lines(self) -> None:
        lines = conventions_used()
        self.assertEqual(lines, sorted(lines))
        self.assertTrue(lines[0].startswith("character: "))
        self.assertTrue(any(line.startswith("tr_index_convention: ") for line in lines))

    def test_timed_records_runtime(self) -> None:
        report = timed(lambda: VerificationReport("t", 1 + 0j, 1 + 0j, 1.0, {}))
        self.assertGreaterEqual(report.runtime_ms, 0)


class LoadFormTests(unittest.TestCase):
    def test_builtin_and_eta_forms(self) -> None:
        spec, series = load_form(12, SMALL)
        self.assertEqual((spec.weight, spec.level, spec.source), (12, 1, SOURCE_BUILTIN))
        self.assertEqual(series.order, 64)
        spec, series = load_form(12, SMALL, for_klingen=True)
        self.assertEqual(series.order, 201)
        spec, series = load_form(8, SMALL, level=2)
        self.assertEqual(spec.source, SOURCE_ETA)
        self.assertEqual(series[2], -8)

    def test_rejects_missing_forms(self) -> None:
        with self.assertRaises(ValueError):
            load_form(12, SMALL, level=3)
        with self.assertRaises(ValueError):
            load_form(14, SMALL)

    def test_coefficient_file_checks(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            path = write_coefficients(Path(tmp) / "delta.txt", delta_qexp(65))
            spec, series = load_form(12, SMALL, coeff_file=path)
            self.assertEqual(series.coeffs, delta_qexp(65).coeffs)
            with self.assertRaises(ValueError):
                load_form(16, SMALL, coeff_file=path)
            with self.assertRaises(ValueError):
                load_form(12, SMALL, level=2, coeff_file=path)
            with self.assertRaises(ValueError):
                load_form(12, SMALL, coeff_file=path, for_klingen=True)


class ClaimTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls) -> None:
        cls.f = delta_qexp(201)

    def test_lambda_structure(self) -> None:
        structure = lambda_structure(12)
        self.assertEqual(structure["size"], 5)
        self.assertEqual(structure["singular_contents"], [1, 1])
        self.assertTrue(structure["square_matches"])
        self.assertTrue(structure["hexagonal_matches"])

    def test_closed_form_matches_lambda_sum(self) -> None:
        closed, bound, extra = _cor13_rhs(self.f, 12, SMALL)
        coefficients = klingen_context(self.f, SMALL.rankin_cutoff, SMALL.sym2_cutoff)
        direct = exact_sum([coefficients(T).value.real for T in lambda_set(1, 1)])
        self.assertLess(abs(closed - direct), 1e-12 * abs(direct))
        self.assertEqual(extra["singular_coefficients"], [1.0, 1.0])
        self.assertTrue(math.isfinite(bound))

    def test_pointwise_stays_within_bounds(self) -> None:
        params = TruncationParams(**{**SMALL.to_dict(), "fourier_cutoff": 8})
        point = UpperHalfPoint(0.0, 1.2)
        report = verify_pointwise(12, [(point, point)], params, tolerance=1e-2, f=self.f)
        entry = report.details["points"][0]
        self.assertTrue(entry["within_bounds"])
        self.assertEqual(report.bound_excess, 0.0)
        self.assertTrue(report.passed, report.summary())

    def test_cor14_needs_coprime_indices(self) -> None:
        with self.assertRaises(ValueError):
            verify_cor14(12, 2, 2, SMALL, f=self.f)
        with self.assertRaises(ValueError):
            verify_cor14(12, 0, 1, SMALL, f=self.f)

    def test_phi_limit_passes(self) -> None:
        report = verify_phi_limit(12, UpperHalfPoint(0.1, 1.2), SMALL, f=self.f)
        self.assertTrue(report.details["monotone"])
        self.assertTrue(report.passed, report.summary())
        self.assertEqual(report.claim, "phi_limit_k12")

    def test_representative_independence(self) -> None:
        report = verify_representative_independence(
            12, UpperHalfPoint(0.3, 1.1), UpperHalfPoint(0.0, 1.5), SMALL, f=delta_qexp(64)
        )
        self.assertTrue(report.passed, report.summary())

    def test_para_level_one(self) -> None:
        report = verify_para_properties(12, 1, SMALL, tolerance=1e-6, f=delta_qexp(64))
        checks = report.details["checks"]
        self.assertEqual(checks[0]["check"], "siegel_coincidence")
        self.assertTrue(checks[0]["identical"])
        self.assertEqual(len(checks), 1 + 2 * 2)
        self.assertTrue(report.passed, report.summary())


if __name__ == "__main__":
    unittest.main()
