#!/usr/bin/env python3
"""Full-size runs at the default truncations; set KLINGEN_RUN_SLOW=1 to enable."""
import json
import os
import unittest

from klingen.evaluator import TruncationParams, UpperHalfPoint
from klingen.harness import (
    DEFAULT_POINTS,
    verify_cor13,
    verify_cor14,
    verify_para_properties,
    verify_phi_limit,
    verify_pointwise,
)

RUN_SLOW = os.environ.get("KLINGEN_RUN_SLOW") == "1"


@unittest.skipUnless(RUN_SLOW, "set KLINGEN_RUN_SLOW=1 for full-size verification runs")
class AcceptanceTests(unittest.TestCase):
    def test_pointwise_identity(self) -> None:
        for k in (12, 16):
            report = verify_pointwise(k, DEFAULT_POINTS, TruncationParams(), tolerance=1e-6)
            with self.subTest(k=k):
                self.assertTrue(report.passed, report.summary())

    def test_weighted_average_identity(self) -> None:
        for k in (12, 16):
            report = verify_cor13(k, TruncationParams(), tolerance=1e-5)
            with self.subTest(k=k):
                self.assertTrue(report.passed, report.summary())
                self.assertTrue(report.details["lambda_1_1"]["square_matches"])

    def test_coprime_coefficient_identity(self) -> None:
        params = TruncationParams(grid_size=16)
        for n1, n2 in ((1, 2), (2, 3)):
            report = verify_cor14(12, n1, n2, params, tolerance=1e-4)
            with self.subTest(n1=n1, n2=n2):
                self.assertTrue(report.passed, report.summary())

    def test_phi_limit_at_defaults(self) -> None:
        report = verify_phi_limit(12, UpperHalfPoint(0.0, 1.0), TruncationParams())
        self.assertTrue(report.passed, report.summary())

    def test_paramodular_properties(self) -> None:
        for k, level in ((12, 1), (8, 2)):
            report = verify_para_properties(k, level, TruncationParams(), tolerance=1e-6)
            with self.subTest(k=k, level=level):
                self.assertTrue(report.passed, report.summary())

    def test_pointwise_report_is_worker_independent(self) -> None:
        point = DEFAULT_POINTS[:1]
        dumps = []
        for workers in (1, 2, 8):
            report = verify_pointwise(12, point, TruncationParams(workers=workers))
            data = report.to_dict(include_runtime=False)
            data["truncation"].pop("workers")
            dumps.append(json.dumps(data, sort_keys=True))
        self.assertEqual(len(set(dumps)), 1)


if __name__ == "__main__":
    unittest.main()
