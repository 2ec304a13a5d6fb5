#!/usr/bin/env python3
import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr
from pathlib import Path

from klingen.common import complex_pair, dump_json, format_table, notice, set_quiet, write_csv, write_json


class OutputTests(unittest.TestCase):
    def tearDown(self) -> None:
        set_quiet(False)

    def test_notice_prefix_and_quiet(self) -> None:
        buffer = io.StringIO()
        with redirect_stderr(buffer):
            notice("klingen", "hello")
            set_quiet(True)
            notice("klingen", "hidden")
        self.assertEqual(buffer.getvalue(), "[klingen] hello\n")

    def test_dump_json_is_stable(self) -> None:
        text = dump_json({"b": 1, "a": complex_pair(1 - 2j)})
        self.assertEqual(text, '{\n  "a": [\n    1.0,\n    -2.0\n  ],\n  "b": 1\n}\n')

    def test_writers_create_parents(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            json_path = write_json(Path(tmp) / "out" / "r.json", {"pass": True})
            self.assertEqual(json.loads(json_path.read_text(encoding="utf-8")), {"pass": True})
            csv_path = write_csv(Path(tmp) / "out" / "t.csv", ["n", "a(n)"], [[1, 1], [2, -24]])
            with csv_path.open(encoding="utf-8", newline="") as handle:
                self.assertEqual(list(csv.reader(handle)), [["n", "a(n)"], ["1", "1"], ["2", "-24"]])

    def test_format_table_right_aligns(self) -> None:
        self.assertEqual(format_table(["n", "a(n)"], [[1, 1], [2, -24]]), "n  a(n)\n1     1\n2   -24")


if __name__ == "__main__":
    unittest.main()
