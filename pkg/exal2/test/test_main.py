import io
import json
import os
import unittest
from unittest.mock import patch, Mock
import pandas as pd
from exal2.main import VERBS, apply_environment, run
from exal2.utils.configs import config
from exal2.utils.errors import AxiomViolation
from exal2.utils.write import build_report, emit_log, render_report, write_log


class MainTestCase(unittest.TestCase):
    """Test suite for the exal2 command line and report writing"""

    maxDiff = None

    def setUp(self):
        self.stream = io.StringIO()
        self.config_patch = patch.dict(config, {"log_level": "CRITICAL"})
        self.config_patch.start()
        self.dotenv_patch = patch("exal2.main.load_dotenv")
        self.dotenv_patch.start()

    def tearDown(self):
        self.dotenv_patch.stop()
        self.config_patch.stop()

    def _jsonl(self):
        return [json.loads(line) for line in self.stream.getvalue().splitlines() if line]

    def test_write_log(self):
        """Test write_log function"""
        out = json.loads(write_log("Hello", {"k": 1}, "WARNING"))
        self.assertEqual(out, {"severity": "WARNING", "message": "Hello", "custom_property": {"k": 1}})

    @patch("sys.stderr", new_callable=io.StringIO)
    def test_emit_log_level(self, stderr):
        """Test emit_log filters by the configured level"""
        with patch.dict(config, {"log_level": "WARNING"}):
            emit_log("hidden", severity="INFO")
            emit_log("shown", severity="ERROR")
        lines = stderr.getvalue().splitlines()
        self.assertEqual(len(lines), 1)
        self.assertEqual(json.loads(lines[0])["message"], "shown")

    def test_build_report(self):
        """Test build_report function"""
        records = [
            dict(verb="b", subject="s", check="c", value=[1, 2], passed=True, witness=None),
            dict(verb="a", subject="s", check="c", value=3, passed=False, witness=(0, 1)),
        ]
        df = build_report(records)
        self.assertEqual(list(df.columns), config["report_columns"])
        self.assertEqual(df["verb"].tolist(), ["a", "b"])
        self.assertEqual(df.loc[1, "value"], "[1, 2]")
        self.assertEqual(df.loc[0, "witness"], "(0, 1)")

    def test_render_report_jsonl(self):
        """Test render_report function with jsonl output"""
        df = build_report([dict(verb="v", subject="s", check="c", value=1, passed=True, witness=None)])
        render_report(df, "jsonl", self.stream)
        self.assertEqual(self._jsonl()[0]["check"], "c")

    def test_render_report_failure(self):
        """Test render_report function raising RuntimeError"""
        stream = Mock()
        stream.write.side_effect = OSError("closed")
        with self.assertRaises(RuntimeError):
            render_report(pd.DataFrame(columns=config["report_columns"]), "text", stream)

    def test_apply_environment(self):
        """Test apply_environment reads EXAL2_* variables"""
        env = {"EXAL2_MAX_CANDIDATES": "99", "EXAL2_PROGRESS": "true", "EXAL2_LOG_LEVEL": "ERROR"}
        with patch.dict(os.environ, env), patch.dict(config):
            apply_environment()
            self.assertEqual(config["max_candidates"], 99)
            self.assertTrue(config["progress"])
            self.assertEqual(config["log_level"], "ERROR")

    def test_ring_verb(self):
        """Test the ring verb on Z/4"""
        self.assertEqual(run(["--format", "jsonl", "ring", "--name", "Z4"], self.stream), 0)
        rows = {row["check"]: row["value"] for row in self._jsonl()}
        self.assertEqual(rows["order"], 4)
        self.assertEqual(rows["characteristic"], 4)
        self.assertEqual(rows["units"], 2)
        self.assertEqual(rows["nilpotents"], 2)

    def test_ring_verb_text(self):
        """Test the text report of the ring verb"""
        self.assertEqual(run(["ring", "--name", "F4"], self.stream), 0)
        self.assertIn("characteristic", self.stream.getvalue())

    @patch("sys.stderr", new_callable=io.StringIO)
    def test_usage_errors(self, stderr):
        """Test usage errors exit with code 2"""
        self.assertEqual(run(["ring", "--name", "nope"], self.stream), 2)
        self.assertEqual(run(["bogus"], self.stream), 2)
        self.assertEqual(run(["invert"], self.stream), 2)
        self.assertEqual(run(["split2", "--fixture", "nope"], self.stream), 2)
        self.assertEqual(run(["--fixtures", os.path.join(config["fixtures_dir"], "missing"), "split2"], self.stream), 2)

    def test_violation_is_reported(self):
        """Test a raised violation becomes a failing record"""
        failing = Mock(side_effect=AxiomViolation("associativity", (1, 2, 3)))
        with patch.dict(VERBS, {"ring": failing}):
            code = run(["--format", "jsonl", "ring", "--name", "Z4"], self.stream)
        self.assertEqual(code, 1)
        row = self._jsonl()[0]
        self.assertEqual(row["subject"], "AxiomViolation")
        self.assertFalse(row["passed"])

    def test_kernel_witness_verb(self):
        """Test the kernel-witness verb"""
        self.assertEqual(run(["--format", "jsonl", "kernel-witness"], self.stream), 0)
        witnesses = [row["witness"] for row in self._jsonl() if row["witness"]]
        self.assertTrue(witnesses[0].startswith("(0, "))

    def test_equalizer_check_verb(self):
        """Test the equalizer-check verb"""
        self.assertEqual(run(["--format", "jsonl", "equalizer-check", "--degree", "1"], self.stream), 0)
        subjects = {row["subject"] for row in self._jsonl()}
        self.assertIn("identity vs swap, degree 1", subjects)

    def test_obstruct_verb(self):
        """Test the obstruct verb agrees with the fixture expectations"""
        self.assertEqual(run(["--format", "jsonl", "obstruct"], self.stream), 0)
        rows = {row["subject"]: row["value"] for row in self._jsonl()}
        self.assertFalse(rows["t_cubed_over_residue"])
        self.assertTrue(rows["z4_over_z2_dual_numbers"])

    def test_split2_verb(self):
        """Test the split2 verb on the trivial fixture"""
        self.assertEqual(run(["--format", "jsonl", "split2", "--fixture", "trivial"], self.stream), 0)
        self.assertTrue(self._jsonl()[0]["value"])

    def test_tfun_compare(self):
        """Test tfun --compare on the dual numbers"""
        self.assertEqual(run(["--format", "jsonl", "tfun", "--presentation", "dual", "--compare"], self.stream), 0)
        self.assertTrue(all(row["passed"] for row in self._jsonl()))

    def test_census_too_large(self):
        """Test census bounds above max_ring_order fail"""
        self.assertEqual(run(["census", "--max-b", "200", "--max-m", "2"], self.stream), 1)
        self.assertIn("TooLarge", self.stream.getvalue())

    def test_census_small(self):
        """Test census over rings of order at most 2"""
        self.assertEqual(run(["--format", "jsonl", "census", "--max-b", "2", "--max-m", "2"], self.stream), 0)
        rows = self._jsonl()
        pairs = {row["subject"] for row in rows if "->" not in row["subject"]}
        self.assertEqual(pairs, {"Z2 | F2#0"})
        checks = {row["check"] for row in rows if row["subject"] == "Z2 | F2#0"}
        self.assertIn("exal2 order", checks)
        self.assertIn("exal2 bound |N|, |R|", checks)
        problems = {row["subject"] for row in rows if "->" in row["subject"]}
        self.assertEqual(len(problems), 4)
        self.assertEqual(sum(p.startswith("Z4/(") for p in problems), 2)
        theorem = [row for row in rows if row["check"] == "existence iff vanishing"]
        self.assertEqual(len(theorem), 4)
        self.assertTrue(all(row["passed"] for row in rows))

    @patch("exal2.main.verify_deformation_theorem")
    def test_census_reports_failed_theorem(self, verify):
        """Test census marks a problem whose deformation theorem check fails"""
        verify.return_value = dict(exists=True, vanishes=False, existence_iff_vanishing=False, torsor=True, automorphisms=True, deformations=1, exal=1, derivations=1)
        self.assertEqual(run(["--format", "jsonl", "census", "--max-b", "2", "--max-m", "2"], self.stream), 1)
        failed = [row for row in self._jsonl() if not row["passed"]]
        self.assertEqual({row["check"] for row in failed}, {"existence iff vanishing"})
        self.assertEqual(verify.call_count, 4)

    def test_exal2_verb(self):
        """Test the exal2 verb reports the middle-term bound"""
        self.assertEqual(run(["--format", "jsonl", "exal2", "--ring", "F2[x]/(x^2)"], self.stream), 0)
        rows = {row["check"]: row["value"] for row in self._jsonl()}
        self.assertEqual(rows["exal order"], 2)
        bound = json.loads(rows["bound |N|, |R|"])
        self.assertEqual(len(bound), 2)
        self.assertGreaterEqual(bound[1], 4)


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
