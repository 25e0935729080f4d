import json
import os
import tempfile
import unittest
from exal2.utils.errors import FixtureError
from exal2.utils.read import (
    FixtureEnvelope,
    build_bundle,
    load_fixtures,
    merge_envelopes,
    read_envelope,
)


class ReadTestCase(unittest.TestCase):
    """Test suite for fixture reading"""

    maxDiff = None

    @classmethod
    def setUpClass(cls):
        cls.bundle = load_fixtures()

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, name, payload):
        path = os.path.join(self.tmp.name, name)
        with open(path, "w") as f:
            f.write(payload if isinstance(payload, str) else json.dumps(payload))
        return path

    def test_load_fixtures(self):
        """Test load_fixtures function on the packaged fixtures"""
        counts = {kind: len(getattr(self.bundle, kind)) for kind in ("rings", "modules", "maps", "two_extensions", "butterflies", "problems", "presentations", "frames")}
        self.assertEqual(
            counts,
            {"rings": 6, "modules": 5, "maps": 1, "two_extensions": 6, "butterflies": 2, "problems": 4, "presentations": 5, "frames": 3},
        )
        self.assertEqual(
            self.bundle.expectations,
            {"z4_over_z2_dual_numbers": False, "t_cubed_over_residue": True, "trivial": False, "z4_residue": False},
        )
        self.assertTrue(self.bundle.notes)

    def test_bundle_objects(self):
        """Test fixture objects are built with the expected shapes"""
        self.assertEqual(self.bundle.get("rings", "X4").order, 16)
        self.assertEqual(self.bundle.get("modules", "B8_res").order, 2)
        xi = self.bundle.get("two_extensions", "ideal_x4")
        self.assertEqual((xi.M.order, xi.N.order, xi.R.order, xi.B.order), (2, 4, 8, 4))
        frame = self.bundle.get("frames", "dual_over_dual")
        self.assertEqual(frame.v.table.tolist(), [0, 1, 2, 3])

    def test_get_unknown(self):
        """Test FixtureBundle.get raises on unknown names"""
        with self.assertRaises(FixtureError):
            self.bundle.get("rings", "Q")

    def test_read_envelope_errors(self):
        """Test read_envelope on unreadable and malformed files"""
        with self.assertRaises(FixtureError):
            read_envelope(os.path.join(self.tmp.name, "missing.json"))
        with self.assertRaises(FixtureError):
            read_envelope(self._write("broken.json", "{not json"))
        with self.assertRaises(FixtureError):
            read_envelope(self._write("schema.json", {"rings": {"F2": {"zmod": "two"}}}))

    def test_merge_duplicates(self):
        """Test merge_envelopes refuses duplicate names"""
        env = FixtureEnvelope.model_validate({"rings": {"F2": {"zmod": 2}}})
        with self.assertRaises(FixtureError):
            merge_envelopes([env, env])

    def test_build_bundle_unresolved(self):
        """Test build_bundle reports references that do not resolve"""
        env = FixtureEnvelope.model_validate({"modules": {"M": {"ring": "nowhere"}}})
        with self.assertRaises(FixtureError):
            build_bundle(env)

    def test_build_bundle_invalid_ideal(self):
        """Test build_bundle wraps library errors"""
        env = FixtureEnvelope.model_validate(
            {"rings": {"Z4": {"zmod": 4}}, "two_extensions": {"bad": {"kind": "ideal", "ring": "Z4", "J": [0, 1], "L": [0]}}}
        )
        with self.assertRaises(FixtureError):
            build_bundle(env)

    def test_load_fixtures_missing_directory(self):
        """Test load_fixtures on a missing directory"""
        with self.assertRaises(FixtureError):
            load_fixtures(os.path.join(self.tmp.name, "nowhere"))

    def test_load_fixtures_directory(self):
        """Test load_fixtures merges every file of a directory"""
        self._write("a.json", {"rings": {"F2": {"zmod": 2}}})
        self._write("b.json", {"modules": {"F2": {"ring": "F2"}}, "notes": ["b"]})
        bundle = load_fixtures(self.tmp.name)
        self.assertEqual(bundle.get("modules", "F2").order, 2)
        self.assertEqual(bundle.notes, ["b"])


if __name__ == "__main__":
    runner = unittest.TextTestRunner(verbosity=3)
    unittest.main(testRunner=runner)
