"""
Tests for the management commands and their exit codes.
"""

import copy
import csv
import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings

from scattering.serializers import load_solution

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SMALL = {
    "scene": {"regions": ["unit_square"]},
    "wavenumber": 20.0,
    "boundary": {"mode": "scattering", "kind": {"type": "plane_wave", "angle": -2.6179938779914944}},
    "params": {"poles_per_corner": 20, "samples_per_corner_side": 60},
}


def read_rows(path):
    with Path(path).open(newline="") as handle:
        return list(csv.reader(handle))


@override_settings(LIGHTNING_PROFILE_POINTS=16)
class CommandTestCase(SimpleTestCase):
    """Test each command end to end on a small configuration."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.config = self.write_config(SMALL)

    def write_config(self, data, name="problem.json"):
        path = self.dir / name
        path.write_text(json.dumps(data))
        return str(path)

    def call(self, *args):
        out = StringIO()
        call_command(*args, stdout=out)
        return out.getvalue()

    def test_solve(self):
        """Test solve writes a loadable solution and prints diagnostics."""
        target = self.dir / "solution.json"
        output = self.call("solve", self.config, "-o", str(target))
        for key in ("rows=", "cols=", "residual=", "max_error=", "dropped_poles=", "time="):
            self.assertIn(key, output)
        solution = load_solution(target)
        self.assertEqual(solution.diagnostics.cols, 8 * 20 + 21)
        self.assertEqual(solution.config["wavenumber"], 20.0)

    def test_sweep(self):
        """Test an 11-value rate sweep writes 11 rows."""
        target = self.dir / "sweep.csv"
        self.call("sweep", self.config, "--param", "pole_rate", "--values", "0.1:3.1:0.3", "--points", "8", "-o", str(target))
        rows = read_rows(target)
        self.assertEqual(len(rows), 12)
        self.assertEqual([float(row[1]) for row in rows[1:3]], [0.1, 0.4])

    def test_sweep_grid(self):
        """Test a two-parameter sweep writes one row per pair and reports the best per value."""
        target = self.dir / "grid.csv"
        output = self.call(
            "sweep", self.config, "--param", "sample_exponent", "--values", "2,4", "--param2", "pole_rate", "--values2", "1.5,2", "--points", "8", "-o", str(target)
        )
        rows = read_rows(target)
        self.assertEqual(rows[0][:4], ["parameter", "value", "parameter_2", "value_2"])
        self.assertEqual(len(rows), 5)
        self.assertEqual(output.count("best pole_rate="), 2)

    def test_profile_from_solution(self):
        """Test profile accepts a saved solution with its embedded configuration."""
        solution = self.dir / "solution.json"
        self.call("solve", self.config, "-o", str(solution))
        target = self.dir / "profile.csv"
        output = self.call("profile", str(solution), "--points", "16", "-o", str(target))
        rows = read_rows(target)
        self.assertEqual(rows[0], ["index", "x", "y", "error"])
        self.assertIn(f"points={len(rows) - 1}", output)

    def test_field_csv(self):
        """Test field writes nx * ny rows plus the header."""
        target = self.dir / "field.csv"
        self.call("field", self.config, "--bounds", "-1,2,-1,2", "--nx", "15", "--ny", "10", "-o", str(target))
        self.assertEqual(len(read_rows(target)), 15 * 10 + 1)

    def test_render(self):
        """Test render writes a PPM of the requested size."""
        target = self.dir / "field.ppm"
        self.call("render", self.config, "--nx", "20", "--ny", "12", "--part", "abs", "-o", str(target))
        header = b"P6\n20 12\n255\n"
        data = target.read_bytes()
        self.assertTrue(data.startswith(header))
        self.assertEqual(len(data), len(header) + 20 * 12 * 3)

    def test_render_from_solution_matches_fresh_solve(self):
        """Test a PPM rendered from a saved solution is byte-identical to one from the configuration."""
        solution = self.dir / "solution.json"
        self.call("solve", self.config, "-o", str(solution))
        fresh, persisted = self.dir / "fresh.ppm", self.dir / "persisted.ppm"
        self.call("render", self.config, "--nx", "24", "--ny", "16", "--part", "re", "-o", str(fresh))
        self.call("render", str(solution), "--nx", "24", "--ny", "16", "--part", "re", "-o", str(persisted))
        self.assertEqual(fresh.read_bytes(), persisted.read_bytes())

    def test_convergence(self):
        """Test convergence writes one row per pole count."""
        target = self.dir / "convergence.csv"
        output = self.call("convergence", self.config, "--poles", "10,15,20,25", "--points", "8", "-o", str(target))
        self.assertEqual(len(read_rows(target)), 5)
        self.assertIn("slope=", output)

    def test_shadow(self):
        """Test shadow samples the default distance range from corner 0:3."""
        target = self.dir / "shadow.csv"
        self.call("shadow", self.config, "-o", str(target))
        rows = read_rows(target)
        self.assertEqual(rows[0], ["distance", "x", "y", "re", "im", "abs"])
        self.assertEqual(len(rows), 12)


class ExitCodeTestCase(SimpleTestCase):
    """Test usage errors exit 1 and numerical failures exit 2."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def assertReturnCode(self, code, *args):
        with self.assertRaises(CommandError) as ctx:
            call_command(*args, stdout=StringIO())
        self.assertEqual(ctx.exception.returncode, code)

    def test_missing_file(self):
        """Test a missing configuration file is a usage error."""
        self.assertReturnCode(1, "solve", str(self.dir / "missing.json"), "-o", str(self.dir / "out.json"))

    def test_unknown_key(self):
        """Test a configuration with an unknown key is a usage error."""
        path = self.dir / "bad.json"
        path.write_text(json.dumps({**SMALL, "colour": "blue"}))
        self.assertReturnCode(1, "solve", str(path), "-o", str(self.dir / "out.json"))

    def test_missing_argument(self):
        """Test a missing required option is a usage error."""
        path = self.dir / "problem.json"
        path.write_text(json.dumps(SMALL))
        self.assertReturnCode(1, "solve", str(path))

    def test_bad_values(self):
        """Test an unparsable sweep range is a usage error."""
        path = self.dir / "problem.json"
        path.write_text(json.dumps(SMALL))
        self.assertReturnCode(1, "sweep", str(path), "--param", "pole_rate", "--values", "1:2", "-o", str(self.dir / "s.csv"))

    def test_placement_failure(self):
        """Test poles placed on the boundary are a numerical failure."""
        path = self.dir / "problem.json"
        path.write_text(json.dumps({**SMALL, "params": {"poles_per_corner": 5, "samples_per_corner_side": 20, "length_fraction": 1.0}}))
        self.assertReturnCode(2, "solve", str(path), "-o", str(self.dir / "out.json"))

    def test_fractional_integer_sweep_value(self):
        """Test a fractional Runge degree in a sweep is a usage error."""
        path = self.dir / "problem.json"
        path.write_text(json.dumps(SMALL))
        self.assertReturnCode(1, "sweep", str(path), "--param", "runge_degree", "--values", "2.5", "-o", str(self.dir / "s.csv"))

    def test_out_of_range_sweep_value(self):
        """Test a zero Newman order in a sweep is a usage error."""
        path = self.dir / "problem.json"
        path.write_text(json.dumps(SMALL))
        self.assertReturnCode(1, "sweep", str(path), "--param", "newman_order", "--values", "0", "-o", str(self.dir / "s.csv"))
        self.assertReturnCode(
            1, "sweep", str(path), "--param", "pole_rate", "--values", "1,2", "--param2", "newman_order", "--values2", "1,0", "-o", str(self.dir / "s.csv")
        )

    def test_mistyped_key_in_every_fixture(self):
        """Test renaming any top-level or params key of a bundled configuration is a usage error."""
        for fixture in sorted(FIXTURES.glob("*.json")):
            data = json.loads(fixture.read_text())
            mutations = [(None, key) for key in data] + [("params", key) for key in data.get("params", {})]
            for section, key in mutations:
                mutated = copy.deepcopy(data)
                target = mutated if section is None else mutated[section]
                target[f"{key}_x"] = target.pop(key)
                path = self.dir / fixture.name
                path.write_text(json.dumps(mutated))
                with self.subTest(fixture=fixture.name, key=key):
                    self.assertReturnCode(1, "solve", str(path), "-o", str(self.dir / "out.json"))
