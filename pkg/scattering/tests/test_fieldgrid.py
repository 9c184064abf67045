"""
Tests for grid sampling and the PPM/CSV exporters.
"""

import csv
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from scattering.exceptions import ProblemError
from scattering.fieldgrid import FieldGrid, cell_centres, colour_map, sample_grid, write_csv, write_ppm
from scattering.geometry import Scene, unit_square
from scattering.solver import PlacementParams, PlaneWave, Problem, solve


class FieldGridTestCase(SimpleTestCase):
    """Test sampling solutions on grids and writing them out."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.problem = Problem(
            Scene.from_regions([unit_square()]),
            20.0,
            PlaneWave(-5 * math.pi / 6),
            mode="scattering",
            params=PlacementParams(30, samples_per_corner_side=100),
        )
        cls.solution = solve(cls.problem)

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)

    def test_cell_centres(self):
        """Test centres sit half a cell in from the bounds."""
        points = cell_centres((0.0, 4.0, -1.0, 1.0), 4, 2)
        self.assertEqual(points.shape, (2, 4))
        self.assertEqual(points[0, 0], 0.5 - 0.5j)
        self.assertEqual(points[1, 3], 3.5 + 0.5j)
        with self.assertRaises(ProblemError):
            cell_centres((1.0, 0.0, 0.0, 1.0), 4, 4)

    def test_ppm_pixels(self):
        """Test the colour map at zero, plus and minus vmax and on a masked cell."""
        grid = FieldGrid(
            bounds=(0.0, 2.0, 0.0, 2.0),
            nx=2,
            ny=2,
            values=np.array([[0.0, 1.0], [-1.0, np.nan]], dtype=complex),
            mask=np.array([[False, False], [False, True]]),
            component="scattered",
        )
        path = write_ppm(grid, "re", 1.0, self.dir / "grid.ppm")
        data = path.read_bytes()
        header = b"P6\n2 2\n255\n"
        self.assertTrue(data.startswith(header))
        self.assertEqual(len(data), len(header) + 2 * 2 * 3)
        pixels = list(data[len(header):])
        # Top row first: (-vmax, masked), then (0, +vmax).
        self.assertEqual(pixels, [0, 0, 255, 64, 64, 64, 128, 255, 128, 255, 0, 0])

    def test_ppm_size(self):
        """Test a sampled grid writes header plus 3 nx ny bytes."""
        grid = sample_grid(self.solution, self.problem, (-1.0, 2.0, -1.0, 2.0), 30, 20, "total")
        data = write_ppm(grid, "abs", path=self.dir / "field.ppm").read_bytes()
        header = b"P6\n30 20\n255\n"
        self.assertEqual(len(data), len(header) + 30 * 20 * 3)

    def test_csv_rows_and_mask(self):
        """Test one row per cell, masked cells inside the square and 17-digit values."""
        grid = sample_grid(self.solution, self.problem, (-1.0, 2.0, -1.0, 2.0), 12, 9, "scattered")
        path = write_csv(grid, self.dir / "field.csv")
        with path.open(newline="") as handle:
            rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ["x", "y", "re", "im", "mask"])
        self.assertEqual(len(rows), 12 * 9 + 1)
        body = rows[1:]
        self.assertEqual(sum(row[4] == "1" for row in body), int(grid.mask.sum()))
        self.assertGreater(grid.mask.sum(), 0)
        # x runs fastest.
        self.assertEqual(float(body[0][1]), float(body[11][1]))
        self.assertLess(float(body[0][0]), float(body[1][0]))
        for (j, i), row in zip(np.ndindex(9, 12), body):
            if row[4] == "0":
                self.assertEqual(complex(float(row[2]), float(row[3])), grid.values[j, i])
            else:
                self.assertEqual(row[2:4], ["", ""])

    def test_total_is_incident_plus_scattered(self):
        """Test the total component is the sum of the other two."""
        bounds = (-1.0, 2.0, -1.0, 2.0)
        total = sample_grid(self.solution, self.problem, bounds, 10, 10, "total")
        incident = sample_grid(self.solution, self.problem, bounds, 10, 10, "incident")
        scattered = sample_grid(self.solution, self.problem, bounds, 10, 10, "scattered")
        outside = ~total.mask
        self.assertTrue(np.allclose(total.values[outside], incident.values[outside] + scattered.values[outside], rtol=0, atol=1e-13))
        self.assertTrue(np.all(np.isnan(total.values[total.mask])))

    def test_fully_masked_grid(self):
        """Test a grid inside the obstacle writes only mask colour and empty CSV values."""
        grid = sample_grid(self.solution, self.problem, (0.2, 0.8, 0.2, 0.8), 4, 4, "total")
        self.assertTrue(grid.mask.all())
        data = write_ppm(grid, "re", path=self.dir / "masked.ppm").read_bytes()
        self.assertEqual(set(data[len(b"P6\n4 4\n255\n"):]), {64})
        with write_csv(grid, self.dir / "masked.csv").open(newline="") as handle:
            rows = list(csv.reader(handle))[1:]
        self.assertTrue(all(row[2:] == ["", "", "1"] for row in rows))

    def test_incident_needs_problem(self):
        """Test the incident component cannot be sampled from a bare solution."""
        with self.assertRaises(ProblemError):
            sample_grid(self.solution, None, (-1.0, 2.0, -1.0, 2.0), 4, 4, "incident")
        with self.assertRaises(ProblemError):
            sample_grid(self.solution, self.problem, (-1.0, 2.0, -1.0, 2.0), 4, 4, "phase")


class ColourMapTestCase(SimpleTestCase):
    """Test the diverging colour map."""

    def test_ramp_is_monotone(self):
        """Test red never falls and blue never rises over a 1000-value ramp from -vmax to vmax."""
        rgb = colour_map(np.linspace(-2.0, 2.0, 1000), "re", 2.0).astype(int)
        self.assertTrue(np.all(np.diff(rgb[:, 0]) >= 0))
        self.assertTrue(np.all(np.diff(rgb[:, 2]) <= 0))
        self.assertEqual(rgb[0].tolist(), [0, 0, 255])
        self.assertEqual(rgb[-1].tolist(), [255, 0, 0])

    def test_middle_is_white(self):
        """Test zero maps to white and values beyond vmax clip to the end colours."""
        rgb = colour_map(np.array([0.0, -5.0, 5.0]), "im", 1.0)
        self.assertEqual(rgb.tolist(), [[128, 255, 128], [0, 0, 255], [255, 0, 0]])

    def test_abs_part_spans_whole_scale(self):
        """Test magnitudes run from blue at zero to red at vmax."""
        rgb = colour_map(np.linspace(0.0, 3.0, 1000), "abs", 3.0).astype(int)
        self.assertTrue(np.all(np.diff(rgb[:, 0]) >= 0))
        self.assertTrue(np.all(np.diff(rgb[:, 2]) <= 0))
        self.assertEqual(rgb[0].tolist(), [0, 0, 255])
