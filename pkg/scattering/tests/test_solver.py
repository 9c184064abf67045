"""
Tests for basis evaluation, least squares, the solve pipeline and incident fields.
"""

import numpy as np
from django.test import SimpleTestCase

from scattering.exceptions import BasisEvaluationError, LeastSquaresError, ProblemError
from scattering.geometry import Scene, unit_square
from scattering.placement import place_poles, place_samples, recommended_rate
from scattering.solver import (
    BasisSpec,
    Diagnostics,
    InteriorSource,
    PlacementParams,
    PlaneWave,
    PointSource,
    Problem,
    Solution,
    Zero,
    assemble,
    basis_eval,
    basis_matrix,
    evaluate,
    incident_field,
    solve,
    solve_ls,
)
from scattering.specialfn import hankel1

BENCHMARK_ANGLE = -5 * np.pi / 6


def square_problem(incident=None, mode="direct", **params):
    params.setdefault("poles_per_corner", 30)
    params.setdefault("samples_per_corner_side", 100)
    return Problem(
        scene=Scene.from_regions([unit_square()]),
        wavenumber=20.0,
        incident=incident or PlaneWave(BENCHMARK_ANGLE),
        mode=mode,
        params=PlacementParams(**params),
    )


def normal_equations_oracle(a, b):
    """Brute-force normal equations with two rounds of iterative refinement."""
    gram = a.conj().T @ a
    x = np.linalg.solve(gram, a.conj().T @ b)
    for _ in range(2):
        x = x + np.linalg.solve(gram, a.conj().T @ (b - a @ x))
    return x


class BasisTestCase(SimpleTestCase):
    """Test basis_eval and basis_matrix."""

    def test_column_count_formula(self):
        """Test the column count for several basis shapes."""
        for m, n2, negative in [(1, 20, False), (2, 20, False), (3, 0, True), (1, 5, True)]:
            basis = BasisSpec(m, n2, negative)
            poles = np.linspace(0.1, 0.9, 7) + 0.5j
            centres = np.array([0.5 + 0.5j, 0.4 + 0.6j])
            matrix = basis_matrix(basis, 20.0, [3 + 0j, 2 + 2j], poles, centres)
            runge = 2 * n2 + 1 if negative else n2 + 1
            self.assertEqual(matrix.shape, (2, (m + 1) * 7 + runge * 2))
            self.assertEqual(basis.column_count(7, 2), (m + 1) * 7 + runge * 2)

    def test_single_pole_on_axes(self):
        """Test direction factors on the real and imaginary axes."""
        basis = BasisSpec(1, 0)
        r, k = 0.7, 20.0
        on_real = basis_matrix(basis, k, [r], [0j], [])[0]
        self.assertEqual(on_real[0], hankel1(0, k * r))
        self.assertEqual(on_real[1], hankel1(1, k * r))
        on_imag = basis_matrix(basis, k, [1j * r], [0j], [])[0]
        self.assertAlmostEqual(on_imag[1], hankel1(1, k * r) * 1j, delta=1e-15 * abs(hankel1(1, k * r)))

    def test_shifted_pole(self):
        """Test columns for a pole at 0.5+0.5i evaluated at 2."""
        basis = BasisSpec(2, 0)
        row = basis_eval(basis, 20.0, 2 + 0j, [0.5 + 0.5j], [0.5 + 0.5j])
        offset = 1.5 - 0.5j
        for n in range(3):
            expected = hankel1(n, 20.0 * abs(offset)) * (offset / abs(offset)) ** n
            self.assertAlmostEqual(row[n], expected, delta=1e-13 * abs(expected))
        self.assertAlmostEqual(row[3], hankel1(0, 20.0 * abs(offset)), delta=1e-15)

    def test_negative_runge_orders(self):
        """Test negative orders use the conjugate direction factor."""
        basis = BasisSpec(1, 2, include_negative_runge=True)
        row = basis_eval(basis, 10.0, 1 + 1j, [], [0j])
        phase = (1 + 1j) / abs(1 + 1j)
        x = 10.0 * abs(1 + 1j)
        expected = [hankel1(0, x), hankel1(1, x) * phase, hankel1(2, x) * phase**2, hankel1(1, x) / phase, hankel1(2, x) / phase**2]
        for got, want in zip(row, expected):
            self.assertAlmostEqual(got, want, delta=1e-13)

    def test_singular_point(self):
        """Test evaluation on top of a pole raises."""
        with self.assertRaises(BasisEvaluationError):
            basis_eval(BasisSpec(), 20.0, 0.25 + 0.25j, [0.25 + 0.25j], [0.5 + 0.5j])

    def test_basis_spec_limits(self):
        """Test invalid orders are rejected."""
        with self.assertRaises(ProblemError):
            BasisSpec(newman_order=0)
        with self.assertRaises(ProblemError):
            BasisSpec(runge_degree=65)


class AssembleTestCase(SimpleTestCase):
    """Test assemble."""

    def test_zero_data(self):
        """Test zero boundary data gives a zero right-hand side."""
        problem = square_problem(Zero())
        poles = place_poles(problem.scene, 10, 2.0)
        samples = place_samples(problem.scene, 20, 4.0)
        _, rhs = assemble(problem, poles, samples)
        self.assertTrue(np.all(rhs == 0))

    def test_default_square_shape(self):
        """Test the default square system is 1596 x 661."""
        problem = square_problem(poles_per_corner=80, samples_per_corner_side=200)
        poles = place_poles(problem.scene, 80, recommended_rate(80))
        samples = place_samples(problem.scene, 200, 4.0)
        matrix, rhs = assemble(problem, poles, samples)
        self.assertEqual(matrix.shape, (1596, 661))
        self.assertEqual(rhs.shape, (1596,))

    def test_underdetermined_warns(self):
        """Test fewer rows than columns logs a warning instead of failing."""
        problem = square_problem()
        poles = place_poles(problem.scene, 40, 2.0)
        samples = place_samples(problem.scene, 4, 4.0)
        with self.assertLogs("scattering.solver", level="WARNING"):
            matrix, _ = assemble(problem, poles, samples)
        self.assertLess(matrix.shape[0], matrix.shape[1])


class LeastSquaresTestCase(SimpleTestCase):
    """Test solve_ls."""

    def test_homogeneous(self):
        """Test b = 0 gives zero coefficients and zero residual."""
        a = np.random.default_rng(1).standard_normal((30, 10)) + 0j
        result = solve_ls(a, np.zeros(30))
        self.assertTrue(np.all(result.coefficients == 0))
        self.assertEqual(result.residual, 0.0)

    def test_consistent_system(self):
        """Test b = 3.7 times the first column recovers that coefficient."""
        rng = np.random.default_rng(2)
        a = rng.standard_normal((50, 20)) + 1j * rng.standard_normal((50, 20))
        b = 3.7 * a[:, 0]
        result = solve_ls(a, b)
        self.assertAlmostEqual(result.coefficients[0], 3.7, delta=1e-12)
        self.assertLess(np.max(np.abs(result.coefficients[1:])), 1e-12)
        self.assertLessEqual(result.residual, 1e-12 * np.linalg.norm(b))
        self.assertEqual(result.rank, 20)

    def test_random_systems_match_oracle(self):
        """Test 20 random systems against normal equations with refinement."""
        rng = np.random.default_rng(3)
        for _ in range(20):
            rows = int(rng.integers(20, 81))
            cols = int(rng.integers(5, min(rows - 10, 50) + 1))
            a = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
            b = rng.standard_normal(rows) + 1j * rng.standard_normal(rows)
            result = solve_ls(a, b)
            x = normal_equations_oracle(a, b)
            oracle_residual = np.linalg.norm(a @ x - b)
            self.assertLessEqual(abs(result.residual - oracle_residual), 1e-8 * oracle_residual)
            self.assertLessEqual(np.linalg.norm(result.coefficients - x), 1e-8 * np.linalg.norm(x))

    def test_rank_deficient_minimum_norm(self):
        """Test duplicated columns split the coefficient evenly."""
        rng = np.random.default_rng(4)
        column = rng.standard_normal(40) + 0j
        a = np.column_stack([column, column])
        result = solve_ls(a, 2.0 * column)
        self.assertEqual(result.rank, 1)
        self.assertAlmostEqual(result.coefficients[0], 1.0, delta=1e-12)
        self.assertAlmostEqual(result.coefficients[1], 1.0, delta=1e-12)

    def test_non_finite(self):
        """Test NaN entries raise."""
        a = np.ones((4, 2), dtype=complex)
        a[0, 0] = np.nan
        with self.assertRaises(LeastSquaresError):
            solve_ls(a, np.ones(4))


class SolveTestCase(SimpleTestCase):
    """Test the solve pipeline and evaluate."""

    def test_manufactured_solution(self):
        """Test a radiating datum from the centroid is reproduced away from the obstacle."""
        centre = 0.5 + 0.5j
        problem = square_problem(InteriorSource(centre), poles_per_corner=80, samples_per_corner_side=200)
        solution = solve(problem)
        value = evaluate(solution, [2 + 2j])[0]
        self.assertAlmostEqual(value, hankel1(0, 20.0 * abs(2 + 2j - centre)), delta=1e-8)

    def test_zero_data(self):
        """Test zero data gives a zero field."""
        solution = solve(square_problem(Zero()))
        values = evaluate(solution, np.array([2 + 0j, -1 - 1j, 0.5 + 3j]))
        self.assertLessEqual(np.max(np.abs(values)), 1e-13)

    def test_single_coefficient(self):
        """Test one order-0 pole term with coefficient 1 is H_0."""
        solution = Solution(
            wavenumber=20.0,
            basis=BasisSpec(1, 0),
            poles=np.array([0.5 + 0.5j]),
            pole_corner_ids=((0, 0),),
            interior_points=np.array([], dtype=complex),
            coefficients=np.array([1.0 + 0j, 0j]),
            diagnostics=Diagnostics(0.0, 0, 2, 2, 1.0, 0),
        )
        value = evaluate(solution, [2.5 + 0.5j])[0]
        self.assertEqual(value, hankel1(0, 40.0) + 0j)

    def test_interior_points_are_masked(self):
        """Test points inside the obstacle come back as NaN, others are finite."""
        solution = solve(square_problem())
        values = evaluate(solution, np.array([0.5 + 0.5j, 1.5 + 0.5j]))
        self.assertTrue(np.isnan(values[0]))
        self.assertTrue(np.isfinite(values[1]))

    def test_chunking_does_not_change_results(self):
        """Test evaluation is bit-identical for different chunk sizes."""
        solution = solve(square_problem())
        points = np.random.default_rng(5).uniform(1.2, 3.0, 50) + 1j * np.random.default_rng(6).uniform(-2.0, 2.0, 50)
        self.assertTrue(np.array_equal(evaluate(solution, points), evaluate(solution, points, chunk_size=7)))

    def test_samples_reproduce_boundary_data(self):
        """Test pointwise errors at the training samples have 2-norm equal to the residual."""
        problem = square_problem()
        solution = solve(problem)
        samples = place_samples(problem.scene, 100, 4.0)
        errors = evaluate(solution, samples.locations) - problem.boundary_data(samples.locations)
        self.assertAlmostEqual(np.linalg.norm(errors), solution.diagnostics.residual, delta=1e-6 * max(solution.diagnostics.residual, 1e-12) + 1e-12)

    def test_helmholtz_residual(self):
        """Test a five-point Laplacian confirms the field solves the Helmholtz equation."""
        solution = solve(square_problem())
        h, k = 1e-4, 20.0
        for z in (1.8 + 0.3j, -0.9 + 1.7j, 0.5 - 1.2j):
            stencil = evaluate(solution, np.array([z, z + h, z - h, z + 1j * h, z - 1j * h]))
            laplacian = (stencil[1] + stencil[2] + stencil[3] + stencil[4] - 4 * stencil[0]) / h**2
            self.assertLessEqual(abs(laplacian + k**2 * stencil[0]), 1e-2 * k**2 * max(abs(stencil[0]), 1.0))

    def test_linearity_and_scaling(self):
        """Test coefficients are linear in the boundary data for a fixed matrix."""
        problem = square_problem()
        poles = place_poles(problem.scene, 30, recommended_rate(30))
        samples = place_samples(problem.scene, 100, 4.0)
        matrix, f1 = assemble(problem, poles, samples)
        f2 = PointSource(-1 + 2j)(20.0, samples.locations)
        x1 = solve_ls(matrix, f1).coefficients
        x2 = solve_ls(matrix, f2).coefficients
        x12 = solve_ls(matrix, f1 + f2).coefficients
        self.assertLessEqual(np.linalg.norm(x12 - (x1 + x2)), 1e-10 * (np.linalg.norm(x1) + np.linalg.norm(x2)))
        alpha = 2.5 - 1.5j
        scaled = solve_ls(matrix, alpha * f1).coefficients
        self.assertLessEqual(np.linalg.norm(scaled - alpha * x1), 1e-12 * abs(alpha) * np.linalg.norm(x1))

    def test_problem_validation(self):
        """Test bad wavenumbers, modes and rates are rejected."""
        with self.assertRaises(ProblemError):
            Problem(Scene.from_regions([unit_square()]), 0.0)
        with self.assertRaises(ProblemError):
            square_problem(mode="sideways")
        with self.assertRaises(ProblemError):
            PlacementParams(pole_rate="fast")

    def test_scattering_mode_negates_incident(self):
        """Test scattering mode imposes minus the incident field."""
        direct = square_problem(mode="direct")
        scattering = square_problem(mode="scattering")
        z = np.array([0.3 + 0j, 1 + 0.4j])
        self.assertTrue(np.array_equal(scattering.boundary_data(z), -direct.boundary_data(z)))


class IncidentFieldTestCase(SimpleTestCase):
    """Test incident_field."""

    def test_plane_wave(self):
        """Test unit modulus, the value at the origin and propagation along the real axis."""
        z = np.linspace(-3, 3, 13) + 0j
        values = incident_field(PlaneWave(0.0), 20.0, z)
        self.assertTrue(np.allclose(np.abs(values), 1.0, rtol=0, atol=1e-15))
        self.assertTrue(np.allclose(values, np.exp(-20j * z.real), rtol=0, atol=1e-13))
        self.assertEqual(incident_field(PlaneWave(BENCHMARK_ANGLE), 20.0, 0j), 1.0)

    def test_point_source(self):
        """Test a source at -1+2i seen from distance 1."""
        value = incident_field(PointSource(-1 + 2j), 20.0, np.array([-1 + 3j]))[0]
        self.assertEqual(value, hankel1(0, 20.0))

    def test_point_source_inside_rejected(self):
        """Test sources inside or on an obstacle are rejected."""
        with self.assertRaises(ProblemError):
            square_problem(PointSource(0.5 + 0.5j))
        with self.assertRaises(ProblemError):
            square_problem(PointSource(1 + 1j))
        with self.assertRaises(ProblemError):
            square_problem(InteriorSource(3 + 3j))

    def test_non_positive_wavenumber(self):
        """Test k <= 0 is rejected."""
        with self.assertRaises(ProblemError):
            incident_field(PlaneWave(0.0), 0.0, [0j])
