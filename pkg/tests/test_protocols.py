import dataclasses
import math
import unittest
from unittest import mock

import numpy as np

from dimer.config import parse_config
from dimer.model import DEFAULT_PARAMS, DriveParams, ParameterError
from dimer.operators import QubitState
from dimer.protocols import (LINALG_ERROR_CODE, NoRootError,
                             ProtocolTarget, SweepCell, dark_state_demo,
                             dark_state_drive, fit_ridge, hierarchy_rates,
                             hierarchy_window, optimal_curve,
                             optimal_drive_frequency, resonance_frequency,
                             ridge, ridge_span, sweep)
from dimer.rates import Mode, transition_rates
from dimer.spectrum import effective_spectrum
from dimer.steadystate import solve_ness

TMINUS, T0, S, TPLUS = QubitState

SINGLET = ProtocolTarget.SINGLET
TRIPLET0 = ProtocolTarget.TRIPLET0


def pump_rate(omega_d, epsilon_d=0.1, p=DEFAULT_PARAMS):
    d = DriveParams(epsilon_d, omega_d)
    e, spec, lams = effective_spectrum(p, d)
    return transition_rates(spec, lams, d, p).fluctuation[TMINUS, S]


def default_grid(target, omega_points=81, epsilon_points=11):
    cfg = parse_config("target = %s\nomega_d_points = %d\n"
                       "epsilon_d_points = %d\n"
                       % (target.value, omega_points, epsilon_points),
                       mode="sweep")
    return sweep(cfg.omega_d_axis(), cfg.epsilon_d_axis(), cfg.params,
                 cfg.target)


class testOptimalDriveFrequency(unittest.TestCase):
    def testSingletWeakDrive(self):
        omega_d = optimal_drive_frequency(SINGLET, 0.0, DEFAULT_PARAMS)

        self.assertAlmostEqual(6.5555, omega_d, delta=1e-6)
        self.assertAlmostEqual(13.1, 2 * omega_d, delta=0.02)

    def testTripletWeakDrive(self):
        singlet = optimal_drive_frequency(SINGLET, 0.0, DEFAULT_PARAMS)
        triplet = optimal_drive_frequency(TRIPLET0, 0.0, DEFAULT_PARAMS)

        self.assertAlmostEqual(6.4545, triplet, delta=1e-6)
        self.assertAlmostEqual(0.101, singlet - triplet, delta=1e-9)
        self.assertAlmostEqual(DEFAULT_PARAMS.J, singlet - triplet, delta=5e-3)

    def testResonanceResidual(self):
        omega_d = optimal_drive_frequency(SINGLET, 0.1, DEFAULT_PARAMS)
        e, spec, lams = effective_spectrum(DEFAULT_PARAMS,
                                           DriveParams(0.1, omega_d))

        residual = (omega_d - DEFAULT_PARAMS.omega_c_plus
                    - (spec.energy(S) - spec.energy(TMINUS)))
        self.assertLess(abs(residual), 1e-10)

    def testDriveShiftsResonanceUp(self):
        weak = optimal_drive_frequency(SINGLET, 0.0, DEFAULT_PARAMS)
        strong = optimal_drive_frequency(SINGLET, 0.1, DEFAULT_PARAMS)
        self.assertGreater(strong, weak)

    def testNoRoot(self):
        with self.assertRaises(NoRootError):
            resonance_frequency(DEFAULT_PARAMS, 0.1, Mode.ASYMMETRIC, S,
                                center=8.0)

    def testRateMaximum(self):
        omega_d = optimal_drive_frequency(SINGLET, 0.1, DEFAULT_PARAMS)
        best = pump_rate(omega_d)

        for w in np.linspace(omega_d - 3e-4, omega_d + 3e-4, 61):
            self.assertLessEqual(pump_rate(w), 1.01 * best)

    def testOutsideWindow(self):
        with self.assertLogs("dimer", "WARNING") as logs:
            optimal_drive_frequency(SINGLET, 0.01, DEFAULT_PARAMS)
        self.assertIn("outside the cooling window", logs.output[0])


class testHierarchyWindow(unittest.TestCase):
    def testUnitMargin(self):
        window = hierarchy_window(DEFAULT_PARAMS, SINGLET, margin=1)

        self.assertFalse(window.empty)
        self.assertAlmostEqual(0.042, window.epsilon_min, delta=0.005)
        self.assertAlmostEqual(0.267, window.epsilon_max, delta=0.03)

        pump, _, _ = hierarchy_rates(DEFAULT_PARAMS, SINGLET,
                                     window.epsilon_min)
        _, leak, _ = hierarchy_rates(DEFAULT_PARAMS, SINGLET,
                                     window.epsilon_max)
        self.assertAlmostEqual(1.0, pump / DEFAULT_PARAMS.gamma, delta=1e-6)
        self.assertAlmostEqual(1.0, leak / DEFAULT_PARAMS.gamma, delta=1e-6)

    def testMarginNarrows(self):
        wide = hierarchy_window(DEFAULT_PARAMS, SINGLET, margin=1)
        narrow = hierarchy_window(DEFAULT_PARAMS, SINGLET)

        self.assertFalse(narrow.empty)
        self.assertGreater(narrow.epsilon_min, wide.epsilon_min)
        self.assertLess(narrow.epsilon_max, wide.epsilon_max)

    def testUnreachable(self):
        p = dataclasses.replace(DEFAULT_PARAMS, gamma=1.0)
        self.assertTrue(hierarchy_window(p, SINGLET).empty)

    def testQuarticScaling(self):
        p = dataclasses.replace(DEFAULT_PARAMS,
                                gamma=16 * DEFAULT_PARAMS.gamma)
        base = hierarchy_window(DEFAULT_PARAMS, SINGLET, margin=1)
        raised = hierarchy_window(p, SINGLET, margin=1)

        self.assertAlmostEqual(2.0, raised.epsilon_min / base.epsilon_min,
                               delta=0.15)

    def testInteriorOptimal(self):
        window = hierarchy_window(DEFAULT_PARAMS, SINGLET)

        def fidelity(epsilon_d):
            omega_d = optimal_drive_frequency(SINGLET, epsilon_d,
                                              DEFAULT_PARAMS, warn=False)
            return solve_ness(DEFAULT_PARAMS,
                              DriveParams(epsilon_d, omega_d)).populations[S]

        middle = math.sqrt(window.epsilon_min * window.epsilon_max)
        self.assertGreater(fidelity(middle), fidelity(window.epsilon_min))
        self.assertGreater(fidelity(middle), fidelity(window.epsilon_max))

    def testBadMargin(self):
        with self.assertRaises(ParameterError):
            hierarchy_window(DEFAULT_PARAMS, SINGLET, margin=0.5)


class testSweep(unittest.TestCase):
    def testSinglePoint(self):
        omega_d = optimal_drive_frequency(SINGLET, 0.1, DEFAULT_PARAMS)
        grid = sweep([omega_d], [0.1], DEFAULT_PARAMS, SINGLET)
        direct = solve_ness(DEFAULT_PARAMS, DriveParams(0.1, omega_d))

        self.assertEqual(((SweepCell.from_solution(direct),),), grid.cells)
        self.assertEqual(0, grid.cells[0][0].error_code)

    def testShape(self):
        omegas = [6.50, 6.53, 6.56, 6.59]
        epsilons = [0.05, 0.1]
        grid = sweep(omegas, epsilons, DEFAULT_PARAMS, SINGLET)

        self.assertEqual(2, len(grid.cells))
        self.assertEqual(8, len(list(grid.rows())))
        cell = grid.cells[1][2]
        self.assertEqual((6.56, 0.1), (cell.omega_d, cell.epsilon_d))

    def testDeterministic(self):
        axes = ([6.55, 6.5555, 6.56], [0.05, 0.1])
        first = sweep(*axes, DEFAULT_PARAMS, SINGLET)
        second = sweep(*axes, DEFAULT_PARAMS, SINGLET)
        self.assertEqual(first, second)

    def testWorkers(self):
        axes = ([6.55, 6.5555, 6.56], [0.05, 0.1])
        serial = sweep(*axes, DEFAULT_PARAMS, SINGLET)
        pooled = sweep(*axes, DEFAULT_PARAMS, SINGLET, workers=2)
        self.assertEqual(serial.cells, pooled.cells)

    def testFailedCell(self):
        grid = sweep([7.01], [0.0], DEFAULT_PARAMS, SINGLET)
        cell = grid.cells[0][0]

        self.assertEqual(2, cell.error_code)
        self.assertTrue(math.isnan(cell.n_S))
        self.assertFalse(cell.hierarchy_ok)
        self.assertEqual([], ridge(grid))
        with self.assertRaises(ParameterError):
            fit_ridge(grid)

    def testBadAxes(self):
        with self.assertRaises(ParameterError):
            sweep([6.56, 6.55], [0.1], DEFAULT_PARAMS, SINGLET)
        with self.assertRaises(ParameterError):
            sweep([6.55], [], DEFAULT_PARAMS, SINGLET)
        with self.assertRaises(ParameterError):
            sweep([6.55], [-0.1], DEFAULT_PARAMS, SINGLET)

    def testLinAlgErrorCell(self):
        failure = np.linalg.LinAlgError("singular matrix")
        with mock.patch("dimer.protocols.solve_ness", side_effect=failure):
            with self.assertLogs("dimer", "WARNING"):
                grid = sweep([6.5555], [0.1], DEFAULT_PARAMS, SINGLET)
        cell = grid.cells[0][0]

        self.assertEqual(LINALG_ERROR_CODE, cell.error_code)
        self.assertTrue(math.isnan(cell.n_S))

    def testParabolicRidge(self):
        grid = default_grid(SINGLET)
        fit = fit_ridge(grid)

        self.assertEqual(11, len(ridge(grid)))
        self.assertLess(fit.relative_residual, 0.05)
        self.assertGreater(fit.coefficients[0], 0)

    def testTripletRidgeOffset(self):
        singlet = ridge(default_grid(SINGLET, 41, 5))
        triplet = ridge(default_grid(TRIPLET0, 41, 5))

        self.assertEqual(5, len(singlet))
        self.assertEqual(5, len(triplet))
        offset = np.mean([s[1] - t[1] for s, t in zip(singlet, triplet)])
        self.assertAlmostEqual(DEFAULT_PARAMS.J, offset, delta=0.005)

    def testCellFidelity(self):
        grid = sweep([6.5555], [0.1], DEFAULT_PARAMS, TRIPLET0)
        cell = grid.cells[0][0]
        self.assertEqual(cell.fid_T0_bare, cell.fidelity(TRIPLET0))
        self.assertEqual(cell.fid_S_bare, cell.fidelity(SINGLET))


class testRidgeSpan(unittest.TestCase):
    def testBracketsOptimum(self):
        lo, hi = ridge_span(DEFAULT_PARAMS, SINGLET, 0.02, 0.12)

        for eps in (0.0, 0.02, 0.07, 0.12):
            omega_d = optimal_drive_frequency(SINGLET, eps, DEFAULT_PARAMS,
                                              warn=False)
            self.assertLess(lo, omega_d)
            self.assertGreater(hi, omega_d)
        self.assertLess(hi - lo, 0.01)

    def testUndrivenWidth(self):
        lo, hi = ridge_span(DEFAULT_PARAMS, TRIPLET0, 0.0, 0.0)

        self.assertAlmostEqual(6.4545, (lo + hi) / 2, delta=1e-4)
        self.assertAlmostEqual(DEFAULT_PARAMS.kappa / 2, hi - lo, places=12)


class testOptimalCurve(unittest.TestCase):
    def testFollowsRidge(self):
        grid = default_grid(SINGLET)
        curve = optimal_curve(SINGLET, grid.epsilon_d_axis, DEFAULT_PARAMS)

        self.assertEqual(len(grid.epsilon_d_axis), len(curve))
        for (eps, omega_d), cell in zip(ridge(grid), curve):
            self.assertEqual(eps, cell.epsilon_d)
            self.assertEqual(0, cell.error_code)
            self.assertAlmostEqual(omega_d, cell.omega_d,
                                   delta=DEFAULT_PARAMS.kappa)

    def testTripletOffset(self):
        epsilons = [0.02, 0.07, 0.12]
        singlet = optimal_curve(SINGLET, epsilons, DEFAULT_PARAMS)
        triplet = optimal_curve(TRIPLET0, epsilons, DEFAULT_PARAMS)

        for s, t in zip(singlet, triplet):
            self.assertAlmostEqual(DEFAULT_PARAMS.J, s.omega_d - t.omega_d,
                                   delta=0.005)
        self.assertGreater(singlet[-1].n_S, 0.8)
        self.assertGreater(triplet[-1].fid_T0_bare, singlet[-1].fid_T0_bare)

    def testNoRoot(self):
        failure = NoRootError("no resonance")
        with mock.patch("dimer.protocols.optimal_drive_frequency",
                        side_effect=failure):
            with self.assertLogs("dimer", "WARNING"):
                curve = optimal_curve(SINGLET, [0.1], DEFAULT_PARAMS)

        self.assertTrue(math.isnan(curve[0].omega_d))
        self.assertEqual(NoRootError.code, curve[0].error_code)


class testDarkState(unittest.TestCase):
    def testDarkDrive(self):
        omega_d = dark_state_drive(DEFAULT_PARAMS, 0.1)
        e, spec, lams = effective_spectrum(DEFAULT_PARAMS,
                                           DriveParams(0.1, omega_d))

        self.assertAlmostEqual(
            omega_d, DEFAULT_PARAMS.omega_c_minus + spec.energy(S)
            - spec.energy(T0), delta=1e-10)

    def testDark(self):
        sol = dark_state_demo(DEFAULT_PARAMS, 0.1)

        self.assertGreaterEqual(sol.populations[TMINUS], 0.99)
        self.assertLess(sol.fidelity_singlet, 0.05)

    def testUndriven(self):
        sol = dark_state_demo(DEFAULT_PARAMS, 0.0)
        self.assertGreaterEqual(sol.populations[TMINUS], 0.99)

if __name__ == '__main__':
    unittest.main()
