"""Raman cooling protocols: self-consistent optimal drive frequencies,
the drive-strength window in which cooling works, fidelity sweeps over
(ω_d, ε_d) and the dark-state counterexample."""

import concurrent.futures
import dataclasses
import enum
import logging
import math

import numpy as np
import scipy.optimize

from .instatrace import trace, trace_ms, trace_us
from .model import DimerError, DriveParams, ParameterError
from .operators import QubitState
from .rates import Mode, transition_rates
from .spectrum import ConvergenceError, effective_spectrum
from .steadystate import solve_ness

log = logging.getLogger("dimer")

TMINUS, T0, S, TPLUS = QubitState

BRACKET_HALF_WIDTH = 0.2
RESIDUAL_TOL = 1e-10
DEFAULT_MARGIN = 10.0

# ε_d range scanned for the hierarchy window
WINDOW_SCAN = (1e-3, 0.4)
WINDOW_POINTS = 41

# default sweep axes reach this fraction of the ridge's ω_d extent past
# both of its ends
RIDGE_PAD = 0.25

# error_code of a sweep cell whose linear algebra did not converge
LINALG_ERROR_CODE = 10


class NoRootError(DimerError):
    code = 6


class ProtocolTarget(enum.Enum):
    SINGLET = "singlet"
    TRIPLET0 = "triplet0"

    @property
    def mode(self):
        if self is ProtocolTarget.SINGLET:
            return Mode.ASYMMETRIC
        return Mode.SYMMETRIC

    @property
    def state(self):
        if self is ProtocolTarget.SINGLET:
            return QubitState.S
        return QubitState.T0


def resonance_frequency(p, epsilon_d, mode, upper, lower=QubitState.TMINUS,
                        center=None, half_width=BRACKET_HALF_WIDTH,
                        lamb_shift=False, self_consistent_lamb=False):
    """Solve ω_d = ω_mode + E_upper(ω_d) - E_lower(ω_d): the drive photon
    scatters into a photon of the given cavity mode while the qubits go
    from lower to upper. The energies depend on ω_d through the
    mean-field shifts, so the root is found with Brent's method on a
    bracket around center (default (ω_mode + ω_q)/2)."""
    omega_mode = mode.frequency(p)
    if center is None:
        center = (omega_mode + p.omega_q) / 2

    def residual(omega_d):
        _, spec, _ = effective_spectrum(
            p, DriveParams(epsilon_d, omega_d), lamb_shift=lamb_shift,
            self_consistent_lamb=self_consistent_lamb)
        return (omega_d - omega_mode
                - (spec.energy(upper) - spec.energy(lower)))

    a = center - half_width
    b = center + half_width
    fa = residual(a)
    fb = residual(b)
    if fa * fb > 0:
        raise NoRootError(
            "no resonance for %s -> %s in [%g, %g] at epsilon_d %r"
            % (QubitState(lower).label, QubitState(upper).label, a, b,
               epsilon_d))

    with trace_us("Protocol.resonance_us"):
        root = scipy.optimize.brentq(residual, a, b, xtol=1e-13)

    f = residual(root)
    if abs(f) >= RESIDUAL_TOL:
        raise ConvergenceError("resonance residual %g at omega_d %r"
                               % (f, root))
    return root


def optimal_drive_frequency(target, epsilon_d, p, lamb_shift=False,
                            self_consistent_lamb=False, warn=True):
    target = ProtocolTarget(target)
    omega_d = resonance_frequency(
        p, epsilon_d, target.mode, target.state, lamb_shift=lamb_shift,
        self_consistent_lamb=self_consistent_lamb)

    if warn and epsilon_d > 0:
        pump, leak = _pump_and_leak(p, target, epsilon_d, omega_d)
        if not leak < p.gamma < pump:
            log.warning("epsilon_d %g outside the cooling window: "
                        "pump %.3g, leak %.3g, gamma %.3g",
                        epsilon_d, pump, leak, p.gamma)
    return omega_d


def _pump_and_leak(p, target, epsilon_d, omega_d):
    d = DriveParams(epsilon_d, omega_d)
    _, spec, lams = effective_spectrum(p, d)
    f = transition_rates(spec, lams, d, p).fluctuation
    return f[TMINUS, target.state], f[target.state, TPLUS]


def hierarchy_rates(p, target, epsilon_d):
    """Raman pump and leak rates of the targeted state at the optimal
    drive frequency for epsilon_d. Returns (pump, leak, omega_d)."""
    target = ProtocolTarget(target)
    omega_d = optimal_drive_frequency(target, epsilon_d, p, warn=False)
    pump, leak = _pump_and_leak(p, target, epsilon_d, omega_d)
    return pump, leak, omega_d


@dataclasses.dataclass(frozen=True)
class Window:
    epsilon_min: float
    epsilon_max: float

    @property
    def empty(self):
        return not self.epsilon_min < self.epsilon_max


EMPTY_WINDOW = Window(math.nan, math.nan)


def _crossing(f, grid, values):
    """First sign change of f along grid, refined with brentq."""
    for i in range(len(grid) - 1):
        if values[i] == 0:
            return grid[i]
        if values[i + 1] == 0:
            return grid[i + 1]
        if values[i] * values[i + 1] < 0:
            return scipy.optimize.brentq(f, grid[i], grid[i + 1],
                                         xtol=1e-14, rtol=1e-13)
    return None


def hierarchy_window(p, target, margin=DEFAULT_MARGIN, scan=WINDOW_SCAN,
                     points=WINDOW_POINTS):
    """ε_d interval where margin·Γ_leak ≤ γ and margin·γ ≤ Γ_pump, both
    rates taken at each ε_d's own optimal drive. The Raman rates grow
    like ε_d⁴, so each condition has a single crossing."""
    if margin < 1:
        raise ParameterError("margin must be >= 1, got %r" % margin)
    target = ProtocolTarget(target)

    def pumped(eps):
        return hierarchy_rates(p, target, eps)[0] - margin * p.gamma

    def contained(eps):
        return p.gamma - margin * hierarchy_rates(p, target, eps)[1]

    grid = np.geomspace(scan[0], scan[1], points)
    rates = [hierarchy_rates(p, target, eps) for eps in grid]
    low = np.array([pump - margin * p.gamma for pump, _, _ in rates])
    high = np.array([p.gamma - margin * leak for _, leak, _ in rates])

    if np.all(low < 0) or np.all(high < 0):
        log.info("hierarchy window is empty for margin %g", margin)
        return EMPTY_WINDOW

    eps_min = grid[0] if low[0] >= 0 else _crossing(pumped, grid, low)
    eps_max = grid[-1] if high[-1] >= 0 else _crossing(contained, grid,
                                                       high)
    if high[-1] >= 0:
        log.warning("leak condition still holds at the scan edge %g",
                    grid[-1])

    window = Window(eps_min, eps_max)
    if window.empty:
        return EMPTY_WINDOW
    return window


@dataclasses.dataclass(frozen=True)
class SweepCell:
    omega_d: float
    epsilon_d: float
    n_Tminus: float = math.nan
    n_T0: float = math.nan
    n_S: float = math.nan
    n_Tplus: float = math.nan
    fid_S_bare: float = math.nan
    fid_T0_bare: float = math.nan
    fid_T0_dressed: float = math.nan
    n_d: float = math.nan
    n_D: float = math.nan
    rate_TmS: float = math.nan
    rate_STp: float = math.nan
    hierarchy_ok: bool = False
    error_code: int = 0

    @classmethod
    def from_solution(cls, sol):
        n = sol.populations
        return cls(
            omega_d=sol.drive.omega_d,
            epsilon_d=sol.drive.epsilon_d,
            n_Tminus=n[TMINUS],
            n_T0=n[T0],
            n_S=n[S],
            n_Tplus=n[TPLUS],
            fid_S_bare=sol.fidelity_singlet,
            fid_T0_bare=sol.fidelity_triplet0,
            fid_T0_dressed=sol.fidelity_triplet0_dressed,
            n_d=sol.n_d,
            n_D=sol.n_D,
            rate_TmS=sol.diagnostics.rate_TmS,
            rate_STp=sol.diagnostics.rate_STp,
            hierarchy_ok=sol.diagnostics.hierarchy_ok)

    def fidelity(self, target):
        if ProtocolTarget(target) is ProtocolTarget.SINGLET:
            return self.fid_S_bare
        return self.fid_T0_bare


@dataclasses.dataclass(frozen=True)
class SweepGrid:
    """cells[i][j] is the point (omega_d_axis[j], epsilon_d_axis[i])."""
    omega_d_axis: tuple
    epsilon_d_axis: tuple
    target: ProtocolTarget
    cells: tuple

    def rows(self):
        for row in self.cells:
            yield from row


def _check_axis(axis, name):
    axis = tuple(float(x) for x in axis)
    if not axis:
        raise ParameterError("%s axis is empty" % name)
    if any(b <= a for a, b in zip(axis, axis[1:])):
        raise ParameterError("%s axis must be strictly increasing" % name)
    if not all(math.isfinite(x) and x >= 0 for x in axis):
        raise ParameterError("%s axis must be finite and >= 0" % name)
    return axis


def evaluate_cell(task):
    """One sweep point. Errors become the cell's error_code."""
    p, target, omega_d, epsilon_d, lamb_shift = task
    try:
        sol = solve_ness(p, DriveParams(epsilon_d, omega_d),
                         target_state=target.state, lamb_shift=lamb_shift)
    except DimerError as e:
        log.warning("cell omega_d=%r epsilon_d=%r failed: %s",
                    omega_d, epsilon_d, e)
        return SweepCell(omega_d, epsilon_d, error_code=e.code)
    except np.linalg.LinAlgError as e:
        log.warning("cell omega_d=%r epsilon_d=%r: linear algebra failed: "
                    "%s", omega_d, epsilon_d, e)
        return SweepCell(omega_d, epsilon_d, error_code=LINALG_ERROR_CODE)
    return SweepCell.from_solution(sol)


def sweep(omega_d_axis, epsilon_d_axis, p, target, lamb_shift=False,
          workers=1):
    """Steady state on every (ω_d, ε_d) grid point. Cells are
    independent; with workers > 1 they are farmed out to a process
    pool, and the result is the same as a sequential run."""
    target = ProtocolTarget(target)
    omegas = _check_axis(omega_d_axis, "omega_d")
    epsilons = _check_axis(epsilon_d_axis, "epsilon_d")
    if omegas[0] <= 0:
        raise ParameterError("omega_d axis must be positive")

    tasks = [(p, target, w, eps, lamb_shift)
             for eps in epsilons for w in omegas]

    with trace_ms("Sweep.total_ms"):
        if workers > 1:
            with concurrent.futures.ProcessPoolExecutor(workers) as pool:
                chunk = max(1, len(tasks) // (4 * workers))
                flat = list(pool.map(evaluate_cell, tasks, chunksize=chunk))
        else:
            flat = [evaluate_cell(task) for task in tasks]

    failed = sum(1 for cell in flat if cell.error_code)
    trace("Sweep.cells", len(flat))
    trace("Sweep.failed_cells", failed)
    if failed:
        log.warning("%d of %d sweep cells failed", failed, len(flat))

    n = len(omegas)
    cells = tuple(tuple(flat[i * n:(i + 1) * n])
                  for i in range(len(epsilons)))
    return SweepGrid(omegas, epsilons, target, cells)


def ridge(grid):
    """(ε_d, ω_d) of maximal target fidelity on each ε_d row, skipping
    rows where every cell failed."""
    points = []
    for eps, row in zip(grid.epsilon_d_axis, grid.cells):
        fid = np.array([cell.fidelity(grid.target) for cell in row])
        if np.all(np.isnan(fid)):
            continue
        points.append((eps, grid.omega_d_axis[int(np.nanargmax(fid))]))
    return points


@dataclasses.dataclass(frozen=True)
class RidgeFit:
    coefficients: tuple
    residual: float
    relative_residual: float


def fit_ridge(grid):
    """Quadratic fit ω_d*(ε_d) of the ridge; relative_residual is the
    largest deviation as a fraction of the scanned ω_d range."""
    points = ridge(grid)
    if len(points) < 3:
        raise ParameterError("need at least three ridge points to fit")

    eps, omega = np.array(points).T
    coefficients = np.polyfit(eps, omega, 2)
    residual = float(np.max(np.abs(np.polyval(coefficients, eps) - omega)))

    span = grid.omega_d_axis[-1] - grid.omega_d_axis[0]
    return RidgeFit(tuple(coefficients), residual, residual / span)


def ridge_span(p, target, epsilon_min, epsilon_max, pad=RIDGE_PAD,
               lamb_shift=False):
    """ω_d interval holding the target's optimal drive for every ε_d up
    to epsilon_max, anchored on the ε_d → 0 resonance. The optimum moves
    like ε_d², so the extreme drive strengths bound it. The resonance
    is about κ/4 wide in ω_d, so a fixed axis wide enough for both
    targets would step over it."""
    target = ProtocolTarget(target)
    ends = [optimal_drive_frequency(target, eps, p, lamb_shift=lamb_shift,
                                    warn=False)
            for eps in (0.0, epsilon_min, epsilon_max)]
    lo, hi = min(ends), max(ends)
    margin = pad * max(hi - lo, p.kappa)
    return lo - margin, hi + margin


def optimal_curve(target, epsilon_axis, p, lamb_shift=False):
    """The optimal drive ω_d*(ε_d) along epsilon_axis, each point with
    the steady state it produces. A point without a resonance becomes
    a cell with nan omega_d and the error's code."""
    target = ProtocolTarget(target)
    epsilons = _check_axis(epsilon_axis, "epsilon_d")

    cells = []
    with trace_ms("Protocol.curve_ms"):
        for eps in epsilons:
            try:
                omega_d = optimal_drive_frequency(
                    target, eps, p, lamb_shift=lamb_shift, warn=False)
            except DimerError as e:
                log.warning("no optimal drive at epsilon_d=%r: %s", eps, e)
                cells.append(SweepCell(math.nan, eps, error_code=e.code))
                continue
            cells.append(evaluate_cell((p, target, omega_d, eps,
                                        lamb_shift)))
    return tuple(cells)


def dark_state_drive(p, epsilon_d, lamb_shift=False):
    """ω_d = ω_c^- + E_S - E_T0: the Raman process T0 -> S through the
    symmetric mode is resonant, which leaves T_- without any pump."""
    # E_S - E_T0 is 2J(g/Δ)² up to the tiny T0 mixing
    center = p.omega_c_minus + 2 * p.J * (p.g / p.delta) ** 2
    return resonance_frequency(p, epsilon_d, Mode.SYMMETRIC, S, lower=T0,
                               center=center, lamb_shift=lamb_shift)


def dark_state_demo(p, epsilon_d, lamb_shift=False):
    omega_d = dark_state_drive(p, epsilon_d, lamb_shift=lamb_shift)
    log.info("dark-state drive at omega_d %r", omega_d)
    return solve_ness(p, DriveParams(epsilon_d, omega_d),
                      target_state=S, lamb_shift=lamb_shift)
