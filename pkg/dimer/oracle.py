"""Brute-force reference for the effective theory: the full two-qubit,
two-mode driven-dissipative model in the drive's rotating frame with
truncated photon numbers, solved for its steady state and reduced to
qubit populations.

Subsystem order is qubit 1, qubit 2, mode 1, mode 2. In the site frame
the modes are the cavity fields a_1, a_2; in the pm frame they are the
normal modes A = (a_1 + a_2)/√2 and a = (a_1 - a_2)/√2. The displaced
frame is the pm frame with A shifted by its driven-damped mean field
Ā, so the truncated modes only carry the photon fluctuations D = A - Ā
and a, and the drive term is absorbed into a classical Rabi field on
the qubits."""

import dataclasses
import logging
import math

import numpy as np
import scipy.linalg
import scipy.optimize
from scipy import sparse
from scipy.sparse.linalg import LinearOperator, gmres, splu

from .instatrace import count, trace, trace_ms
from .model import DimerError, DriveParams, ParameterError
from .operators import (SIGMA_MINUS, SIGMA_Z, SINGLET_TRIPLET, QubitState,
                        destroy, embed)
from .steadystate import (NEGATIVITY_FLOOR, DegenerateNullSpaceError,
                          NegativityError, solve_ness)

log = logging.getLogger("dimer")

DEFAULT_NMAX = 4
DEFAULT_MAX_DIM = 100
FRAMES = ("displaced", "pm", "site")
SOLVERS = ("iterative", "direct")

# GMRES settings for the iterative steady state
GMRES_RTOL = 1e-11
GMRES_RESTART = 60
GMRES_MAXITER = 40

# an iterative solution with a larger Liouvillian residual is redone
# with the direct solver
ITERATIVE_RESIDUAL_TOL = 1e-8

# window scanned around the effective ω_d for the oracle's own
# protocol point
REFINE_SPAN = 3e-4
REFINE_POINTS = 21
REFINE_XATOL = 1e-7


class DimensionCapError(DimerError):
    code = 8
    exit_code = 2


@dataclasses.dataclass(frozen=True)
class FockConfig:
    n_max: int = DEFAULT_NMAX
    frame: str = "displaced"
    max_dim: int = DEFAULT_MAX_DIM
    solver: str = "iterative"

    def __post_init__(self):
        if self.n_max < 2:
            raise ParameterError("n_max must be >= 2 for a driven mode, "
                                 "got %r" % self.n_max)
        if self.frame not in FRAMES:
            raise ParameterError("frame must be one of %s, got %r"
                                 % (", ".join(FRAMES), self.frame))
        if self.solver not in SOLVERS:
            raise ParameterError("solver must be one of %s, got %r"
                                 % (", ".join(SOLVERS), self.solver))

    @property
    def dims(self):
        return (2, 2, self.n_max + 1, self.n_max + 1)

    @property
    def dim(self):
        return 4 * (self.n_max + 1) ** 2


@dataclasses.dataclass(frozen=True, eq=False)
class FullModel:
    """Hamiltonian, collapse operators and site-mode annihilators of the
    unreduced model, all as sparse matrices. In the displaced frame the
    site annihilators include the mean field."""
    hamiltonian: sparse.csr_matrix
    collapse: tuple
    a1: sparse.csr_matrix
    a2: sparse.csr_matrix
    dims: tuple


def dag(x):
    return x.conj().T


def mean_field(p, d):
    """Steady-state amplitude of the driven symmetric mode without the
    qubits, Ā = √2 ε_d/(ω_d - ω_c^- + iκ/2)."""
    return math.sqrt(2) * d.epsilon_d / complex(d.omega_d - p.omega_c_minus,
                                                p.kappa / 2)


def full_model(p, d, fc):
    dims = fc.dims
    sm = [embed((SIGMA_MINUS, None, None, None), dims),
          embed((None, SIGMA_MINUS, None, None), dims)]
    sz = [embed((SIGMA_Z, None, None, None), dims),
          embed((None, SIGMA_Z, None, None), dims)]
    b = destroy(fc.n_max)
    m1 = embed((None, None, b, None), dims)
    m2 = embed((None, None, None, b), dims)

    drive = d.epsilon_d
    if fc.frame == "site":
        a1, a2 = m1, m2
        field = ((p.omega_c - d.omega_d) * (dag(m1) @ m1 + dag(m2) @ m2)
                 - p.J * (dag(m1) @ m2 + dag(m2) @ m1))
    else:
        a1 = (m1 + m2) / math.sqrt(2)
        a2 = (m1 - m2) / math.sqrt(2)
        field = ((p.omega_c_minus - d.omega_d) * (dag(m1) @ m1)
                 + (p.omega_c_plus - d.omega_d) * (dag(m2) @ m2))
        if fc.frame == "displaced":
            # the κ dissipator of A = Ā + D cancels the drive exactly
            shift = mean_field(p, d) / math.sqrt(2) * sparse.identity(
                m1.shape[0], dtype=complex, format="csr")
            a1 = a1 + shift
            a2 = a2 + shift
            drive = 0.0

    h = field
    for a, s_minus, s_z in zip((a1, a2), sm, sz):
        h = h + (p.omega_q - d.omega_d) / 2 * s_z
        h = h + p.g * (dag(a) @ s_minus + a @ dag(s_minus))
        if drive:
            h = h + drive * (a + dag(a))

    collapse = [math.sqrt(p.kappa) * m for m in (m1, m2)]
    collapse += [math.sqrt(p.gamma) * s for s in sm]
    collapse += [math.sqrt(p.gamma_phi / 2) * s for s in sz]
    return FullModel(h.tocsr(), tuple(c.tocsr() for c in collapse),
                     a1.tocsr(), a2.tocsr(), dims)


def liouvillian(model):
    """Column-stacked sparse superoperator of the Lindblad equation."""
    n = model.hamiltonian.shape[0]
    i = sparse.identity(n, dtype=complex, format="csr")
    h = model.hamiltonian

    L = -1j * (sparse.kron(i, h) - sparse.kron(h.T, i))
    for c in model.collapse:
        cdc = dag(c) @ c
        L = L + (sparse.kron(c.conj(), c)
                 - 0.5 * sparse.kron(i, cdc)
                 - 0.5 * sparse.kron(cdc.T, i))
    return L.tocsc()


def build_full_liouvillian(p, d, fc, allow_over_cap=False):
    _check_cap(fc, allow_over_cap)
    with trace_ms("Oracle.build_ms"):
        return liouvillian(full_model(p, d, fc))


@dataclasses.dataclass(frozen=True, eq=False)
class FullState:
    rho: np.ndarray
    residual: float


def _finish(rho, residual, what):
    trace("Oracle.residual", residual)
    floor = np.min(np.linalg.eigvalsh(rho))
    if floor < -NEGATIVITY_FLOOR:
        raise NegativityError("%s has eigenvalue %g" % (what, floor))
    return FullState(rho, residual)


def oracle_ness(L):
    """Steady state from a direct sparse LU solve, with the trace condition
    added to the first row of L."""
    n = int(round(math.sqrt(L.shape[0])))
    weight = float(np.mean(np.abs(L.data)))
    trace_row = sparse.csc_matrix(
        (weight * np.ones(n), (np.zeros(n), np.arange(n) * (n + 1))),
        shape=L.shape)
    rhs = np.zeros(n * n, dtype=complex)
    rhs[0] = weight

    with trace_ms("Oracle.solve_ms"):
        try:
            lu = splu((L + trace_row).tocsc())
        except RuntimeError as e:
            raise DegenerateNullSpaceError("full Liouvillian: %s" % e)
        v = lu.solve(rhs)

    rho = v.reshape((n, n), order="F")
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho)

    residual = float(np.max(np.abs(L @ rho.reshape(-1, order="F"))))
    return _finish(rho, residual, "full steady state")


class NoJumpInverse:
    """Solves K X + X K† = Y for the no-jump generator
    K = -iH - ½ Σ c†c, through one complex Schur form of K."""

    def __init__(self, k):
        self.t, self.z = scipy.linalg.schur(k, output="complex")
        self.zh = self.z.conj().T
        self._trsyl, = scipy.linalg.get_lapack_funcs(("trsyl",), (self.t,))

    def __call__(self, y):
        x, scale, info = self._trsyl(self.t, self.t, self.zh @ y @ self.z,
                                     tranb="C")
        if info != 0:
            raise DegenerateNullSpaceError(
                "no-jump generator is not strictly damped (trsyl info %d)"
                % info)
        return self.z @ (x / scale) @ self.zh


def _jumps(collapse, rho):
    """Σ c ρ c† with the sparse operators kept on the left."""
    out = np.zeros_like(rho)
    for c in collapse:
        out += (c @ (c @ rho).conj().T).conj().T
    return out


def iterative_ness(model, guess=None, rtol=GMRES_RTOL):
    """Steady state as the fixed point of the jump map
    Φ(ρ) = -S⁻¹(Σ c ρ c†), S(ρ) = Kρ + ρK†, solved with GMRES on
    ρ - Φ(ρ) + tr(ρ)·1/n = 1/n. Φ is trace preserving, so the trace
    term pins tr ρ = 1."""
    n = model.hamiltonian.shape[0]
    k = -1j * model.hamiltonian.toarray()
    for c in model.collapse:
        k -= 0.5 * (dag(c) @ c).toarray()
    solve_no_jump = NoJumpInverse(k)
    collapse = model.collapse

    def apply(v):
        rho = v.reshape((n, n), order="F")
        out = rho + solve_no_jump(_jumps(collapse, rho))
        out = out + np.trace(rho) * np.eye(n) / n
        return out.reshape(-1, order="F")

    op = LinearOperator((n * n, n * n), matvec=apply, dtype=complex)
    rhs = (np.eye(n, dtype=complex) / n).reshape(-1, order="F")
    x0 = None if guess is None else guess.reshape(-1, order="F")

    iterations = 0

    def counter(_):
        nonlocal iterations
        iterations += 1

    with trace_ms("Oracle.solve_ms"):
        v, info = gmres(op, rhs, x0=x0, rtol=rtol, atol=0.0,
                        restart=GMRES_RESTART, maxiter=GMRES_MAXITER,
                        callback=counter, callback_type="pr_norm")
    trace("Oracle.gmres_iterations", iterations)
    if info != 0:
        raise DegenerateNullSpaceError(
            "GMRES stopped after %d iterations (info %d)"
            % (iterations, info))

    rho = v.reshape((n, n), order="F")
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho)

    generator = k @ rho + rho @ k.conj().T + _jumps(collapse, rho)
    residual = float(np.max(np.abs(generator)))
    if residual > ITERATIVE_RESIDUAL_TOL:
        raise DegenerateNullSpaceError(
            "iterative steady state residual %g" % residual)
    return _finish(rho, residual, "full steady state")


def qubit_state(rho, dims):
    """Reduced two-qubit density matrix in the product basis."""
    m = dims[2] * dims[3]
    r = rho.reshape(4, m, 4, m)
    return np.einsum("aibi->ab", r)


def photon_state(rho, dims):
    m = dims[2] * dims[3]
    r = rho.reshape(4, m, 4, m)
    return np.einsum("aiaj->ij", r)


def expectation(op, rho):
    return float(np.real(np.trace(op @ rho)))


def bare_populations(rho_qubits):
    """Populations of T_-, T_0, S, T_+ from a product-basis 4x4 matrix."""
    u = SINGLET_TRIPLET
    return np.real(np.diag(u.conj().T @ rho_qubits @ u))


def _entropy(rho):
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log(w)))


def mutual_information(rho, dims):
    """Quantum mutual information between the qubit pair and the
    photons."""
    return (_entropy(qubit_state(rho, dims))
            + _entropy(photon_state(rho, dims)) - _entropy(rho))


@dataclasses.dataclass(frozen=True, eq=False)
class OracleReport:
    """convergence_delta is the largest population change when the
    cutoff grows by one, nan when not checked. convergence_drive is
    the drive used at the larger cutoff."""
    drive: DriveParams
    config: FockConfig
    populations: np.ndarray
    photons: tuple
    residual: float
    convergence_delta: float
    rho_qubits: np.ndarray
    convergence_drive: DriveParams = None


def _check_cap(fc, allow_over_cap):
    if fc.dim > fc.max_dim and not allow_over_cap:
        raise DimensionCapError("Hilbert dimension %d exceeds the cap %d"
                                % (fc.dim, fc.max_dim))


def full_steady_state(p, d, fc, allow_over_cap=False, guess=None):
    """Build and solve the full model with fc's solver. An iterative
    solve that fails falls back to the direct one."""
    _check_cap(fc, allow_over_cap)
    count("Oracle.solves")
    with trace_ms("Oracle.build_ms"):
        model = full_model(p, d, fc)

    if fc.solver == "iterative":
        try:
            return model, iterative_ness(model, guess)
        except DegenerateNullSpaceError as e:
            log.warning("iterative steady state failed (%s), "
                        "using the direct solver", e)
            count("Oracle.direct_fallbacks")

    with trace_ms("Oracle.build_ms"):
        L = liouvillian(model)
    return model, oracle_ness(L)


def _reduce(model, state):
    return bare_populations(qubit_state(state.rho, model.dims))


def refine_drive(p, d, target_state, fc, span=REFINE_SPAN,
                 points=REFINE_POINTS, allow_over_cap=False):
    """Drive frequency near d.omega_d at which the full model's target
    population peaks at the cutoff of fc. The full model's Raman
    resonance carries shifts beyond second order in g/Δ, and its
    plateau is only a few κ wide, so every cutoff gets its own
    protocol point."""
    target_state = QubitState(target_state)
    guess = None

    def population(omega_d):
        nonlocal guess
        model, state = full_steady_state(
            p, DriveParams(d.epsilon_d, omega_d), fc,
            allow_over_cap=allow_over_cap, guess=guess)
        guess = state.rho
        return _reduce(model, state)[target_state]

    with trace_ms("Oracle.refine_ms"):
        grid = np.linspace(d.omega_d - span, d.omega_d + span, points)
        values = [population(w) for w in grid]
        best = int(np.argmax(values))
        step = grid[1] - grid[0]
        if best in (0, points - 1):
            log.warning("oracle %s population peaks at the edge of the "
                        "scanned window, omega_d %r",
                        target_state.label, grid[best])

        result = scipy.optimize.minimize_scalar(
            lambda w: -population(w), method="bounded",
            bounds=(grid[best] - step, grid[best] + step),
            options={"xatol": REFINE_XATOL})

    omega = result.x if -result.fun >= values[best] else grid[best]
    log.info("oracle protocol point %r at n_max %d (effective %r)",
             omega, fc.n_max, d.omega_d)
    return float(omega)


def oracle_report(p, d, fc, check_convergence=True, target_state=None):
    """Reduced steady state of the full model. With target_state the
    drive frequency is first moved to the full model's own maximum of
    that state's population. With check_convergence the run is
    repeated with one more photon per mode (allowed past the dimension
    cap), relocating that maximum again when a target is given, and
    the largest population change is reported."""
    if target_state is not None:
        d = DriveParams(d.epsilon_d,
                        refine_drive(p, d, target_state, fc))

    model, state = full_steady_state(p, d, fc)
    pops = _reduce(model, state)
    photons = tuple(expectation(dag(a) @ a, state.rho)
                    for a in (model.a1, model.a2))

    delta = math.nan
    big_drive = None
    if check_convergence:
        bigger = dataclasses.replace(fc, n_max=fc.n_max + 1)
        big_drive = d
        if target_state is not None:
            big_drive = DriveParams(d.epsilon_d, refine_drive(
                p, d, target_state, bigger, allow_over_cap=True))
        big_model, big_state = full_steady_state(
            p, big_drive, bigger, allow_over_cap=True, guess=None)
        delta = float(np.max(np.abs(_reduce(big_model, big_state) - pops)))
        log.debug("truncation n_max %d -> %d changes populations by %g",
                  fc.n_max, bigger.n_max, delta)

    return OracleReport(d, fc, pops, photons, state.residual, delta,
                        qubit_state(state.rho, model.dims), big_drive)


@dataclasses.dataclass(frozen=True, eq=False)
class Comparison:
    effective: np.ndarray
    oracle: np.ndarray
    differences: np.ndarray
    tolerance: float
    passed: tuple

    @property
    def ok(self):
        return all(self.passed)

    def lines(self):
        yield "%-8s %12s %12s %12s %s" % ("state", "effective", "oracle",
                                          "diff", "")
        for k in QubitState:
            yield "%-8s %12.6f %12.6f %12.3g %s" % (
                k.label, self.effective[k], self.oracle[k],
                self.differences[k], "ok" if self.passed[k] else "FAIL")


def compare(eff, spec, orep, tolerance=0.05):
    """Diff the effective steady state, rotated to the bare basis with
    the labeled eigenvectors, against the oracle's reduced
    populations."""
    effective = np.real(np.diag(spec.to_bare(eff.rho.rho)))
    diff = np.abs(effective - orep.populations)
    passed = tuple(bool(x <= tolerance) for x in diff)
    for k in QubitState:
        if not passed[k]:
            log.warning("%s population differs by %.3g (tolerance %g)",
                        k.label, diff[k], tolerance)
    return Comparison(effective, orep.populations, diff, tolerance, passed)


def oracle_protocol(p, d, fc, target_state=QubitState.S, tolerance=0.05,
                    refine=True, check_convergence=True):
    """Effective steady state at d against the full model, the latter at
    its own protocol point for each cutoff when refine is set."""
    eff = solve_ness(p, d, target_state=target_state)
    orep = oracle_report(p, d, fc, check_convergence=check_convergence,
                         target_state=target_state if refine else None)
    return eff, orep, compare(eff, eff.spectrum, orep, tolerance)
