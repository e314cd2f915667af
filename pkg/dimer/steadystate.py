"""Steady states of the secular master equation, either as the four
population rate equations or as the full 16-dimensional Liouvillian,
plus Markovian time evolution and the photon-fluctuation occupations.

Superoperators act on column-stacked density matrices:
vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)."""

import dataclasses
import logging
import math

import numpy as np
import scipy.linalg

from .instatrace import trace, trace_us
from .model import DimerError, ParameterError
from .operators import QubitState, bare_state
from .rates import transition_rates
from .spectrum import effective_spectrum

log = logging.getLogger("dimer")

TMINUS, T0, S, TPLUS = QubitState

NULL_ATOL = 1e-10
GAP_RTOL = 1e-6
LIOUVILLIAN_GAP_RTOL = 1e-10
NEGATIVITY_FLOOR = 1e-8


class DegenerateNullSpaceError(DimerError):
    code = 4


class NegativityError(DimerError):
    code = 5


@dataclasses.dataclass(frozen=True, eq=False)
class Populations:
    n: np.ndarray
    residual: float = 0.0

    def __getitem__(self, state):
        return float(self.n[QubitState(state)])


@dataclasses.dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A 4x4 density matrix in the labeled eigenbasis of H̃_σ."""
    rho: np.ndarray
    residual: float = 0.0

    def populations(self):
        return np.real(np.diag(self.rho))

    def min_eigenvalue(self):
        return float(np.min(np.linalg.eigvalsh(self.hermitian())))

    def hermitian(self):
        return (self.rho + self.rho.conj().T) / 2


@dataclasses.dataclass(frozen=True)
class NessDiagnostics:
    """rate_pump and rate_leak are the Raman rates into and out of the
    targeted state; hierarchy_ok is rate_leak < γ < rate_pump."""
    target: QubitState
    rate_pump: float
    rate_leak: float
    rate_TmS: float
    rate_STp: float
    hierarchy_ok: bool
    population_residual: float
    liouvillian_residual: float
    solver_agreement: float


@dataclasses.dataclass(frozen=True, eq=False)
class NessSolution:
    populations: Populations
    rho: DensityMatrix
    n_d: float
    n_D: float
    fidelity_singlet: float
    fidelity_triplet0: float
    fidelity_triplet0_dressed: float
    diagnostics: NessDiagnostics
    spectrum: object = None
    rates: object = None
    effective: object = None
    drive: object = None

    def bare_populations(self):
        return np.real(np.diag(self.spectrum.to_bare(self.rho.rho)))


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v):
    n = int(round(math.sqrt(len(v))))
    return np.asarray(v).reshape((n, n), order="F")


def population_generator(r):
    return r.population_generator()


def _null_vector(m, gap_rtol, null_atol, what):
    _, s, vh = np.linalg.svd(m)
    largest = s[0]
    if s[-1] > null_atol * max(1.0, largest):
        raise DegenerateNullSpaceError(
            "%s has no null space, smallest singular value %g"
            % (what, s[-1]))
    if not s[-2] > gap_rtol * largest:
        raise DegenerateNullSpaceError(
            "%s null space is degenerate, singular values %g and %g"
            % (what, s[-2], s[-1]))
    return vh[-1].conj()


def ness_populations(r, gap_rtol=GAP_RTOL, null_atol=NULL_ATOL):
    """Stationary solution of the population rate equations."""
    g = r.gamma
    if np.any(g * (1 - np.eye(4)) < 0):
        raise ParameterError("transition rates must be non-negative")

    m = r.population_generator()
    with trace_us("Ness.populations_us"):
        v = _null_vector(m, gap_rtol, null_atol, "rate generator")

    n = np.real(v / v.sum())
    n = np.clip(n, 0.0, None)
    n = n / n.sum()

    residual = float(np.linalg.norm(m @ n))
    trace("Ness.population_residual", residual)
    return Populations(n, residual)


def _dissipator(x):
    i = np.eye(x.shape[0])
    xdx = x.conj().T @ x
    return (np.kron(x.conj(), x)
            - 0.5 * np.kron(i, xdx)
            - 0.5 * np.kron(xdx.T, i))


def secular_liouvillian(spec, r):
    """L[ρ] = -i[H, ρ] + Σ_kl Γ_{k→l} D[|l⟩⟨k|]ρ over the labeled
    eigenbasis, dephasing diagonal terms included."""
    g = r.gamma
    if np.any(g < 0):
        raise ParameterError("transition rates must be non-negative")

    h = np.diag(np.asarray(spec.energies, dtype=complex))
    i = np.eye(4)
    L = -1j * (np.kron(i, h) - np.kron(h.T, i))

    for k in range(4):
        for l in range(4):
            if g[k, l] == 0:
                continue
            jump = np.zeros((4, 4), dtype=complex)
            jump[l, k] = 1
            L += g[k, l] * _dissipator(jump)
    return L


def liouvillian_ness(L, gap_rtol=LIOUVILLIAN_GAP_RTOL, null_atol=NULL_ATOL):
    with trace_us("Ness.liouvillian_us"):
        v = _null_vector(L, gap_rtol, null_atol, "Liouvillian")

    rho = unvec(v)
    rho = (rho + rho.conj().T) / 2
    rho = rho / np.trace(rho)

    residual = float(np.linalg.norm(L @ vec(rho)))
    trace("Ness.liouvillian_residual", residual)

    floor = np.min(np.linalg.eigvalsh(rho))
    if floor < -NEGATIVITY_FLOOR:
        raise NegativityError("steady state has eigenvalue %g" % floor)
    return DensityMatrix(rho, residual)


def evolve(rho0, L, t):
    """ρ(t) = exp(L t) ρ(0). The secular generator is Markovian, which
    is only accurate close to the steady state."""
    if t < 0:
        raise ParameterError("evolution time must be >= 0, got %r" % t)
    if t == 0:
        return rho0

    v = scipy.linalg.expm(L * t) @ vec(rho0.rho)
    return DensityMatrix(unvec(v))


def photon_occupations(n, r, p, t=None):
    """Occupations ⟨d†d⟩ and ⟨D†D⟩ of the antisymmetric and symmetric
    fluctuation modes: every Raman transition emits one photon, each
    photon leaks at κ. With t, the occupation reached from the vacuum
    after time t."""
    f = r.fluctuation
    n_d = (n[TMINUS] * f[TMINUS, S] + n[S] * f[S, TPLUS]) / p.kappa
    n_D = (n[TMINUS] * f[TMINUS, T0] + n[T0] * f[T0, TPLUS]) / p.kappa

    if t is not None:
        if t < 0:
            raise ParameterError("time must be >= 0, got %r" % t)
        filled = -math.expm1(-p.kappa * t)
        n_d *= filled
        n_D *= filled
    return n_d, n_D


def fidelity(rho, target, spec, bare=False):
    """⟨target|ρ|target⟩, for the labeled eigenstate or, with bare, for
    the bare singlet-triplet state."""
    target = QubitState(target)
    if not bare:
        return float(np.real(rho.rho[target, target]))
    v = bare_state(target)
    return float(np.real(v.conj() @ spec.to_bare(rho.rho) @ v))


def trace_distance(a, b):
    w = np.linalg.eigvalsh(a.hermitian() - b.hermitian())
    return 0.5 * float(np.sum(np.abs(w)))


def solve_ness(p, d, target_state=QubitState.S, lamb_shift=False,
               self_consistent_lamb=False):
    """Run the effective pipeline at one drive point: derived
    parameters, spectrum, rates, both steady-state solvers."""
    target_state = QubitState(target_state)
    e, spec, lams = effective_spectrum(
        p, d, lamb_shift=lamb_shift,
        self_consistent_lamb=self_consistent_lamb)
    r = transition_rates(spec, lams, d, p)

    pops = ness_populations(r)
    rho = liouvillian_ness(secular_liouvillian(spec, r))
    agreement = float(np.max(np.abs(rho.populations() - pops.n)))
    if agreement > 1e-8:
        log.warning("rate equations and Liouvillian differ by %g", agreement)

    n_d, n_D = photon_occupations(pops, r, p)
    f = r.fluctuation
    pump = f[TMINUS, target_state]
    leak = f[target_state, TPLUS]

    diagnostics = NessDiagnostics(
        target=target_state,
        rate_pump=float(pump),
        rate_leak=float(leak),
        rate_TmS=float(f[TMINUS, S]),
        rate_STp=float(f[S, TPLUS]),
        hierarchy_ok=bool(leak < p.gamma < pump),
        population_residual=pops.residual,
        liouvillian_residual=rho.residual,
        solver_agreement=agreement)

    return NessSolution(
        populations=pops,
        rho=rho,
        n_d=float(n_d),
        n_D=float(n_D),
        fidelity_singlet=fidelity(rho, S, spec, bare=True),
        fidelity_triplet0=fidelity(rho, T0, spec, bare=True),
        fidelity_triplet0_dressed=fidelity(rho, T0, spec),
        diagnostics=diagnostics,
        spectrum=spec,
        rates=r,
        effective=e,
        drive=d)
