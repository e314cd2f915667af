"""The effective two-qubit XY Hamiltonian, its labeled eigensystem and
Lamb-shift corrections."""

import dataclasses
import logging
import math

import numpy as np
from scipy.sparse.csgraph import connected_components

from .instatrace import trace_us
from .model import DimerError, ParameterError, PerturbationBreakdownError
from .model import derived_params
from .operators import QubitState
from .rates import Mode, greens_retarded, lambda_matrices

log = logging.getLogger("dimer")

TMINUS, T0, S, TPLUS = QubitState

HERMITIAN_ATOL = 1e-12
LABEL_FLOOR = 1 / math.sqrt(2)
LAMB_MAX_ITER = 50
LAMB_RTOL = 1e-12


class LabelingAmbiguityError(DimerError):
    code = 3


class ConvergenceError(DimerError):
    code = 7


@dataclasses.dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenenergies and eigenvectors of H̃_σ. Index k of energies and
    column k of states belong to the eigenstate labeled QubitState(k);
    states are written in the bare {T_-, T_0, S, T_+} basis."""
    energies: np.ndarray
    states: np.ndarray
    labels: tuple = tuple(QubitState)
    lamb_shifted: bool = False

    def energy(self, state):
        return self.energies[QubitState(state)]

    def state(self, state):
        return self.states[:, QubitState(state)]

    def to_bare(self, rho):
        """Rotate an eigenbasis operator into the bare basis."""
        v = self.states
        return v @ rho @ v.conj().T


def build_h_eff(e):
    """H̃_σ = Σ_i h·σ_i/2 - (j/2)(σ_1ˣσ_2ˣ + σ_1ʸσ_2ʸ), h = (Ω_R, 0, Δ_q),
    in the bare singlet-triplet basis."""
    h = np.zeros((4, 4))
    h[TMINUS, TMINUS] = -e.delta_q
    h[TPLUS, TPLUS] = e.delta_q
    h[T0, T0] = -e.j_eff
    h[S, S] = e.j_eff

    mix = e.omega_rabi / math.sqrt(2)
    for k in (TMINUS, TPLUS):
        h[k, T0] = h[T0, k] = mix
    return h


def _fix_phase(v):
    k = np.argmax(np.abs(v))
    return v * (abs(v[k]) / v[k])


def eigensystem(h):
    """Exact diagonalization with eigenvectors labeled by their largest
    bare-state overlap. Decoupled blocks are diagonalized separately,
    so a state that does not mix (the singlet) comes out exactly bare."""
    h = np.asarray(h)
    if h.shape != (4, 4):
        raise ParameterError("expected a 4x4 matrix, got %r" % (h.shape,))
    if np.max(np.abs(h - h.conj().T)) > HERMITIAN_ATOL:
        raise ParameterError("matrix is not Hermitian")

    with trace_us("Spectrum.eigensystem_us"):
        n_blocks, block_of = connected_components(np.abs(h) > 0,
                                                  directed=False)

        energies = []
        vectors = []
        for b in range(n_blocks):
            idx = np.flatnonzero(block_of == b)
            if len(idx) == 1:
                energies.append(float(np.real(h[idx[0], idx[0]])))
                v = np.zeros(4, dtype=complex)
                v[idx[0]] = 1
                vectors.append(v)
                continue

            w, u = np.linalg.eigh(h[np.ix_(idx, idx)])
            for i in range(len(idx)):
                v = np.zeros(4, dtype=complex)
                v[idx] = u[:, i]
                energies.append(float(w[i]))
                vectors.append(v)

    out_e = np.zeros(4)
    out_v = np.zeros((4, 4), dtype=complex)
    seen = set()
    for energy, v in zip(energies, vectors):
        k = int(np.argmax(np.abs(v)))
        if abs(v[k]) < LABEL_FLOOR:
            raise LabelingAmbiguityError(
                "eigenvector with energy %g has largest bare overlap %.4f"
                % (energy, abs(v[k])))
        if k in seen:
            raise LabelingAmbiguityError(
                "two eigenvectors label as %s" % QubitState(k).label)
        seen.add(k)
        out_e[k] = energy
        out_v[:, k] = _fix_phase(v)

    return Spectrum(out_e, out_v)


def perturbative_spectrum(e):
    """Second-order energies and first-order states of H̃_σ in Ω_R/Δ_q."""
    if e.delta_q == 0 or abs(e.omega_rabi / e.delta_q) >= 1:
        raise PerturbationBreakdownError(
            "perturbative spectrum needs |Ω_R/Δ_q| < 1, got Ω_R = %g, "
            "Δ_q = %g" % (e.omega_rabi, e.delta_q))

    dq = e.delta_q
    mix = e.omega_rabi / (math.sqrt(2) * dq)
    shift = dq + e.omega_rabi ** 2 / (2 * dq)

    energies = np.zeros(4)
    energies[TMINUS] = -shift
    energies[TPLUS] = shift
    energies[T0] = -e.j_eff
    energies[S] = e.j_eff

    states = np.eye(4, dtype=complex)
    states[T0, TPLUS] = mix
    states[T0, TMINUS] = -mix
    states[TPLUS, T0] = -mix
    states[TMINUS, T0] = mix
    states /= np.linalg.norm(states, axis=0)

    return Spectrum(energies, states)


def _lamb_shifts(energies, lams, omega_d, p):
    omega = energies[:, None] - energies[None, :] + omega_d
    g_minus = np.real(greens_retarded(omega, Mode.SYMMETRIC, p))
    g_plus = np.real(greens_retarded(omega, Mode.ASYMMETRIC, p))
    return (np.abs(lams.lambda_D) ** 2 * g_minus
            + np.abs(lams.lambda_d) ** 2 * g_plus).sum(axis=1)


def lamb_shift(spec, lams, e, d, p, self_consistent=False,
               max_iter=LAMB_MAX_ITER, rtol=LAMB_RTOL):
    """Shift each level by the real part of its photon self-energy.

    The default is a single pass with the unshifted energies on the
    right-hand side. With self_consistent the shifted energies are fed
    back until they stop changing."""
    if spec.lamb_shifted:
        raise ParameterError("spectrum is already Lamb shifted")

    e0 = np.asarray(spec.energies, dtype=float)
    energies = e0 + _lamb_shifts(e0, lams, d.omega_d, p)

    if self_consistent:
        for i in range(max_iter):
            updated = e0 + _lamb_shifts(energies, lams, d.omega_d, p)
            change = np.max(np.abs(updated - energies))
            energies = updated
            if change <= rtol * max(np.max(np.abs(energies)), e.j_eff):
                log.debug("Lamb shift converged after %d iterations", i + 1)
                break
        else:
            raise ConvergenceError(
                "Lamb shift not converged after %d iterations" % max_iter)

    return dataclasses.replace(spec, energies=energies, lamb_shifted=True)


_lamb_shift = lamb_shift


def effective_spectrum(p, d, lamb_shift=False, self_consistent_lamb=False):
    """Effective parameters, labeled exact spectrum and Λ matrices at
    one drive point."""
    e = derived_params(p, d)
    spec = eigensystem(build_h_eff(e))
    lams = lambda_matrices(e)
    if lamb_shift:
        spec = _lamb_shift(spec, lams, e, d, p,
                           self_consistent=self_consistent_lamb)
    return e, spec, lams
