"""Photon Green's functions, the Raman coupling matrices and the
golden-rule transition rates between qubit eigenstates.

Rate matrices are indexed [k][l] = Γ_{k→l} over QubitState order."""

import dataclasses
import enum
import math

import numpy as np

from .model import ParameterError
from .operators import QubitState

TMINUS, T0, S, TPLUS = QubitState


class Mode(enum.Enum):
    SYMMETRIC = "-"
    ASYMMETRIC = "+"

    def frequency(self, p):
        if self is Mode.SYMMETRIC:
            return p.omega_c_minus
        return p.omega_c_plus


def greens_retarded(omega, mode, p):
    """G^R_±(ω) = 1/(ω - ω_c^± + iκ/2); ω may be an array."""
    if not p.kappa > 0:
        raise ParameterError("kappa must be positive, got %r" % p.kappa)
    return 1 / (np.asarray(omega) - mode.frequency(p) + 0.5j * p.kappa)


def dos(omega, mode, p):
    """Lorentzian density of states -Im G^R/π of one cavity mode."""
    return -np.imag(greens_retarded(omega, mode, p)) / math.pi


@dataclasses.dataclass(frozen=True, eq=False)
class LambdaPair:
    """Λ^D couples through the symmetric mode, Λ^d through the
    antisymmetric one."""
    lambda_D: np.ndarray
    lambda_d: np.ndarray


def lambda_matrices(e):
    lam = e.lam
    lam_alpha = e.lam * e.alpha

    big = np.zeros((4, 4), dtype=complex)
    big[TMINUS, TMINUS] = big[TPLUS, TPLUS] = lam
    for k, l in ((TMINUS, T0), (T0, TPLUS)):
        big[k, l] = big[l, k] = lam_alpha

    small = np.zeros((4, 4), dtype=complex)
    small[T0, S] = small[S, T0] = lam
    for k, l in ((TMINUS, S), (S, TPLUS)):
        small[k, l] = small[l, k] = lam_alpha

    return LambdaPair(big, small)


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True, eq=False)
class RateMatrix:
    """Transition rates split into the intrinsic qubit baths and the
    photon-fluctuation (Raman) part."""
    bath: np.ndarray
    fluctuation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "bath", _frozen(self.bath))
        object.__setattr__(self, "fluctuation", _frozen(self.fluctuation))

    @property
    def gamma(self):
        return self.bath + self.fluctuation

    def rate(self, k, l):
        return self.gamma[k, l]

    def population_generator(self):
        """M with dn/dt = M n. Diagonal Γ_{k→k} are pure dephasing and
        leave populations alone, so they are dropped."""
        off = self.gamma * (1 - np.eye(4))
        return off.T - np.diag(off.sum(axis=1))


def bath_rates(p):
    b = np.zeros((4, 4))
    b[T0, TMINUS] = b[S, TMINUS] = p.gamma
    b[TPLUS, T0] = b[TPLUS, S] = p.gamma
    b[T0, S] = b[S, T0] = p.gamma_phi
    b[TMINUS, TMINUS] = b[TPLUS, TPLUS] = p.gamma_phi
    return RateMatrix(b, np.zeros((4, 4)))


def fluctuation_rates(spec, lams, d, p):
    """Γ^d_{k→l} = 2π|Λ^D_kl|²ρ_-(E_k - E_l + ω_d)
                 + 2π|Λ^d_kl|²ρ_+(E_k - E_l + ω_d)"""
    e = np.asarray(spec.energies)
    omega = e[:, None] - e[None, :] + d.omega_d

    f = (2 * math.pi * np.abs(lams.lambda_D) ** 2
         * dos(omega, Mode.SYMMETRIC, p)
         + 2 * math.pi * np.abs(lams.lambda_d) ** 2
         * dos(omega, Mode.ASYMMETRIC, p))
    return RateMatrix(np.zeros((4, 4)), f)


def total_rates(b, f):
    return RateMatrix(b.bath + f.bath, b.fluctuation + f.fluctuation)


def transition_rates(spec, lams, d, p):
    return total_rates(bath_rates(p), fluctuation_rates(spec, lams, d, p))
