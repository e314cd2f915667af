"""Physical parameters of the driven cavity dimer and the derived
scalars of its effective qubit theory."""

import dataclasses
import logging
import math

log = logging.getLogger("dimer")

SQRT2 = math.sqrt(2.0)

# a "≫" is satisfied when the ratio is at least this large
HIERARCHY_RATIO = 5.0

# |Δ| and |Δ_q| must stay above this fraction of ω_q
DETUNING_FLOOR = 1e-6


class DimerError(Exception):
    """Base class for everything dimer raises on purpose. code is the
    value written to the error_code result column, exit_code the
    status the command line exits with."""
    code = 1
    exit_code = 1


class ParameterError(DimerError):
    code = 1
    exit_code = 2


class PerturbationBreakdownError(DimerError):
    code = 2


@dataclasses.dataclass(frozen=True)
class DimerParams:
    """Two identical transmon-cavity sites. Frequencies and rates in
    2π×GHz, defaults are the typical circuit-QED scales."""
    omega_c: float = 6.0
    omega_q: float = 7.0
    g: float = 0.1
    J: float = 0.1
    kappa: float = 1e-4
    gamma: float = 1e-5
    gamma_phi: float = 1e-6

    @property
    def delta(self):
        return self.omega_q - self.omega_c

    @property
    def omega_c_minus(self):
        """Symmetric mode A."""
        return self.omega_c - self.J

    @property
    def omega_c_plus(self):
        """Antisymmetric mode a."""
        return self.omega_c + self.J

    def scaled(self, s):
        return DimerParams(**{f.name: getattr(self, f.name) * s
                              for f in dataclasses.fields(self)})


DEFAULT_PARAMS = DimerParams()


@dataclasses.dataclass(frozen=True)
class DriveParams:
    epsilon_d: float
    omega_d: float

    def __post_init__(self):
        if not math.isfinite(self.epsilon_d) or self.epsilon_d < 0:
            raise ParameterError("drive strength must be >= 0, got %r"
                                 % self.epsilon_d)
        if not math.isfinite(self.omega_d) or self.omega_d <= 0:
            raise ParameterError("drive frequency must be > 0, got %r"
                                 % self.omega_d)

    def scaled(self, s):
        return DriveParams(self.epsilon_d * s, self.omega_d * s)


@dataclasses.dataclass(frozen=True)
class EffectiveParams:
    delta: float
    omega_c_minus: float
    omega_c_plus: float
    a_bar: complex
    n_bar: float
    omega_rabi: float
    delta_q: float
    lam: complex
    alpha: float
    j_eff: float


_HIERARCHY = (
    ("Δ", "g", lambda p: p.delta, lambda p: p.g),
    ("Δ", "J", lambda p: p.delta, lambda p: p.J),
    ("g", "κ", lambda p: p.g, lambda p: p.kappa),
    ("J", "κ", lambda p: p.J, lambda p: p.kappa),
    ("g", "γ", lambda p: p.g, lambda p: p.gamma),
    ("J", "γ", lambda p: p.J, lambda p: p.gamma),
    ("κ", "γ_φ", lambda p: p.kappa, lambda p: p.gamma_phi),
    ("γ", "γ_φ", lambda p: p.gamma, lambda p: p.gamma_phi),
)


def validate_params(p, ratio=HIERARCHY_RATIO):
    """Check the energy-scale hierarchy the effective theory relies
    on. Returns one message per violated inequality (each is also
    logged as a warning); raises ParameterError for non-positive or
    non-finite parameters."""
    for field in dataclasses.fields(p):
        value = getattr(p, field.name)
        if not math.isfinite(value) or value <= 0:
            raise ParameterError("%s must be positive, got %r"
                                 % (field.name, value))

    warnings = []
    if p.delta <= 0:
        warnings.append("Δ > 0 violated, Δ = %g" % p.delta)

    for big, small, get_big, get_small in _HIERARCHY:
        r = get_big(p) / get_small(p)
        if r < ratio:
            warnings.append("%s ≫ %s violated, ratio %g" % (big, small, r))

    for warning in warnings:
        log.warning(warning)

    return warnings


def derived_params(p, d, floor=DETUNING_FLOOR):
    """Mean-field photon amplitude, Rabi scale, renormalized qubit
    detuning and the Raman couplings λ and α, all to lowest order in
    g/Δ."""
    delta = p.delta
    if abs(delta) < floor * p.omega_q:
        raise PerturbationBreakdownError(
            "qubit-cavity detuning %g below floor" % delta)

    r = p.g / delta
    eps = d.epsilon_d
    omega_c_minus = p.omega_c_minus

    a_bar = SQRT2 * eps / complex(d.omega_d - omega_c_minus, p.kappa / 2)
    n_bar = abs(a_bar) ** 2

    delta_q = (p.omega_q - d.omega_d
               + r * r * ((n_bar + 1) * delta + SQRT2 * eps * a_bar.real))
    if abs(delta_q) < floor * p.omega_q:
        raise PerturbationBreakdownError(
            "renormalized qubit detuning %g below floor at omega_d %r"
            % (delta_q, d.omega_d))

    return EffectiveParams(
        delta=delta,
        omega_c_minus=omega_c_minus,
        omega_c_plus=p.omega_c_plus,
        a_bar=a_bar,
        n_bar=n_bar,
        omega_rabi=2 * r * eps,
        delta_q=delta_q,
        lam=r * r * (a_bar * delta + eps / SQRT2),
        alpha=SQRT2 * r * eps / delta_q,
        j_eff=p.J * r * r)
