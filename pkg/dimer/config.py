"""Run configuration: flat "key = value" text with # comments. Omitted
physical keys default to the typical circuit-QED values of
model.DEFAULT_PARAMS."""

import dataclasses
import math

from .model import DimerError, DimerParams
from .oracle import DEFAULT_NMAX, FRAMES, SOLVERS
from .protocols import DEFAULT_MARGIN, ProtocolTarget, ridge_span

MODES = ("ness", "protocol", "sweep", "curve", "window", "dark", "oracle")
FORMATS = ("csv", "json")


class ConfigError(DimerError):
    code = 9
    exit_code = 2


class ConfigParseError(ConfigError):
    def __init__(self, line, message):
        ConfigError.__init__(self, "line %d: %s" % (line, message))
        self.line = line


class UnknownKeyError(ConfigParseError):
    pass


class DuplicateKeyError(ConfigParseError):
    pass


class ModeConflictError(ConfigError):
    pass


class MissingKeyError(ConfigError):
    pass


@dataclasses.dataclass(frozen=True)
class RunConfig:
    mode: str
    params: DimerParams = DimerParams()
    epsilon_d: float = None
    omega_d: float = None
    omega_d_min: float = None
    omega_d_max: float = None
    omega_d_points: int = 100
    epsilon_d_min: float = 0.02
    epsilon_d_max: float = 0.12
    epsilon_d_points: int = 100
    target: ProtocolTarget = ProtocolTarget.SINGLET
    lamb_shift: bool = False
    self_consistent_lamb: bool = False
    n_max: int = DEFAULT_NMAX
    frame: str = "displaced"
    solver: str = "iterative"
    margin: float = DEFAULT_MARGIN
    tolerance: float = 0.05
    refine_oracle: bool = True
    threads: int = 1
    out: str = None
    format: str = "csv"

    def omega_d_axis(self):
        """Without explicit bounds the axis covers the target's ridge
        over the configured drive strengths."""
        lo, hi = self.omega_d_min, self.omega_d_max
        if lo is None:
            lo, hi = ridge_span(self.params, self.target, self.epsilon_d_min,
                                self.epsilon_d_max,
                                lamb_shift=self.lamb_shift)
        return _axis(lo, hi, self.omega_d_points)

    def epsilon_d_axis(self):
        return _axis(self.epsilon_d_min, self.epsilon_d_max,
                     self.epsilon_d_points)


def _axis(lo, hi, points):
    if points == 1:
        return (lo,)
    step = (hi - lo) / (points - 1)
    return tuple(lo + i * step for i in range(points - 1)) + (hi,)


PARAM_KEYS = tuple(f.name for f in dataclasses.fields(DimerParams))

OMEGA_AXIS_KEYS = ("omega_d_min", "omega_d_max", "omega_d_points")
EPSILON_AXIS_KEYS = ("epsilon_d_min", "epsilon_d_max", "epsilon_d_points")

# keys that only make sense for some modes
MODE_KEYS = {
    "omega_d": ("ness", "oracle"),
    "margin": ("window",),
    "tolerance": ("oracle",),
    "refine_oracle": ("oracle",),
    "n_max": ("oracle",),
    "frame": ("oracle",),
    "solver": ("oracle",),
    "threads": ("sweep",),
}
MODE_KEYS.update((key, ("sweep",)) for key in OMEGA_AXIS_KEYS)
MODE_KEYS.update((key, ("sweep", "curve")) for key in EPSILON_AXIS_KEYS)

# keys each mode cannot run without
REQUIRED_KEYS = {
    "ness": ("epsilon_d", "omega_d"),
    "protocol": ("epsilon_d",),
    "dark": ("epsilon_d",),
    "oracle": ("epsilon_d",),
}

_TRUE = ("true", "yes", "on", "1")
_FALSE = ("false", "no", "off", "0")


def _float(text):
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("not a finite number: %r" % text)
    return value


def _int(text):
    return int(text)


def _bool(text):
    lowered = text.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ValueError("not a boolean: %r" % text)


def _choice(choices):
    def convert(text):
        if text not in choices:
            raise ValueError("expected one of %s" % ", ".join(choices))
        return text
    return convert


def _path(text):
    if not text:
        raise ValueError("empty path")
    return text


CONVERTERS = {key: _float for key in PARAM_KEYS}
CONVERTERS.update({
    "mode": _choice(MODES),
    "epsilon_d": _float,
    "omega_d": _float,
    "omega_d_min": _float,
    "omega_d_max": _float,
    "omega_d_points": _int,
    "epsilon_d_min": _float,
    "epsilon_d_max": _float,
    "epsilon_d_points": _int,
    "target": lambda text: ProtocolTarget(_choice(
        [t.value for t in ProtocolTarget])(text)),
    "lamb_shift": _bool,
    "self_consistent_lamb": _bool,
    "n_max": _int,
    "frame": _choice(FRAMES),
    "solver": _choice(SOLVERS),
    "margin": _float,
    "tolerance": _float,
    "refine_oracle": _bool,
    "threads": _int,
    "out": _path,
    "format": _choice(FORMATS),
})


def _read_lines(text, values, lines, overriding=False):
    seen = set()
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(number, "expected key = value, got %r"
                                   % line)

        key, text_value = (s.strip() for s in line.split("=", 1))
        if key not in CONVERTERS:
            raise UnknownKeyError(number, "unknown key %r" % key)
        if key in seen:
            raise DuplicateKeyError(number, "duplicate key %r" % key)
        seen.add(key)

        try:
            values[key] = CONVERTERS[key](text_value)
        except ValueError as e:
            raise ConfigParseError(number, "bad value for %s: %s"
                                   % (key, e))
        lines[key] = number


def parse_config(text, mode=None, overrides=(), flags=()):
    """Parse config text into a RunConfig. mode comes from the command
    being run; a different mode in the text is a conflict. overrides
    are extra "key = value" strings that replace values from text, and
    flags replace both."""
    values = {}
    lines = {}
    _read_lines(text, values, lines)
    _read_lines("\n".join(overrides), values, {})
    _read_lines("\n".join(flags), values, {})

    if mode is not None:
        if "mode" in values and values["mode"] != mode:
            raise ModeConflictError(
                "config is for mode %r, running %r" % (values["mode"], mode))
        values["mode"] = mode
    if "mode" not in values:
        raise MissingKeyError("no mode given")
    mode = values.pop("mode")

    for key in values:
        allowed = MODE_KEYS.get(key)
        if allowed is not None and mode not in allowed:
            where = " (line %d)" % lines[key] if key in lines else ""
            raise ModeConflictError("%s%s is not used in %s mode"
                                    % (key, where, mode))

    for key in REQUIRED_KEYS.get(mode, ()):
        if key not in values:
            raise MissingKeyError("%s mode needs %s" % (mode, key))

    params = DimerParams(**{key: values.pop(key) for key in PARAM_KEYS
                            if key in values})
    cfg = RunConfig(mode=mode, params=params, **values)
    _check(cfg)
    return cfg


def _check(cfg):
    axes = []
    if cfg.mode == "sweep":
        if (cfg.omega_d_min is None) != (cfg.omega_d_max is None):
            raise ConfigError("omega_d_min and omega_d_max go together")
        axes.append((cfg.omega_d_min, cfg.omega_d_max, cfg.omega_d_points,
                     "omega_d"))
    if cfg.mode in ("sweep", "curve"):
        axes.append((cfg.epsilon_d_min, cfg.epsilon_d_max,
                     cfg.epsilon_d_points, "epsilon_d"))

    for lo, hi, points, name in axes:
        if points < 1:
            raise ConfigError("%s_points must be >= 1" % name)
        if points > 1 and lo is not None and not lo < hi:
            raise ConfigError("%s_min must be below %s_max" % (name, name))
    if cfg.threads < 1:
        raise ConfigError("threads must be >= 1")


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, ProtocolTarget):
        return value.value
    return str(value)


def format_config(cfg):
    """Config text that parses back to cfg."""
    out = ["mode = %s" % cfg.mode]
    for key in PARAM_KEYS:
        out.append("%s = %s" % (key, _format_value(getattr(cfg.params, key))))

    for field in dataclasses.fields(cfg):
        if field.name in ("mode", "params"):
            continue
        allowed = MODE_KEYS.get(field.name)
        if allowed is not None and cfg.mode not in allowed:
            continue
        value = getattr(cfg, field.name)
        if value is None:
            continue
        out.append("%s = %s" % (field.name, _format_value(value)))
    return "\n".join(out) + "\n"
