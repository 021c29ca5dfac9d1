"""Physical configuration, driving protocols and Dicke-level distributions.

Natural units are used throughout (hbar = k_B = 1). A register of ``N``
qubits prepared in the permutation-symmetric sector is described by the
populations ``p[0..N]`` of the Dicke states with ``n`` excitations; level
``n`` has energy ``n * omega(t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError

NORM_TOL = 1e-9
NEG_TOL = 1e-12
# relative slack when deciding whether t lies inside [0, tau]
_T_SLACK = 1e-12


@dataclass(frozen=True)
class SystemParams:
    """Register size, bath inverse temperature, bare coupling and duration."""

    n_qubits: int
    beta: float = 1.0
    gamma0: float = 1.0
    tau: float = 1.0

    def __post_init__(self):
        if isinstance(self.n_qubits, bool) or int(self.n_qubits) != self.n_qubits:
            raise DomainError(f"n_qubits must be an integer, got {self.n_qubits!r}")
        object.__setattr__(self, "n_qubits", int(self.n_qubits))
        if self.n_qubits < 1:
            raise DomainError(f"n_qubits must be >= 1, got {self.n_qubits}")
        for name in ("beta", "gamma0", "tau"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value <= 0:
                raise DomainError(f"{name} must be a positive finite number, got {value}")
            object.__setattr__(self, name, value)

    def with_n(self, n_qubits: int) -> "SystemParams":
        return SystemParams(n_qubits, self.beta, self.gamma0, self.tau)

    def as_dict(self) -> dict:
        return {"n_qubits": self.n_qubits, "beta": self.beta,
                "gamma0": self.gamma0, "tau": self.tau}


# ---------------------------------------------------------------------------
# protocols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Protocol:
    """Schedule of the level splitting ``omega(t)`` on ``[0, duration]``.

    Subclasses implement :meth:`_value`; evaluation is pure so it can be
    called freely from inside the adaptive stepper.
    """

    duration: float

    kind = "abstract"

    def __post_init__(self):
        duration = float(self.duration)
        if not math.isfinite(duration) or duration <= 0:
            raise DomainError(f"protocol duration must be positive, got {duration}")
        object.__setattr__(self, "duration", duration)

    def _value(self, t):
        raise NotImplementedError

    def __call__(self, t):
        return self._value(t)

    @property
    def omega_zero_plus(self) -> float:
        return float(self._value(0.0))

    @property
    def breakpoints(self) -> tuple:
        """Interior times where omega(t) has a kink; the stepper lands on them."""
        return ()

    def is_monotone_increasing(self) -> bool:
        return True

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Quench(Protocol):
    """Constant splitting ``omega_q`` switched on instantaneously at t = 0.

    The jump from zero at t = 0 (and back to zero after tau) only exchanges
    work, so the integration window sees the constant value.
    """

    omega_q: float = 1.0

    kind = "quench"

    def __post_init__(self):
        super().__post_init__()
        _check_nonneg("omega_q", self.omega_q)
        object.__setattr__(self, "omega_q", float(self.omega_q))

    def _value(self, t):
        if np.ndim(t):
            return np.full(np.shape(t), self.omega_q)
        return self.omega_q

    @property
    def omega_zero_plus(self) -> float:
        return self.omega_q

    def to_dict(self):
        return {"kind": self.kind, "duration": self.duration, "omega": self.omega_q}


@dataclass(frozen=True)
class Linear(Protocol):
    """Ramp ``omega(t) = rate_coeff * t``."""

    rate_coeff: float = 1.0

    kind = "linear"

    def __post_init__(self):
        super().__post_init__()
        _check_nonneg("rate_coeff", self.rate_coeff)
        object.__setattr__(self, "rate_coeff", float(self.rate_coeff))

    def _value(self, t):
        return self.rate_coeff * t

    @property
    def omega_zero_plus(self) -> float:
        return 0.0

    def to_dict(self):
        return {"kind": self.kind, "duration": self.duration, "rate_coeff": self.rate_coeff}


@dataclass(frozen=True)
class Exponential(Protocol):
    """``omega(t) = scale * (exp(rate * t) - 1)``."""

    scale: float = 1.0
    rate: float = 1.0

    kind = "exponential"

    def __post_init__(self):
        super().__post_init__()
        _check_nonneg("scale", self.scale)
        _check_nonneg("rate", self.rate)
        object.__setattr__(self, "scale", float(self.scale))
        object.__setattr__(self, "rate", float(self.rate))

    def _value(self, t):
        return self.scale * np.expm1(self.rate * t)

    @property
    def omega_zero_plus(self) -> float:
        return 0.0

    def to_dict(self):
        return {"kind": self.kind, "duration": self.duration,
                "scale": self.scale, "rate": self.rate}


@dataclass(frozen=True)
class Tabulated(Protocol):
    """Piecewise-linear interpolation through ``(time, omega)`` points.

    The first time must be 0 and the last must equal ``duration``.
    """

    points: tuple = field(default=())

    kind = "tabulated"

    def __post_init__(self):
        super().__post_init__()
        pts = tuple((float(t), float(w)) for t, w in self.points)
        if len(pts) < 2:
            raise DomainError("tabulated protocol needs at least two points")
        times = np.array([p[0] for p in pts])
        values = np.array([p[1] for p in pts])
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise DomainError("tabulated protocol points must be finite")
        if np.any(np.diff(times) <= 0):
            raise DomainError("tabulated times must be strictly increasing")
        if times[0] != 0.0:
            raise DomainError(f"first tabulated time must be 0, got {times[0]}")
        if not math.isclose(times[-1], self.duration, rel_tol=1e-12, abs_tol=0.0):
            raise DomainError(
                f"last tabulated time {times[-1]} does not match duration {self.duration}")
        if np.any(values < 0):
            raise DomainError("tabulated omega values must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "_times", times)
        object.__setattr__(self, "_values", values)

    def _value(self, t):
        out = np.interp(t, self._times, self._values)
        return out if np.ndim(t) else float(out)

    @property
    def omega_zero_plus(self) -> float:
        return float(self._values[0])

    @property
    def breakpoints(self):
        return tuple(float(t) for t in self._times[1:-1])

    def is_monotone_increasing(self) -> bool:
        return bool(np.all(np.diff(self._values) >= 0))

    def to_dict(self):
        return {"kind": self.kind, "duration": self.duration,
                "points": [list(p) for p in self.points]}


def _check_nonneg(name, value):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be a nonnegative finite number, got {value}")


PROTOCOL_KINDS = {cls.kind: cls for cls in (Quench, Linear, Exponential, Tabulated)}


def figure_protocols(params: SystemParams) -> dict:
    """The three reference schedules: quench at 1/beta, linear and exponential ramps."""
    kT = 1.0 / params.beta
    return {
        "quench": Quench(params.tau, omega_q=kT),
        "linear": Linear(params.tau, rate_coeff=kT * params.gamma0),
        "exponential": Exponential(params.tau, scale=kT, rate=params.gamma0),
    }


def protocol_from_dict(doc: dict, duration: float | None = None) -> Protocol:
    """Build a protocol from a key-value document (see README for the schema).

    ``duration`` fills in a missing ``duration`` key; when both are given
    they must agree.
    """
    doc = dict(doc)
    kind = str(doc.pop("kind", "")).lower()
    if kind not in PROTOCOL_KINDS:
        raise DomainError(f"unknown protocol kind {kind!r}; expected one of {sorted(PROTOCOL_KINDS)}")
    doc.pop("schema_version", None)
    dur = doc.pop("duration", None)
    if dur is None:
        if duration is None and kind == "tabulated":
            dur = _parse_points(doc.get("points"))[-1][0]
        elif duration is None:
            raise DomainError("protocol document lacks a duration")
        else:
            dur = duration
    elif duration is not None and not math.isclose(float(dur), float(duration), rel_tol=1e-12):
        raise DomainError(f"protocol duration {dur} differs from tau = {duration}")
    try:
        if kind == "quench":
            return Quench(dur, omega_q=doc.pop("omega", doc.pop("omega_q", 1.0)), **doc)
        if kind == "linear":
            return Linear(dur, **doc)
        if kind == "exponential":
            return Exponential(dur, **doc)
        return Tabulated(dur, points=_parse_points(doc.pop("points", None)), **doc)
    except TypeError as exc:
        raise DomainError(f"bad parameters for {kind} protocol: {exc}") from None


def _parse_points(raw) -> list:
    if raw is None:
        raise DomainError("tabulated protocol needs 'points'")
    if isinstance(raw, str):
        rows = []
        for line in raw.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            cols = line.replace(",", " ").split()
            if len(cols) != 2:
                raise DomainError(f"tabulated row must have two columns: {line!r}")
            rows.append((float(cols[0]), float(cols[1])))
        return rows
    try:
        return [(float(t), float(w)) for t, w in raw]
    except (TypeError, ValueError):
        raise DomainError("tabulated points must be (t, omega) pairs") from None


def omega_at(protocol: Protocol, t: float) -> float:
    """Splitting at time ``t``; raises :class:`DomainError` outside ``[0, tau]``."""
    tau = protocol.duration
    if not (-_T_SLACK * tau <= t <= tau * (1 + _T_SLACK)):
        raise DomainError(f"t = {t} outside [0, {tau}]")
    return float(protocol(min(max(t, 0.0), tau)))


def omega_zero_plus(protocol: Protocol) -> float:
    """Right limit of omega at t = 0, stored explicitly for discontinuous schedules."""
    return protocol.omega_zero_plus


# ---------------------------------------------------------------------------
# rates and states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateSet:
    gamma_down: float
    gamma_up: float
    delta: float
    w_minus: np.ndarray
    w_plus: np.ndarray


def degeneracy(n_qubits: int) -> np.ndarray:
    """``n (N - n + 1)`` for n = 0..N: the squared collective lowering matrix element."""
    n = np.arange(n_qubits + 1, dtype=float)
    return n * (n_qubits - n + 1)


def bath_rates(beta: float, gamma0: float, omega: float) -> tuple[float, float]:
    """(decay, excitation) rates in detailed balance with the bath at splitting ``omega``."""
    x = beta * omega
    # logistic in both tails without overflow
    if x >= 0:
        e = math.exp(-x)
        down = gamma0 / (1.0 + e)
        up = gamma0 * e / (1.0 + e)
    else:
        e = math.exp(x)
        down = gamma0 * e / (1.0 + e)
        up = gamma0 / (1.0 + e)
    return down, up


def build_rates(params: SystemParams, omega: float) -> RateSet:
    if omega < 0:
        raise DomainError(f"omega must be nonnegative, got {omega}")
    down, up = bath_rates(params.beta, params.gamma0, omega)
    d = degeneracy(params.n_qubits)
    w_minus = d * down
    w_plus = np.zeros_like(d)
    w_plus[:-1] = d[1:] * up
    delta = params.gamma0 * math.tanh(0.5 * params.beta * omega)
    for arr in (w_minus, w_plus):
        arr.setflags(write=False)
    return RateSet(down, up, delta, w_minus, w_plus)


@dataclass(frozen=True)
class DickeDistribution:
    """Populations of the N + 1 Dicke levels."""

    n_qubits: int
    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 1 or p.size != self.n_qubits + 1:
            raise DomainError(
                f"expected {self.n_qubits + 1} populations for N = {self.n_qubits}, got shape {p.shape}")
        total = p.sum()
        if abs(total - 1.0) > NORM_TOL:
            raise DomainError(f"populations sum to {total!r}, not 1")
        if p.min() < -NEG_TOL:
            raise DomainError(f"negative population {p.min()!r} beyond integration noise")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def __len__(self):
        return self.p.size


def initial_state(n_qubits: int) -> DickeDistribution:
    """Uniform populations: each qubit equally likely ground or excited."""
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise DomainError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    n_qubits = int(n_qubits)
    return DickeDistribution(n_qubits, np.full(n_qubits + 1, 1.0 / (n_qubits + 1)))


def geometric_state(n_qubits: int, beta: float, omega: float) -> DickeDistribution:
    """Stationary populations at frozen ``omega``: ``p_n`` proportional to ``exp(-n beta omega)``."""
    logw = -beta * omega * np.arange(n_qubits + 1)
    w = np.exp(logw - logw.max())
    return DickeDistribution(n_qubits, w / w.sum())


__all__ = [
    "SystemParams", "Protocol", "Quench", "Linear", "Exponential", "Tabulated",
    "RateSet", "DickeDistribution", "PROTOCOL_KINDS", "figure_protocols",
    "protocol_from_dict", "omega_at", "omega_zero_plus", "build_rates", "bath_rates",
    "degeneracy", "initial_state", "geometric_state",
]
