"""UPA geometry, element patterns, array response and beamforming gain.

Angles are radians: theta is the zenith angle in [0, pi] (0 = straight up,
pi/2 = horizon), phi the azimuth in (-pi, pi]. Element spacings are in
wavelengths, so phase terms need no explicit carrier frequency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .tensors import ComplexVector

PATTERNS = ("isotropic", "directional-3gpp")

# Directional pattern constants (parabolic-in-dB element pattern).
_GMAX_DB = 8.0
_AMAX_DB = 30.0
_SLA_DB = 30.0
_THETA3_DEG = 65.0
_PHI3_DEG = 65.0


@dataclass(frozen=True)
class UpaConfig:
    """Uniform planar array: u_v x u_h elements, spacings in wavelengths."""

    u_h: int = 1
    u_v: int = 1
    d_h: float = 0.5
    d_v: float = 0.5
    pattern: str = "isotropic"

    def __post_init__(self):
        if self.u_h < 1 or self.u_v < 1:
            raise ConfigurationError("element counts must be >= 1")
        if self.d_h <= 0 or self.d_v <= 0:
            raise ConfigurationError("element spacings must be > 0")
        if self.pattern not in PATTERNS:
            raise ConfigurationError(
                f"unknown element pattern {self.pattern!r}, expected one of {PATTERNS}")

    @property
    def u(self) -> int:
        """Total element count U = u_h * u_v."""
        return self.u_h * self.u_v


@dataclass(frozen=True)
class Direction:
    """Propagation direction, normalized to theta in [0, pi], phi in (-pi, pi]."""

    theta: float
    phi: float

    def __post_init__(self):
        th = float(self.theta) % (2.0 * math.pi)
        ph = float(self.phi)
        if th > math.pi:
            # Reflect through the pole; azimuth flips by pi.
            th = 2.0 * math.pi - th
            ph += math.pi
        ph = ph % (2.0 * math.pi)
        if ph > math.pi:
            ph -= 2.0 * math.pi
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @classmethod
    def from_vector(cls, dx: float, dy: float, dz: float) -> "Direction":
        """Direction of the vector (dx, dy, dz) in the global frame."""
        r = math.sqrt(dx * dx + dy * dy + dz * dz)
        if r == 0.0:
            return cls(math.pi / 2.0, 0.0)
        return cls(math.acos(max(-1.0, min(1.0, dz / r))), math.atan2(dy, dx))


def element_gain(pattern: str, direction: Direction) -> float:
    """Element power gain (linear) toward `direction`.

    The directional pattern is parabolic in dB with 65 deg half-power widths,
    30 dB floor and 8 dBi peak; isotropic is 1 everywhere.
    """
    if pattern == "isotropic":
        return 1.0
    if pattern != "directional-3gpp":
        raise ConfigurationError(f"unknown element pattern {pattern!r}")
    theta_deg = math.degrees(direction.theta)
    phi_deg = math.degrees(direction.phi)
    a_v = min(12.0 * ((theta_deg - 90.0) / _THETA3_DEG) ** 2, _SLA_DB)
    a_h = min(12.0 * (phi_deg / _PHI3_DEG) ** 2, _AMAX_DB)
    a_db = _GMAX_DB - min(a_v + a_h, _AMAX_DB)
    return 10.0 ** (a_db / 10.0)


def _response_array(upa: UpaConfig, direction: Direction) -> np.ndarray:
    m = np.arange(upa.u_v)
    n = np.arange(upa.u_h)
    vert = np.exp(2j * math.pi * upa.d_v * math.cos(direction.theta) * m)
    horz = np.exp(2j * math.pi * upa.d_h
                  * math.sin(direction.theta) * math.sin(direction.phi) * n)
    return np.outer(vert, horz).ravel()  # index (m, n), n fastest


def array_response(upa: UpaConfig, direction: Direction) -> ComplexVector:
    """Unit-magnitude phase profile across the array for a plane wave.

    Entry (m, n), flattened with n fastest, is
    exp(j 2 pi m d_v cos theta) * exp(j 2 pi n d_h sin theta sin phi).
    """
    return ComplexVector(_response_array(upa, direction))


def steering_vector(upa: UpaConfig, direction0: Direction) -> ComplexVector:
    """Unit-norm beamforming weights pointing at direction0 (conjugate response)."""
    return ComplexVector(np.conj(_response_array(upa, direction0)) / math.sqrt(upa.u))


def beamforming_gain(upa: UpaConfig, direction: Direction, direction0: Direction,
                     los: str = "LoS", eta: float = 1.0) -> float:
    """Array power gain toward `direction` when steered at `direction0`.

    G = |a(direction)^T w(direction0)|^2 * element_gain; NLoS links are scaled
    by eta (the sidelobe-capture correction), LoS links are not.
    """
    if los not in ("LoS", "NLoS"):
        raise ConfigurationError(f"unknown link condition {los!r}")
    if not 0.0 < eta <= 1.0:
        raise ConfigurationError("eta must lie in (0, 1]")
    a = _response_array(upa, direction)
    w = np.conj(_response_array(upa, direction0)) / math.sqrt(upa.u)
    g = abs(a @ w) ** 2 * element_gain(upa.pattern, direction)
    if los == "NLoS":
        g *= eta
    return float(g)
