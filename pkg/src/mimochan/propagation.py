"""Large-scale propagation: LoS condition, path loss, shadowing, penetration.

Sign convention: large_scale_loss_db returns the value subtracted from the
transmit power, so a positive shadowing sample (a dB gain) reduces the loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .errors import ConfigurationError, DomainError

LOS = "LoS"
NLOS = "NLoS"
CONDITIONS = (LOS, NLOS)

_PARAM_KEYS = ("a", "b", "c", "sigma_sf", "o2i", "eta")


@dataclass(frozen=True)
class ScenarioParams:
    """Path-loss coefficients and large-scale knobs for one (scenario, condition)."""

    scenario: str
    condition: str
    a_coef: float   # dB per decade of distance
    b_coef: float   # dB intercept
    c_coef: float   # dB per decade of carrier frequency
    sigma_sf: float  # shadowing std, dB
    o2i_loss: float = 0.0  # penetration loss, dB
    eta: float = 1.0       # NLoS beamforming correction, linear

    def __post_init__(self):
        if self.condition not in CONDITIONS:
            raise ConfigurationError(f"condition must be LoS or NLoS, got {self.condition!r}")
        if self.a_coef <= 0:
            raise ConfigurationError("a_coef must be > 0")
        if self.sigma_sf < 0 or self.o2i_loss < 0:
            raise ConfigurationError("sigma_sf and o2i_loss must be >= 0")
        if not 0.0 < self.eta <= 1.0:
            raise ConfigurationError("eta must lie in (0, 1]")


@dataclass(frozen=True)
class LinkGeometry:
    """3D/2D distances in meters and carrier frequency in GHz."""

    d3d: float
    d2d: float
    fc: float

    def __post_init__(self):
        if self.d3d <= 0:
            raise DomainError("d3d must be > 0")
        if self.d2d < 0 or self.d3d < self.d2d:
            raise DomainError("need d3d >= d2d >= 0")
        if not 0.5 <= self.fc <= 100.0:
            raise DomainError("fc must lie in [0.5, 100] GHz")


def _parse_params_text(lines, source: str) -> dict:
    table: dict[tuple[str, str], ScenarioParams] = {}
    section = None
    values: dict[str, float] = {}

    def close_section():
        if section is None:
            return
        missing = [k for k in _PARAM_KEYS if k not in values]
        if missing:
            raise ConfigurationError(f"{source}: record {section} missing keys {missing}")
        scenario, condition = section
        table[section] = ScenarioParams(
            scenario=scenario, condition=condition,
            a_coef=values["a"], b_coef=values["b"], c_coef=values["c"],
            sigma_sf=values["sigma_sf"], o2i_loss=values["o2i"], eta=values["eta"])

    for ln, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            close_section()
            parts = line[1:-1].split()
            if len(parts) != 2:
                raise ConfigurationError(f"{source}:{ln}: section must be `[scenario condition]`")
            section = (parts[0], parts[1])
            if section in table:
                raise ConfigurationError(f"{source}:{ln}: duplicate record {section}")
            values = {}
            continue
        if "=" not in line or section is None:
            raise ConfigurationError(f"{source}:{ln}: expected `key = value` inside a section")
        key, _, val = (x.strip() for x in line.partition("="))
        if key not in _PARAM_KEYS:
            raise ConfigurationError(f"{source}:{ln}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"{source}:{ln}: duplicate key {key!r}")
        values[key] = float(val)
    close_section()
    return table


def load_scenario_params(path=None) -> dict:
    """Parse the scenario-parameter file into {(scenario, condition): ScenarioParams}.

    With path=None the file shipped with the package is used. Unknown keys are
    rejected rather than ignored.
    """
    if path is None:
        text = resources.files("mimochan").joinpath("data/scenario_params.txt").read_text()
        return _parse_params_text(text.splitlines(), "scenario_params.txt")
    with open(path) as f:
        return _parse_params_text(f, str(path))


def _p_los_umi(d2d: float) -> float:
    if d2d <= 18.0:
        return 1.0
    e = math.exp(-d2d / 36.0)
    return 18.0 / d2d * (1.0 - e) + e


def _p_los_uma(d2d: float) -> float:
    if d2d <= 18.0:
        return 1.0
    e = math.exp(-d2d / 63.0)
    return 18.0 / d2d * (1.0 - e) + e


def _p_los_rma(d2d: float) -> float:
    if d2d <= 10.0:
        return 1.0
    return math.exp(-(d2d - 10.0) / 1000.0)


def _p_los_inh_mixed(d2d: float) -> float:
    if d2d <= 1.2:
        return 1.0
    if d2d < 6.5:
        return math.exp(-(d2d - 1.2) / 4.7)
    return 0.32 * math.exp(-(d2d - 6.5) / 32.6)


def _p_los_inh_open(d2d: float) -> float:
    if d2d <= 5.0:
        return 1.0
    if d2d <= 49.0:
        return math.exp(-(d2d - 5.0) / 70.8)
    return 0.54 * math.exp(-(d2d - 49.0) / 211.7)


P_LOS_MODELS = {
    "UMi": _p_los_umi,
    "UMa": _p_los_uma,
    "RMa": _p_los_rma,
    "InH-OfficeMixed": _p_los_inh_mixed,
    "InH-OfficeOpen": _p_los_inh_open,
}


def p_los(scenario: str, d2d: float) -> float:
    """Default LoS probability for the scenario at ground distance d2d (m)."""
    try:
        model = P_LOS_MODELS[scenario]
    except KeyError:
        raise ConfigurationError(f"no LoS probability model for scenario {scenario!r}") from None
    return model(d2d)


def determine_los(scenario: str, d2d: float, rng: np.random.Generator,
                  override=None) -> str:
    """Bernoulli LoS/NLoS draw for one link.

    override may be a probability in [0, 1] or a callable d2d -> probability,
    replacing the scenario's default model.
    """
    if d2d < 0:
        raise DomainError("d2d must be >= 0")
    if override is None:
        prob = p_los(scenario, d2d)
    elif callable(override):
        prob = float(override(d2d))
    else:
        prob = float(override)
    if not 0.0 <= prob <= 1.0:
        raise ConfigurationError(f"LoS probability {prob} outside [0, 1]")
    return LOS if rng.random() < prob else NLOS


def path_loss_db(params: ScenarioParams, link: LinkGeometry) -> float:
    """PL = a*log10(d3d) + b + c*log10(fc), in dB."""
    if link.d3d <= 0:
        raise DomainError("d3d must be > 0")
    return (params.a_coef * math.log10(link.d3d) + params.b_coef
            + params.c_coef * math.log10(link.fc))


def shadowing_db(params: ScenarioParams, rng: np.random.Generator,
                 enabled: bool = True) -> float:
    """Zero-mean Gaussian shadowing sample in dB; exactly 0 when disabled."""
    if not enabled or params.sigma_sf == 0.0:
        return 0.0
    return float(rng.normal(0.0, params.sigma_sf))


def large_scale_loss_db(params: ScenarioParams, link: LinkGeometry,
                        shadow_db: float = 0.0) -> float:
    """Total large-scale loss: path loss minus the shadowing gain plus o2i."""
    return path_loss_db(params, link) - shadow_db + params.o2i_loss
