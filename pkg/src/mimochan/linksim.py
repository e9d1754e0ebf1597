"""Drop-based SINR simulation under the reference or FTR-fast channel model.

Per drop and per (gNB, UE) pair: LoS condition, shadowing, large-scale loss,
beamforming gain and small-scale fading compose into a received power; each
UE associates to the strongest large-scale gNB and its SINR aggregates the
others as co-channel interference over thermal noise. The reference model
assembles the full per-pair cluster MIMO channel and evaluates the steering
quadratic form; ftr-fast multiplies analytic beamforming gains by a fading
draw from the calibration table.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .antenna import Direction, UpaConfig, beamforming_gain, element_gain, steering_vector
from .calibration import CalibrationTable, lookup_ftr_params
from .errors import ConfigurationError, DomainError
from .ftr import sample_ftr_power
from .propagation import (LinkGeometry, ScenarioParams, determine_los,
                          large_scale_loss_db, load_scenario_params, shadowing_db)
from .reference import FadingConfig, assemble_channel, generate_cluster_params, small_scale_gain

MODELS = ("reference", "ftr-fast")
THERMAL_NOISE_DBM_PER_HZ = -174.0

_scenario_params_cache: dict | None = None


def _default_scenario_params() -> dict:
    global _scenario_params_cache
    if _scenario_params_cache is None:
        _scenario_params_cache = load_scenario_params()
    return _scenario_params_cache


@dataclass(frozen=True)
class GnbPlacement:
    """Base station: position in meters, array config, transmit power in dBm."""

    x: float
    y: float
    z: float
    upa: UpaConfig
    ptx_dbm: float


@dataclass(frozen=True)
class UePlacement:
    x: float
    y: float
    z: float
    upa: UpaConfig


@dataclass(frozen=True)
class Drop:
    """One drop geometry plus the channel model selection."""

    gnbs: tuple
    ues: tuple
    fc: float            # GHz
    bandwidth: float     # Hz
    noise_figure: float  # dB
    scenario: str
    model: str
    shadowing: bool = True
    p_los_override: float | None = None
    fading: FadingConfig = field(default_factory=FadingConfig)

    def __post_init__(self):
        object.__setattr__(self, "gnbs", tuple(self.gnbs))
        object.__setattr__(self, "ues", tuple(self.ues))
        if not self.gnbs or not self.ues:
            raise ConfigurationError("a drop needs at least one gNB and one UE")
        if self.model not in MODELS:
            raise ConfigurationError(f"model must be one of {MODELS}, got {self.model!r}")
        if self.bandwidth <= 0:
            raise ConfigurationError("bandwidth must be > 0")


@dataclass(frozen=True)
class SinrRecord:
    """Per-UE result; interference is total co-channel power in dBm."""

    ue: int
    gnb: int
    sinr_db: float
    rx_power_dbm: float
    interference_dbm: float
    noise_dbm: float

    def __post_init__(self):
        denom = 10.0 ** (self.interference_dbm / 10.0) + 10.0 ** (self.noise_dbm / 10.0)
        expect = self.rx_power_dbm - 10.0 * math.log10(denom)
        if abs(expect - self.sinr_db) > 1e-9:
            raise ConfigurationError("sinr_db is inconsistent with its components")


def rx_power_dbm(ptx: float, params: ScenarioParams, link: LinkGeometry,
                 gain: float, fading: float, shadow_db: float = 0.0) -> float:
    """P_R = P_T - PL + S + G + F, all in dB domain."""
    if gain <= 0 or fading <= 0:
        raise DomainError("gain and fading must be > 0")
    loss = large_scale_loss_db(params, link, shadow_db)
    return ptx - loss + 10.0 * math.log10(gain) + 10.0 * math.log10(fading)


def noise_power_dbm(bandwidth: float, noise_figure: float) -> float:
    return THERMAL_NOISE_DBM_PER_HZ + noise_figure + 10.0 * math.log10(bandwidth)


def _geometry(g: GnbPlacement, u: UePlacement, fc: float):
    dx, dy, dz = u.x - g.x, u.y - g.y, u.z - g.z
    d2d = math.hypot(dx, dy)
    d3d = math.sqrt(dx * dx + dy * dy + dz * dz)
    link = LinkGeometry(d3d=d3d, d2d=d2d, fc=fc)
    dir_dep = Direction.from_vector(dx, dy, dz)      # at the gNB, toward the UE
    dir_arr = Direction.from_vector(-dx, -dy, -dz)   # at the UE, toward the gNB
    return link, dir_dep, dir_arr


def run_drop(drop: Drop, rng: np.random.Generator,
             table: CalibrationTable | None = None,
             scenario_params: dict | None = None) -> list:
    """Simulate one drop; returns one SinrRecord per UE in UE order.

    Association maximizes transmit power minus large-scale loss (beamforming
    gain is undefined before steering targets exist). The serving gNB steers
    at the recorded UE; every other gNB steers at one of its own served UEs
    (drawn per drop; a gNB serving nobody aims at a uniformly drawn UE).
    """
    if drop.model == "ftr-fast" and table is None:
        raise ConfigurationError("model ftr-fast requires a calibration table")
    sp = scenario_params if scenario_params is not None else _default_scenario_params()

    n_g, n_u = len(drop.gnbs), len(drop.ues)
    geom = [[_geometry(g, u, drop.fc) for u in drop.ues] for g in drop.gnbs]

    def params_for(condition: str) -> ScenarioParams:
        try:
            return sp[(drop.scenario, condition)]
        except KeyError:
            raise ConfigurationError(
                f"no scenario parameters for ({drop.scenario}, {condition})") from None

    # Phase 1: per-pair LoS condition and shadowing, gNB-major order.
    cond = [[None] * n_u for _ in range(n_g)]
    shadow = [[0.0] * n_u for _ in range(n_g)]
    for gi in range(n_g):
        for ui in range(n_u):
            link, _, _ = geom[gi][ui]
            cond[gi][ui] = determine_los(drop.scenario, link.d2d, rng,
                                         override=drop.p_los_override)
            shadow[gi][ui] = shadowing_db(params_for(cond[gi][ui]), rng,
                                          enabled=drop.shadowing)

    # Phase 2: association by strongest large-scale receive power.
    serving = []
    for ui in range(n_u):
        best, best_p = 0, -math.inf
        for gi in range(n_g):
            p = drop.gnbs[gi].ptx_dbm - large_scale_loss_db(
                params_for(cond[gi][ui]), geom[gi][ui][0], shadow[gi][ui])
            if p > best_p:
                best, best_p = gi, p
        serving.append(best)

    # Phase 3: per-gNB steering target among its served UEs.
    target = []
    for gi in range(n_g):
        served = [ui for ui in range(n_u) if serving[ui] == gi]
        candidates = served if served else list(range(n_u))
        pick = candidates[int(rng.integers(len(candidates)))] if len(candidates) > 1 \
            else candidates[0]
        target.append(pick)

    # Phase 4: per-pair received power, gNB-major order of fading draws.
    rx = [[0.0] * n_u for _ in range(n_g)]
    for gi in range(n_g):
        g = drop.gnbs[gi]
        for ui in range(n_u):
            u = drop.ues[ui]
            link, dir_dep, dir_arr = geom[gi][ui]
            c = cond[gi][ui]
            params = params_for(c)
            aim_ui = ui if serving[ui] == gi else target[gi]
            dir_aim = geom[gi][aim_ui][1]
            dir_ue_aim = geom[serving[ui]][ui][2]

            if drop.model == "ftr-fast":
                g_tx = beamforming_gain(g.upa, dir_dep, dir_aim, los="LoS")
                g_rx = beamforming_gain(u.upa, dir_arr, dir_ue_aim, los="LoS")
                gain = g_tx * g_rx
                if c == "NLoS":
                    gain *= params.eta
                fading = max(sample_ftr_power(
                    lookup_ftr_params(table, drop.scenario, c), rng), 1e-300)
            else:
                cs = generate_cluster_params(drop.fading, c, rng,
                                             mean_aod=dir_dep.phi, mean_zod=dir_dep.theta,
                                             mean_aoa=dir_arr.phi, mean_zoa=dir_arr.theta)
                h3 = assemble_channel(cs, tx=g.upa, rx=u.upa, cached=True)
                w_ue = steering_vector(u.upa, dir_ue_aim)
                w_g = steering_vector(g.upa, dir_aim)
                fading = small_scale_gain(h3, w_ue, w_g)
                gain = (element_gain(g.upa.pattern, dir_dep)
                        * element_gain(u.upa.pattern, dir_arr))
                fading = max(fading, 1e-300)

            rx[gi][ui] = rx_power_dbm(g.ptx_dbm, params, link, gain, fading,
                                      shadow_db=shadow[gi][ui])

    noise = noise_power_dbm(drop.bandwidth, drop.noise_figure)
    records = []
    for ui in range(n_u):
        gi = serving[ui]
        interf = sum(10.0 ** (rx[gj][ui] / 10.0) for gj in range(n_g) if gj != gi)
        interf_dbm = 10.0 * math.log10(interf) if interf > 0 else -math.inf
        denom = interf + 10.0 ** (noise / 10.0)
        sinr = rx[gi][ui] - 10.0 * math.log10(denom)
        records.append(SinrRecord(ue=ui, gnb=gi, sinr_db=sinr, rx_power_dbm=rx[gi][ui],
                                  interference_dbm=interf_dbm, noise_dbm=noise))
    return records


def run_drops(drop: Drop, n_drops: int, rng_factory, table: CalibrationTable | None = None,
              scenario_params: dict | None = None) -> list:
    """n_drops independent drops; rng_factory(i) supplies the per-drop stream.

    Records concatenate in drop order, so parallel evaluation would reduce
    identically.
    """
    if n_drops < 1:
        raise ConfigurationError("n_drops must be >= 1")
    records = []
    for i in range(n_drops):
        records.extend(run_drop(drop, rng_factory(i), table=table,
                                scenario_params=scenario_params))
    return records


def sinr_ecdf(records) -> tuple:
    """Sorted SINR values with cumulative probabilities ((i+1)/n steps)."""
    if not records:
        raise DomainError("no records")
    values = np.sort(np.array([r.sinr_db for r in records], dtype=np.float64))
    probs = np.arange(1, values.size + 1, dtype=np.float64) / values.size
    return values, probs


_TOP_KEYS = ("scenario", "fc", "bandwidth", "noise_figure", "model", "seed",
             "drops", "shadowing", "p_los")
_FADING_KEYS = ("n_clusters_nlos", "n_clusters_los", "angular_spread_deg",
                "k_factor", "power_decay")
_NODE_KEYS = ("pos", "ptx", "upa")


def _parse_upa(value: str, where: str) -> UpaConfig:
    parts = value.split()
    if len(parts) != 5:
        raise ConfigurationError(f"{where}: upa needs `uh uv dh dv pattern`")
    return UpaConfig(u_h=int(parts[0]), u_v=int(parts[1]),
                     d_h=float(parts[2]), d_v=float(parts[3]), pattern=parts[4])


def parse_drop_config(path):
    """Read a drop configuration file; returns (Drop, seed, n_drops).

    Structured text: top-level `key = value` lines (scenario, fc, bandwidth,
    noise_figure, model, seed, drops, shadowing on|off, p_los auto|<prob>),
    then repeatable `[gnb]` / `[ue]` sections with pos/ptx/upa keys and an
    optional `[fading]` section mirroring FadingConfig. Unknown keys are
    rejected.
    """
    top: dict = {}
    fading_kw: dict = {}
    gnbs: list = []
    ues: list = []
    section = None  # None | "fading" | dict being filled

    def close_node(where: str):
        if not isinstance(section, dict):
            return
        kind = section.pop("_kind")
        if "pos" not in section or "upa" not in section:
            raise ConfigurationError(f"{where}: [{kind}] needs pos and upa")
        x, y, z = (float(v) for v in section["pos"].split())
        upa = _parse_upa(section["upa"], where)
        if kind == "gnb":
            if "ptx" not in section:
                raise ConfigurationError(f"{where}: [gnb] needs ptx")
            gnbs.append(GnbPlacement(x, y, z, upa, float(section["ptx"])))
        else:
            if "ptx" in section:
                raise ConfigurationError(f"{where}: [ue] does not take ptx")
            ues.append(UePlacement(x, y, z, upa))

    with open(path) as f:
        for ln, raw in enumerate(f, 1):
            where = f"{path}:{ln}"
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                close_node(where)
                name = line[1:-1].strip()
                if name == "fading":
                    section = "fading"
                elif name in ("gnb", "ue"):
                    section = {"_kind": name}
                else:
                    raise ConfigurationError(f"{where}: unknown section [{name}]")
                continue
            if "=" not in line:
                raise ConfigurationError(f"{where}: expected `key = value`")
            key, _, value = (x.strip() for x in line.partition("="))
            if section is None:
                if key not in _TOP_KEYS:
                    raise ConfigurationError(f"{where}: unknown key {key!r}")
                if key in top:
                    raise ConfigurationError(f"{where}: duplicate key {key!r}")
                top[key] = value
            elif section == "fading":
                if key not in _FADING_KEYS:
                    raise ConfigurationError(f"{where}: unknown fading key {key!r}")
                fading_kw[key] = int(value) if key.startswith("n_clusters") else float(value)
            else:
                if key not in _NODE_KEYS:
                    raise ConfigurationError(f"{where}: unknown key {key!r}")
                if key in section:
                    raise ConfigurationError(f"{where}: duplicate key {key!r}")
                section[key] = value
        close_node(f"{path}:end")

    for required in ("scenario", "fc", "bandwidth", "model"):
        if required not in top:
            raise ConfigurationError(f"{path}: missing top-level key {required!r}")
    p_los_raw = top.get("p_los", "auto")
    p_los_override = None if p_los_raw == "auto" else float(p_los_raw)
    shadowing_raw = top.get("shadowing", "on")
    if shadowing_raw not in ("on", "off"):
        raise ConfigurationError(f"{path}: shadowing must be on or off")
    drop = Drop(
        gnbs=tuple(gnbs), ues=tuple(ues), fc=float(top["fc"]),
        bandwidth=float(top["bandwidth"]),
        noise_figure=float(top.get("noise_figure", "7")),
        scenario=top["scenario"], model=top["model"],
        shadowing=shadowing_raw == "on",
        p_los_override=p_los_override,
        fading=FadingConfig(**fading_kw),
    )
    return drop, int(top.get("seed", "1")), int(top.get("drops", "100"))
