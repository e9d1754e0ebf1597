"""Cluster-based MIMO reference channel with cached trigonometric assembly.

Each cluster contributes one U_rx x U_tx page: page n entry (u, s) =
sqrt(power_n) * alpha_n * a_rx(arrival)[u] * a_tx(departure)[s]. The cached
assembly evaluates the six sin/cos of the cluster angles once per cluster and
fills pages with outer products of phase ramps; the naive assembly recomputes
them for every matrix entry inside Python loops. Both paths agree to 1e-12
and feed instrumented trig counters so tests can assert call counts rather
than wall clock.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .antenna import UpaConfig
from .calibration import FadingSampleSet
from .errors import ConfigurationError, DimensionError
from .tensors import ComplexTensor3, ComplexVector, tensor_quadratic_form

DEFAULT_ELEMENT_BUDGET = 1 << 26

_trig_calls = 0


def reset_trig_counter() -> None:
    global _trig_calls
    _trig_calls = 0


def trig_call_count() -> int:
    """Scalar sin/cos evaluations since the last reset (test instrumentation)."""
    return _trig_calls


def _count_trig(n: int) -> None:
    global _trig_calls
    _trig_calls += n


@dataclass(frozen=True)
class FadingConfig:
    """Knobs of the reference channel (non-normative defaults).

    LoS links get n_clusters_los diffuse clusters plus one deterministic
    dominant ray carrying k_factor/(k_factor+1) of the power; NLoS links get
    n_clusters_nlos diffuse clusters. power_decay is the e-folding length of
    the per-cluster power profile, in cluster indices.
    """

    n_clusters_nlos: int = 20
    n_clusters_los: int = 12
    angular_spread_deg: float = 10.0
    k_factor: float = 10.0
    power_decay: float = 6.0

    def __post_init__(self):
        if self.n_clusters_nlos < 1 or self.n_clusters_los < 0:
            raise ConfigurationError("need n_clusters_nlos >= 1 and n_clusters_los >= 0")
        if self.angular_spread_deg < 0:
            raise ConfigurationError("angular spread must be >= 0")
        if self.k_factor < 0:
            raise ConfigurationError("k_factor must be >= 0")
        if self.power_decay <= 0:
            raise ConfigurationError("power_decay must be > 0")


@dataclass(frozen=True)
class ClusterSet:
    """Per-cluster powers, departure/arrival angles and complex gains."""

    n_clusters: int
    powers: np.ndarray
    aod: np.ndarray
    zod: np.ndarray
    aoa: np.ndarray
    zoa: np.ndarray
    phases: np.ndarray  # complex gain alpha_n per cluster
    k_factor: float

    def __post_init__(self):
        n = self.n_clusters
        if n < 1:
            raise ConfigurationError("cluster count must be >= 1")
        for name in ("powers", "aod", "zod", "aoa", "zoa", "phases"):
            arr = getattr(self, name)
            if arr.shape != (n,):
                raise ConfigurationError(f"{name} must have length {n}")
        if abs(float(self.powers.sum()) - 1.0) > 1e-9:
            raise ConfigurationError("cluster powers must sum to 1")


def _decay_profile(n: int, decay: float) -> np.ndarray:
    p = np.exp(-np.arange(n) / decay)
    return p / p.sum()


def _wrap_azimuth(a: np.ndarray) -> np.ndarray:
    a = np.mod(a, 2.0 * math.pi)
    a[a > math.pi] -= 2.0 * math.pi
    return a


def _reflect_zenith(z: np.ndarray) -> np.ndarray:
    z = np.mod(z, 2.0 * math.pi)
    z[z > math.pi] = 2.0 * math.pi - z[z > math.pi]
    return z


def generate_cluster_params(cfg: FadingConfig, condition: str, rng: np.random.Generator,
                            mean_aod: float = 0.0, mean_zod: float = math.pi / 2.0,
                            mean_aoa: float = 0.0, mean_zoa: float = math.pi / 2.0) -> ClusterSet:
    """Draw one ClusterSet around the given mean departure/arrival direction.

    Diffuse draw order per set: aod, zod, aoa, zoa, Re(alpha), Im(alpha).
    """
    if condition not in ("LoS", "NLoS"):
        raise ConfigurationError(f"unknown link condition {condition!r}")
    spread = math.radians(cfg.angular_spread_deg)
    if condition == "LoS":
        n_diffuse = cfg.n_clusters_los
        n = n_diffuse + 1
    else:
        n_diffuse = cfg.n_clusters_nlos
        n = n_diffuse
        if n < 1:
            raise ConfigurationError("NLoS needs at least one cluster")

    def draw_angles(mean, wrap):
        return wrap(mean + rng.normal(0.0, spread, n_diffuse))

    aod = draw_angles(mean_aod, _wrap_azimuth)
    zod = draw_angles(mean_zod, _reflect_zenith)
    aoa = draw_angles(mean_aoa, _wrap_azimuth)
    zoa = draw_angles(mean_zoa, _reflect_zenith)
    alpha = (rng.normal(0.0, math.sqrt(0.5), n_diffuse)
             + 1j * rng.normal(0.0, math.sqrt(0.5), n_diffuse))
    powers = _decay_profile(max(n_diffuse, 1), cfg.power_decay)

    if condition == "LoS":
        k = cfg.k_factor
        if n_diffuse == 0:
            # Degenerate single-ray set: the dominant ray carries everything.
            return ClusterSet(1, np.array([1.0]), np.array([mean_aod]), np.array([mean_zod]),
                              np.array([mean_aoa]), np.array([mean_zoa]),
                              np.array([1.0 + 0.0j]), k)
        powers = np.concatenate(([k / (k + 1.0)], powers / (k + 1.0)))
        aod = np.concatenate(([mean_aod], aod))
        zod = np.concatenate(([mean_zod], zod))
        aoa = np.concatenate(([mean_aoa], aoa))
        zoa = np.concatenate(([mean_zoa], zoa))
        alpha = np.concatenate(([1.0 + 0.0j], alpha))
        return ClusterSet(n, powers, aod, zod, aoa, zoa, alpha, k)

    return ClusterSet(n, powers, aod, zod, aoa, zoa, alpha, cfg.k_factor)


def assemble_channel(cs: ClusterSet, tx: UpaConfig, rx: UpaConfig, cached: bool = True,
                     element_budget: int = DEFAULT_ELEMENT_BUDGET) -> ComplexTensor3:
    """Per-cluster channel pages (N pages of U_rx x U_tx)."""
    u_rx, u_tx = rx.u, tx.u
    if cs.n_clusters * u_rx * u_tx > element_budget:
        raise ConfigurationError(
            f"channel of {cs.n_clusters}x{u_rx}x{u_tx} entries exceeds the "
            f"element budget {element_budget}")
    if cached:
        return _assemble_cached(cs, tx, rx)
    return _assemble_naive(cs, tx, rx)


def _steering_ramps(upa: UpaConfig, zenith, azimuth):
    """Per-cluster element phasors, batched: (N, U) from (N,) angle arrays.

    Three trig evaluations per cluster; the per-element phase ramps are
    complex-exponential products, not additional angle trig.
    """
    step_v = 2.0 * math.pi * upa.d_v * np.cos(zenith)
    step_h = 2.0 * math.pi * upa.d_h * np.sin(zenith) * np.sin(azimuth)
    _count_trig(3 * len(zenith))
    ramp_v = np.exp(1j * step_v[:, None] * np.arange(upa.u_v))
    ramp_h = np.exp(1j * step_h[:, None] * np.arange(upa.u_h))
    return (ramp_v[:, :, None] * ramp_h[:, None, :]).reshape(len(zenith), upa.u)


def _assemble_cached(cs: ClusterSet, tx: UpaConfig, rx: UpaConfig) -> ComplexTensor3:
    # Angle trig is evaluated once per cluster and reused for every entry.
    a_rx = _steering_ramps(rx, cs.zoa, cs.aoa)
    a_tx = _steering_ramps(tx, cs.zod, cs.aod)
    coef = np.sqrt(cs.powers) * cs.phases
    pages = (coef[:, None, None] * a_rx[:, :, None]) * a_tx[:, None, :]
    return ComplexTensor3(pages)


def _assemble_naive(cs: ClusterSet, tx: UpaConfig, rx: UpaConfig) -> ComplexTensor3:
    pages = np.empty((cs.n_clusters, rx.u, tx.u), dtype=np.complex128)
    for n in range(cs.n_clusters):
        scale = math.sqrt(cs.powers[n]) * cs.phases[n]
        zoa, aoa, zod, aod = cs.zoa[n], cs.aoa[n], cs.zod[n], cs.aod[n]
        for u in range(rx.u):
            m_r, n_r = divmod(u, rx.u_h)
            for s in range(tx.u):
                m_t, n_t = divmod(s, tx.u_h)
                # Recompute the cluster trig for every entry (the uncached layout).
                phase_rx = 2.0 * math.pi * (rx.d_v * m_r * math.cos(zoa)
                                            + rx.d_h * n_r * math.sin(zoa) * math.sin(aoa))
                phase_tx = 2.0 * math.pi * (tx.d_v * m_t * math.cos(zod)
                                            + tx.d_h * n_t * math.sin(zod) * math.sin(aod))
                _count_trig(6)
                pages[n, u, s] = scale * cmath.exp(1j * (phase_rx + phase_tx))
    return ComplexTensor3(pages)


def small_scale_gain(h3: ComplexTensor3, w_t, w_r, backend: str | None = None) -> float:
    """|sum_n w_t . page_n . w_r|^2; w_t pairs with rows (arrival side)."""
    contributions = tensor_quadratic_form(w_t, h3, w_r, backend=backend)
    return float(abs(contributions.entries.sum()) ** 2)


_UNIT_WEIGHT = ComplexVector([1.0 + 0.0j])


def reference_fading_samples(cfg: FadingConfig, condition: str, count: int,
                             rng: np.random.Generator, scenario: str = "UMi",
                             fc: float = 3.5) -> FadingSampleSet:
    """Unit-mean small-scale power samples with single isotropic antennas.

    Each draw generates a fresh ClusterSet; with 1x1 arrays the quadratic form
    collapses to |sum_n sqrt(p_n) alpha_n|^2, which is what is computed (the
    equivalence with the assembled-channel path is covered by tests).
    """
    if count < 1:
        raise ConfigurationError("count must be >= 1")
    samples = np.empty(count)
    for i in range(count):
        cs = generate_cluster_params(cfg, condition, rng)
        samples[i] = abs(np.sqrt(cs.powers) @ cs.phases) ** 2
    return FadingSampleSet(samples=samples, scenario=scenario, condition=condition, fc=fc)
