"""Anderson-Darling fitting of FTR parameters and the fitted lookup table.

fit_ftr exhaustively scores every grid triple with the Anderson-Darling
statistic A^2 = -n - S(F) and returns the minimizer (ties broken by
lexicographic (m, k, delta) order). The candidate CDF is evaluated on a dense
log-spaced grid spanning the sample range and interpolated to the samples;
the interpolation error is orders of magnitude below the Monte Carlo noise of
an empirical CDF at the calibration sample counts (covered by tests).
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .errors import ConfigurationError, DomainError, TableLookupError
from .ftr import FtrParameters, QuadratureConfig, ftr_cdf, ftr_from_k_delta

_CDF_EPS = 1e-15
_FIT_GRID_POINTS = 128

# Fit-path quadrature: accuracy at far-from-optimum candidates cannot move the
# argmin, so the xi axis is not auto-extended and both axes stay lean.
FIT_QUADRATURE = QuadratureConfig(n_xi=32, n_phi=32, auto_extend=False)


@dataclass(frozen=True)
class FadingSampleSet:
    """Linear power gain samples tagged with scenario/condition/frequency."""

    samples: np.ndarray
    scenario: str
    condition: str
    fc: float  # GHz, metadata only

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=np.float64)
        if a.ndim != 1 or a.size < 1:
            raise ConfigurationError("samples must be a nonempty 1-D sequence")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ConfigurationError("samples must be finite and >= 0")
        object.__setattr__(self, "samples", a)


def write_sample_csv(sset: FadingSampleSet, path) -> None:
    """One `gain_linear` column, repr floats (lossless round trip)."""
    with open(path, "w", newline="") as f:
        f.write("gain_linear\n")
        for v in sset.samples:
            f.write(f"{float(v)!r}\n")


def read_sample_csv(path, scenario: str, condition: str, fc: float) -> FadingSampleSet:
    with open(path) as f:
        header = f.readline().strip()
        if header != "gain_linear":
            raise ConfigurationError(f"{path}: expected header `gain_linear`, got {header!r}")
        data = np.loadtxt(f, dtype=np.float64, ndmin=1)
    return FadingSampleSet(samples=data, scenario=scenario, condition=condition, fc=fc)


@dataclass(frozen=True)
class ParameterGrid:
    """Ascending candidate values for m, k (linear) and delta."""

    m_values: tuple
    k_values: tuple
    delta_values: tuple

    def __post_init__(self):
        for name in ("m_values", "k_values", "delta_values"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise ConfigurationError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(vals, vals[1:])):
                raise ConfigurationError(f"{name} must be strictly ascending")
            object.__setattr__(self, name, vals)
        if any(m <= 0 for m in self.m_values):
            raise ConfigurationError("m values must be > 0")
        if any(k < 0 for k in self.k_values):
            raise ConfigurationError("k values must be >= 0")
        if any(not 0.0 <= d <= 1.0 for d in self.delta_values):
            raise ConfigurationError("delta values must lie in [0, 1]")

    def triples(self):
        return product(self.m_values, self.k_values, self.delta_values)

    def __len__(self) -> int:
        return len(self.m_values) * len(self.k_values) * len(self.delta_values)


def default_parameter_grid() -> ParameterGrid:
    """9 x 11 x 11 grid spanning diffuse-dominated to near-deterministic."""
    k_db = (-10.0, -5.0, 0.0, 3.0, 6.0, 9.0, 12.0, 15.0, 20.0, 25.0, 30.0)
    return ParameterGrid(
        m_values=(0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0, 500.0),
        k_values=tuple(10.0 ** (k / 10.0) for k in k_db),
        delta_values=tuple(round(0.1 * i, 1) for i in range(11)),
    )


def anderson_darling_statistic(samples, cdf) -> float:
    """A^2 = -n - S(F) for sorted samples against an evaluable CDF.

    F values are clamped to [1e-15, 1 - 1e-15] before the logs.
    """
    y = np.asarray(samples, dtype=np.float64)
    if y.size == 0:
        raise DomainError("empty sample set")
    if np.any(np.diff(y) < 0):
        raise DomainError("samples must be sorted ascending")
    f = np.clip(np.asarray(cdf(y), dtype=np.float64), _CDF_EPS, 1.0 - _CDF_EPS)
    n = y.size
    i = np.arange(1, n + 1)
    s = float(np.sum((2.0 * i - 1.0) / n * (np.log(f) + np.log1p(-f[::-1]))))
    return -n - s


def _prepare_samples(sset: FadingSampleSet) -> np.ndarray:
    if sset.samples.size < 100:
        raise ConfigurationError("fitting needs at least 100 samples")
    mean = float(sset.samples.mean())
    if mean <= 0:
        raise ConfigurationError("sample mean must be > 0")
    return np.sort(sset.samples / mean)


def _a2_for_triple(p: FtrParameters, sorted_samples: np.ndarray, log_s: np.ndarray,
                   x_grid: np.ndarray, log_x: np.ndarray, quad: QuadratureConfig) -> float:
    f_grid = ftr_cdf(p, x_grid, quad)
    f = np.clip(np.interp(log_s, log_x, f_grid), _CDF_EPS, 1.0 - _CDF_EPS)
    n = sorted_samples.size
    i = np.arange(1, n + 1)
    s = float(np.sum((2.0 * i - 1.0) / n * (np.log(f) + np.log1p(-f[::-1]))))
    return -n - s


def fit_ftr(sset: FadingSampleSet, grid: ParameterGrid,
            quad: QuadratureConfig = FIT_QUADRATURE, workers: int = 1):
    """Exhaustive grid search; returns (FtrParameters, best A^2).

    Deterministic for given inputs: per-triple statistics land in a fixed
    order and the argmin is reduced by (A^2, m, k, delta), so serial and
    parallel runs agree exactly.
    """
    if len(grid) == 0:
        raise ConfigurationError("parameter grid is empty")
    sorted_samples = _prepare_samples(sset)
    log_s = np.log(np.maximum(sorted_samples, 1e-300))
    lo = max(float(sorted_samples[0]) * 0.99, 1e-12)
    hi = float(sorted_samples[-1]) * 1.01
    x_grid = np.geomspace(lo, hi, _FIT_GRID_POINTS)
    log_x = np.log(x_grid)

    triples = list(grid.triples())
    params = [ftr_from_k_delta(m, k, d) for (m, k, d) in triples]
    stats = np.empty(len(triples))

    def evaluate(idx: int) -> None:
        stats[idx] = _a2_for_triple(params[idx], sorted_samples, log_s, x_grid, log_x, quad)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(evaluate, range(len(triples))))
    else:
        for idx in range(len(triples)):
            evaluate(idx)

    best = min(range(len(triples)), key=lambda i: (stats[i],) + triples[i])
    return params[best], float(stats[best])


@dataclass
class CalibrationTable:
    """(scenario, condition) -> fitted FtrParameters plus its A^2 value."""

    entries: dict = field(default_factory=dict)

    def insert(self, scenario: str, condition: str, params: FtrParameters, a2: float) -> None:
        key = (scenario, condition)
        if key in self.entries:
            raise ConfigurationError(f"duplicate calibration key {key}")
        self.entries[key] = (params, float(a2))


def lookup_ftr_params(table: CalibrationTable, scenario: str, condition: str) -> FtrParameters:
    try:
        return table.entries[(scenario, condition)][0]
    except KeyError:
        raise TableLookupError(f"no calibration entry for ({scenario}, {condition})") from None


def build_calibration_table(sample_sets, grid: ParameterGrid,
                            quad: QuadratureConfig = FIT_QUADRATURE,
                            workers: int = 1) -> CalibrationTable:
    """Fit each (scenario, condition) sample set independently.

    Frequency is deliberately not part of the key: the small-scale fit shows
    no useful dependence on fc, so sets at different carriers share a key and
    colliding keys are rejected.
    """
    table = CalibrationTable()
    for sset in sample_sets:
        params, a2 = fit_ftr(sset, grid, quad=quad, workers=workers)
        table.insert(sset.scenario, sset.condition, params, a2)
    return table


_TABLE_HEADER = ["scenario", "condition", "m", "k", "delta", "v1", "v2", "sigma2", "a2"]


def save_calibration_table(table: CalibrationTable, path) -> None:
    """CSV with repr floats; load_calibration_table inverts it losslessly."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(_TABLE_HEADER)
        for (scenario, condition), (p, a2) in sorted(table.entries.items()):
            writer.writerow([scenario, condition] +
                            [repr(float(v)) for v in
                             (p.m, p.k, p.delta, p.v1, p.v2, p.sigma2, a2)])


def load_calibration_table(path) -> CalibrationTable:
    table = CalibrationTable()
    with open(path, newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header != _TABLE_HEADER:
            raise ConfigurationError(f"{path}: unexpected calibration table header {header}")
        for row in reader:
            if len(row) != len(_TABLE_HEADER):
                raise ConfigurationError(f"{path}: malformed row {row}")
            scenario, condition = row[0], row[1]
            m, k, delta, v1, v2, sigma2, a2 = (float(v) for v in row[2:])
            params = FtrParameters(m=m, k=k, delta=delta, v1=v1, v2=v2, sigma2=sigma2)
            table.insert(scenario, condition, params, a2)
    return table
