"""Command-line entry point and benchmark harness.

Subcommands: calibrate (fit FTR parameters and write the table), simulate
(run drops, write SINR and ECDF CSVs), bench (timing harness, write a
TimingReport CSV plus raw per-rep timings), sample (emit raw fading samples).
Every output except bench wall-clock columns is byte-identical for the same
flags and seed; substreams derive from the master seed via seeds.substream.
"""

from __future__ import annotations

import argparse
import statistics
import sys
import time
from dataclasses import dataclass, replace

import numpy as np

from .antenna import UpaConfig
from .calibration import (CalibrationTable, build_calibration_table, default_parameter_grid,
                          load_calibration_table, lookup_ftr_params, ParameterGrid,
                          read_sample_csv, save_calibration_table, write_sample_csv,
                          FadingSampleSet)
from .errors import ConfigurationError
from .ftr import ftr_from_k_delta, sample_ftr_powers
from .linksim import Drop, GnbPlacement, UePlacement, parse_drop_config, run_drops, sinr_ecdf
from .reference import FadingConfig, assemble_channel, generate_cluster_params, \
    reference_fading_samples, small_scale_gain
from .antenna import steering_vector, Direction
from .seeds import substream

BENCH_ANTENNA_COUNTS = (4, 16, 64, 256)
BENCH_UE_COUNTS = (2,)


@dataclass(frozen=True)
class TimingReport:
    """Median wall times per size for a baseline/variant pair."""

    label: str
    sizes: tuple
    medians_baseline: tuple  # seconds
    medians_variant: tuple   # seconds
    ratios: tuple            # variant / baseline, one per size
    raw: tuple               # (size, variant name, rep index, seconds)

    def __post_init__(self):
        n = len(self.sizes)
        if not (len(self.medians_baseline) == len(self.medians_variant)
                == len(self.ratios) == n):
            raise ConfigurationError("timing report columns must align with sizes")
        if any(v <= 0 for v in self.medians_baseline + self.medians_variant):
            raise ConfigurationError("medians must be > 0")
        if any(r <= 0 for r in self.ratios):
            raise ConfigurationError("ratios must be > 0")


def time_median(fn, reps: int, warmup: int = 3):
    """Median of `reps` timed calls after `warmup` untimed ones."""
    for _ in range(warmup):
        fn()
    times = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), times


def _bench_assembly(antenna_counts, reps: int, seed: int) -> TimingReport:
    """Naive (per-entry trig, naive kernel) vs cached (per-cluster trig,
    optimized kernel) channel assembly plus beamforming gain.

    The swept size is the transmit-array element count; the receive end is
    pinned to a 2x2 handset-style array so the per-size cost tracks the
    large array alone.
    """
    cfg = FadingConfig()
    rx_upa = UpaConfig(u_h=2, u_v=2)
    w_rx = steering_vector(rx_upa, Direction(np.pi / 2, 0.0))
    baseline_m, variant_m, ratios, raw = [], [], [], []
    for u in antenna_counts:
        side = int(round(u ** 0.5))
        tx_upa = UpaConfig(u_h=side, u_v=side)
        cs = generate_cluster_params(cfg, "NLoS", substream(seed, "bench-assembly", u))
        w_tx = steering_vector(tx_upa, Direction(np.pi / 2, 0.0))

        def naive():
            h3 = assemble_channel(cs, tx_upa, rx_upa, cached=False)
            small_scale_gain(h3, w_rx, w_tx, backend="naive")

        def cached():
            h3 = assemble_channel(cs, tx_upa, rx_upa, cached=True)
            small_scale_gain(h3, w_rx, w_tx, backend="optimized")

        med_n, raw_n = time_median(naive, reps)
        med_c, raw_c = time_median(cached, reps)
        baseline_m.append(med_n)
        variant_m.append(med_c)
        ratios.append(med_c / med_n)
        raw.extend((u, "naive", i, t) for i, t in enumerate(raw_n))
        raw.extend((u, "cached", i, t) for i, t in enumerate(raw_c))
    return TimingReport("assembly", tuple(antenna_counts), tuple(baseline_m),
                        tuple(variant_m), tuple(ratios), tuple(raw))


def _bench_table() -> CalibrationTable:
    # Timing only: sampling cost does not depend on the fitted values, so a
    # nominal parameter set stands in for a fitted one.
    table = CalibrationTable()
    table.insert("UMi", "LoS", ftr_from_k_delta(10.0, 8.0, 0.3), 0.0)
    table.insert("UMi", "NLoS", ftr_from_k_delta(1.0, 0.1, 0.5), 0.0)
    return table


def _bench_drop(u: int, n_ues: int) -> Drop:
    side = int(round(u ** 0.5))
    gnb_upa = UpaConfig(u_h=side, u_v=side)
    ue_upa = UpaConfig(u_h=2, u_v=2)
    gnbs = [GnbPlacement(0.0, 0.0, 10.0, gnb_upa, 46.0),
            GnbPlacement(400.0, 0.0, 10.0, gnb_upa, 46.0)]
    ues = [UePlacement(60.0 + 40.0 * i, 25.0 * (1 + i % 3), 1.5, ue_upa)
           for i in range(n_ues)]
    # Pinned all-NLoS with a dense cluster set so every rep times the same
    # workload shape and the per-size cost is dominated by channel assembly.
    return Drop(gnbs=tuple(gnbs), ues=tuple(ues), fc=3.5, bandwidth=2e7,
                noise_figure=7.0, scenario="UMi", model="reference",
                p_los_override=0.0, fading=FadingConfig(n_clusters_nlos=128))


def _bench_drops(antenna_counts, n_ues: int, reps: int, seed: int) -> TimingReport:
    """Reference vs ftr-fast end-to-end drop runtime.

    Sizes sweep the gNB element count; every UE keeps a 2x2 array.
    """
    table = _bench_table()
    baseline_m, variant_m, ratios, raw = [], [], [], []
    for u in antenna_counts:
        drop_ref = _bench_drop(u, n_ues)
        drop_ftr = replace(drop_ref, model="ftr-fast")
        counter = [0]

        def run(drop):
            from .linksim import run_drop
            counter[0] += 1
            run_drop(drop, substream(seed, "bench-drop", u, counter[0]), table=table)

        med_r, raw_r = time_median(lambda: run(drop_ref), reps)
        med_f, raw_f = time_median(lambda: run(drop_ftr), reps)
        baseline_m.append(med_r)
        variant_m.append(med_f)
        ratios.append(med_f / med_r)
        raw.extend((u, "reference", i, t) for i, t in enumerate(raw_r))
        raw.extend((u, "ftr-fast", i, t) for i, t in enumerate(raw_f))
    return TimingReport(f"drop-ue{n_ues}", tuple(antenna_counts), tuple(baseline_m),
                        tuple(variant_m), tuple(ratios), tuple(raw))


def bench_models(antenna_counts=BENCH_ANTENNA_COUNTS, ue_counts=BENCH_UE_COUNTS,
                 reps: int = 30, seed: int = 1) -> list:
    """Run both benchmark families; returns a list of TimingReports."""
    if reps < 30:
        raise ConfigurationError("reps must be >= 30")
    reports = [_bench_assembly(antenna_counts, reps, seed)]
    for n_ues in ue_counts:
        reports.append(_bench_drops(antenna_counts, n_ues, reps, seed))
    return reports


def _write_timing_csv(reports, path) -> None:
    with open(path, "w", newline="") as f:
        f.write("label,size,median_baseline_s,median_variant_s,ratio\n")
        for r in reports:
            for i, size in enumerate(r.sizes):
                f.write(f"{r.label},{size},{r.medians_baseline[i]!r},"
                        f"{r.medians_variant[i]!r},{r.ratios[i]!r}\n")


def _raw_path(path: str) -> str:
    if "." in path.rsplit("/", 1)[-1]:
        stem, ext = path.rsplit(".", 1)
        return f"{stem}.raw.{ext}"
    return path + ".raw"


def _write_timing_raw_csv(reports, path) -> None:
    with open(path, "w", newline="") as f:
        f.write("label,size,variant,rep,seconds\n")
        for r in reports:
            for size, variant, rep, t in r.raw:
                f.write(f"{r.label},{size},{variant},{rep},{t!r}\n")


def _parse_grid_file(path) -> ParameterGrid:
    """Three `name = v1 v2 ...` lines: m_values, k_values, delta_values."""
    values = {}
    with open(path) as f:
        for ln, raw in enumerate(f, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(f"{path}:{ln}: expected `name = values`")
            key, _, val = (x.strip() for x in line.partition("="))
            if key not in ("m_values", "k_values", "delta_values"):
                raise ConfigurationError(f"{path}:{ln}: unknown key {key!r}")
            if key in values:
                raise ConfigurationError(f"{path}:{ln}: duplicate key {key!r}")
            values[key] = tuple(float(x) for x in val.split())
    missing = [k for k in ("m_values", "k_values", "delta_values") if k not in values]
    if missing:
        raise ConfigurationError(f"{path}: missing keys {missing}")
    return ParameterGrid(**values)


def _out_stream(path: str):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _cmd_sample(args) -> int:
    rng = substream(args.seed, "sample", args.scenario, args.condition, args.model)
    if args.model == "ftr":
        if not args.table:
            raise ConfigurationError("--model ftr requires --table")
        params = lookup_ftr_params(load_calibration_table(args.table),
                                   args.scenario, args.condition)
        samples = sample_ftr_powers(params, rng, args.count)
        sset = FadingSampleSet(samples=samples, scenario=args.scenario,
                               condition=args.condition, fc=args.fc)
    else:
        sset = reference_fading_samples(FadingConfig(), args.condition, args.count,
                                        rng, scenario=args.scenario, fc=args.fc)
    stream, close = _out_stream(args.out)
    try:
        stream.write("gain_linear\n")
        for v in sset.samples:
            stream.write(f"{float(v)!r}\n")
    finally:
        if close:
            stream.close()
    return 0


def _cmd_calibrate(args) -> int:
    grid = _parse_grid_file(args.grid) if args.grid else default_parameter_grid()
    if args.samples:
        if not args.condition:
            raise ConfigurationError("--samples ingestion requires --condition")
        sets = [read_sample_csv(args.samples, args.scenario, args.condition, args.fc)]
    else:
        conditions = [args.condition] if args.condition else ["LoS", "NLoS"]
        sets = [reference_fading_samples(
            FadingConfig(), cond, args.count,
            substream(args.seed, "calibrate", args.scenario, cond),
            scenario=args.scenario, fc=args.fc) for cond in conditions]
    table = build_calibration_table(sets, grid)
    save_calibration_table(table, args.out)
    return 0


def _cmd_simulate(args) -> int:
    drop, seed, n_drops = parse_drop_config(args.config)
    if args.model:
        drop = replace(drop, model=args.model)
    if args.seed is not None:
        seed = args.seed
    if args.count is not None:
        n_drops = args.count
    table = load_calibration_table(args.table) if args.table else None
    records = run_drops(drop, n_drops,
                        lambda i: substream(seed, "simulate", i), table=table)
    with open(args.out, "w", newline="") as f:
        f.write("ue,gnb,sinr_db,rx_power_dbm,interference_dbm,noise_dbm\n")
        for r in records:
            f.write(f"{r.ue},{r.gnb},{float(r.sinr_db)!r},{float(r.rx_power_dbm)!r},"
                    f"{float(r.interference_dbm)!r},{float(r.noise_dbm)!r}\n")
    values, probs = sinr_ecdf(records)
    ecdf_path = _raw_path(args.out).replace(".raw", ".ecdf")
    with open(ecdf_path, "w", newline="") as f:
        f.write("sinr_db,cum_prob\n")
        for v, p in zip(values, probs):
            f.write(f"{float(v)!r},{float(p)!r}\n")
    return 0


def _cmd_bench(args) -> int:
    reports = bench_models(reps=args.reps, seed=args.seed)
    _write_timing_csv(reports, args.out)
    _write_timing_raw_csv(reports, _raw_path(args.out))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mimochan",
                                     description="MIMO channel modeling toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", help="emit raw fading samples as CSV")
    p.add_argument("--model", choices=("ftr", "reference"), required=True)
    p.add_argument("--scenario", default="UMi")
    p.add_argument("--condition", choices=("LoS", "NLoS"), required=True)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--fc", type=float, default=3.5)
    p.add_argument("--table", help="calibration table (required for --model ftr)")
    p.add_argument("--out", default="-", help="output CSV path, - for stdout")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("calibrate", help="fit FTR parameters, write the table")
    p.add_argument("--scenario", default="UMi")
    p.add_argument("--condition", choices=("LoS", "NLoS"),
                   help="default: both conditions")
    p.add_argument("--count", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--fc", type=float, default=3.5)
    p.add_argument("--grid", help="parameter grid file")
    p.add_argument("--samples", help="ingest reference samples from CSV")
    p.add_argument("--out", required=True, help="output table CSV")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("simulate", help="run drops, write SINR and ECDF CSVs")
    p.add_argument("config", help="drop configuration file")
    p.add_argument("--model", choices=("reference", "ftr-fast"))
    p.add_argument("--table", help="calibration table for ftr-fast")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, help="number of drops")
    p.add_argument("--out", required=True, help="SINR record CSV path")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("bench", help="run the timing harness")
    p.add_argument("--reps", type=int, default=30)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True, help="timing report CSV path")
    p.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
