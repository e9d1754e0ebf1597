"""MIMO link-level channel modeling toolkit.

Geometry-based reference channels on uniform planar arrays, a fluctuating
two-ray (FTR) fast-fading surrogate calibrated against the reference model,
3GPP-flavored path loss, and a drop-based SINR simulator with matching CLI.
"""

from .antenna import (Direction, UpaConfig, array_response, beamforming_gain,
                      element_gain, steering_vector)
from .calibration import (CalibrationTable, FadingSampleSet, ParameterGrid,
                          anderson_darling_statistic, build_calibration_table,
                          default_parameter_grid, fit_ftr, load_calibration_table,
                          lookup_ftr_params, read_sample_csv, save_calibration_table,
                          write_sample_csv)
from .cli import TimingReport, bench_models, main, time_median
from .errors import (ConfigurationError, DimensionError, DomainError,
                     TableLookupError)
from .ftr import (FtrParameters, QuadratureConfig, ftr_cdf, ftr_from_k_delta,
                  gamma_quadrature, marcum_q1, sample_ftr_power, sample_ftr_powers)
from .linksim import (Drop, GnbPlacement, SinrRecord, UePlacement,
                      noise_power_dbm, parse_drop_config, run_drop, run_drops,
                      rx_power_dbm, sinr_ecdf)
from .propagation import (LinkGeometry, ScenarioParams, determine_los,
                          large_scale_loss_db, load_scenario_params, p_los,
                          path_loss_db, shadowing_db)
from .reference import (ClusterSet, FadingConfig, assemble_channel,
                        generate_cluster_params, reference_fading_samples,
                        reset_trig_counter, small_scale_gain, trig_call_count)
from .seeds import substream
from .tensors import (ComplexMatrix, ComplexTensor3, ComplexVector, get_backend,
                      quadratic_form, read_tensor_text, set_backend,
                      tensor_quadratic_form, write_tensor_text)

__version__ = "0.1.0"

__all__ = [
    "Direction", "UpaConfig", "array_response", "beamforming_gain",
    "element_gain", "steering_vector",
    "CalibrationTable", "FadingSampleSet", "ParameterGrid",
    "anderson_darling_statistic", "build_calibration_table",
    "default_parameter_grid", "fit_ftr", "load_calibration_table",
    "lookup_ftr_params", "read_sample_csv", "save_calibration_table",
    "write_sample_csv",
    "TimingReport", "bench_models", "main", "time_median",
    "ConfigurationError", "DimensionError", "DomainError", "TableLookupError",
    "FtrParameters", "QuadratureConfig", "ftr_cdf", "ftr_from_k_delta",
    "gamma_quadrature", "marcum_q1", "sample_ftr_power", "sample_ftr_powers",
    "Drop", "GnbPlacement", "SinrRecord", "UePlacement", "noise_power_dbm",
    "parse_drop_config", "run_drop", "run_drops", "rx_power_dbm", "sinr_ecdf",
    "LinkGeometry", "ScenarioParams", "determine_los", "large_scale_loss_db",
    "load_scenario_params", "p_los", "path_loss_db", "shadowing_db",
    "ClusterSet", "FadingConfig", "assemble_channel", "generate_cluster_params",
    "reference_fading_samples", "reset_trig_counter", "small_scale_gain",
    "trig_call_count",
    "substream",
    "ComplexMatrix", "ComplexTensor3", "ComplexVector", "get_backend",
    "quadratic_form", "read_tensor_text", "set_backend",
    "tensor_quadratic_form", "write_tensor_text",
    "__version__",
]
