"""pic_calibration package: data
Modules:
    data - the record container root class
    dataset - samples, synthetic dataset generation, splitting and persistence
    data_operations - argument helpers
"""
from .data import Data, is_data
from .data_operations import is_iterable, is_number, to_float_array, parse_index_list, read_number_table
from .dataset import (Sample, Dataset, TargetConfig, DEFAULT_CURRENT_RANGE, sample_target_params, add_noise,
                      generate_synthetic_dataset, split_dataset, save_dataset, load_dataset, save_params,
                      load_params, params_from_dict)
