"""This is the pic_calibration package.
Sub packages:
    circuit - mesh topology, the forward model and the walk reference model
    data - samples, datasets and parameter files
    analysis - gradients, training, metrics, walks and state tomography
    preferences - configuration objects
    graphs - figures of the reports

The error classes live in exc and the command line front end in cli.
"""
__all__ = ["circuit", "data", "analysis", "preferences", "graphs", "exc"]
__version__ = '1.0.0'

from .circuit import CircuitSpec, Parameters, build_qw_mesh, output_distribution
from .data import Dataset, Sample, generate_synthetic_dataset, load_dataset, save_dataset
from .analysis import run_schedule, evaluate, mle_reconstruct, simulate_tomography
