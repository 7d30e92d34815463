"""pic_calibration package: analysis
Modules:
    base - the report root class and its text rendering
    grad - training losses and their exact gradients
    optim - Adam and the alternating freeze schedule
    metrics - distribution and density matrix distances
    walk_report - programmed walks against the ideal chip
    tomography - measurement design and maximum-likelihood state reconstruction
"""

from .base import Analysis, std_output
from .grad import GradVector, trainable_mask, loss, loss_and_grad, finite_diff_grad
from .optim import (TrainConfig, ScheduleConfig, Phase, PhaseRecord, AdamState, CalibrationResult, default_phases,
                    adam_update, adam_step, cutoff_met, run_schedule, load_calibration)
from .metrics import (DensityMatrix, MetricReport, l1_distance, infidelity, purity_error, evaluate,
                      parameter_recovery)
from .walk_report import WalkReport, walk_report
from .tomography import (TomographyConfig, MeasurementSetting, CholeskyParam, Reconstruction, TomographyReport,
                         split_mesh, support_modes, build_effects, design_rank, mle_reconstruct, random_settings,
                         simulate_tomography)
