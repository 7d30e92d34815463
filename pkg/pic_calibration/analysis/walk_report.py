"""pic_calibration module: walk_report
Classes:
    WalkReport - a programmed walk on a calibrated chip against the ideal chip.
Functions:
    walk_report - programs a walk, predicts its distribution and compares it with theory.
"""
import numpy as np
import pandas as pd

from ..circuit import Parameters, output_distribution, phases_to_currents
from ..circuit.walk import hadamard_target_phases
from ..exc import DimensionMismatchError
from .base import Analysis
from .metrics import l1_distance


class WalkReport(Analysis):
    """
    The calibrated model's predicted distribution over the active ports next to
    the ideal chip's distribution for the same target phases.

    Parameters
    ----------
    steps : int
    ports : array-like of int
        Mode index of every active port.
    theory, model : array-like
        Distributions over the active ports.
    currents : array-like
        The programmed currents in mA.
    """

    _name = "Quantum Walk"

    def __init__(self, steps, ports, theory, model, currents, display=False):
        super(WalkReport, self).__init__({
            'port': np.asarray(ports, dtype=int),
            'theory': np.asarray(theory, dtype=float),
            'model': np.asarray(model, dtype=float),
        }, display=display)
        self.steps = int(steps)
        self.currents = np.asarray(currents, dtype=float)
        self.logic()

    @property
    def distance(self):
        return self._results['L1 distance']

    def run(self):
        self._results = {
            'Steps': self.steps,
            'Ports': len(self._data['port']),
            'Max current': float(self.currents.max()) if len(self.currents) else 0.0,
            'L1 distance': l1_distance(self._data['theory'], self._data['model']),
        }

    def to_frame(self):
        return pd.DataFrame(self._data)[['port', 'theory', 'model']]

    def save(self, path):
        """Writes port, theory and model columns as CSV."""
        self.to_frame().to_csv(path, index=False)


def walk_report(spec, calibrated, target_phases=None, max_current=7.0, display=False):
    """
    Programs target phases on a calibrated chip and compares the predicted
    output with the ideal chip (a = 0.12, b = 0, sin^2 theta = 0.5, alpha = eta = 1)
    driven to the same phases.

    Parameters
    ----------
    spec : CircuitSpec
    calibrated : Parameters
    target_phases : array-like, optional
        One phase per shifter, the Hadamard walk preparation by default.
    max_current : float
        Raises UnreachablePhaseError when a phase needs a larger current.
    display : bool

    Returns
    -------
    report : WalkReport
    """
    calibrated.check(spec)
    phases = hadamard_target_phases(spec) if target_phases is None else np.asarray(target_phases, dtype=float)
    if phases.shape != (spec.ps_count,):
        raise DimensionMismatchError("{} target phases for {} phase shifters".format(phases.shape, spec.ps_count))
    ideal = Parameters.ideal(spec)
    theory = output_distribution(spec, ideal, phases_to_currents(ideal, phases, max_current))
    currents = phases_to_currents(calibrated, phases, max_current)
    model = output_distribution(spec, calibrated, currents)
    return WalkReport(spec.steps, spec.ports, theory, model, currents, display=display)
