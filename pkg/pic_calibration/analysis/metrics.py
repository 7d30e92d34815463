"""pic_calibration module: metrics
Classes:
    DensityMatrix - a validated Hermitian, positive, trace one matrix.
    MetricReport - per-sample distances with summary statistics and histograms.
Functions:
    l1_distance - half the L1 norm between two distributions.
    infidelity - one minus the Uhlmann fidelity of two density matrices.
    purity_error - the absolute difference of two purities.
    evaluate - scores predicted distributions and states against data or known parameters.
    parameter_recovery - compares estimated and target parameters component by component.
"""
import json

import numpy as np
import pandas as pd
from scipy.linalg import eigh, svdvals

from ..circuit import canonicalize, output_distribution, wrap_phase
from ..circuit.forward import propagate
from ..exc import DimensionMismatchError, InvalidArgumentError, InvalidDensityMatrixError
from .base import Analysis
from .grad import as_batch

TOLERANCE = 1e-10

DEFAULT_BINS = 30
DEFAULT_THRESHOLD = 0.05


class DensityMatrix(object):
    """
    A d x d complex matrix that is Hermitian, positive semidefinite and of unit
    trace, each within tolerance.

    Parameters
    ----------
    matrix : array-like
    tolerance : float
    """

    def __init__(self, matrix, tolerance=TOLERANCE):
        matrix = np.array(matrix, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise InvalidDensityMatrixError("a density matrix must be square, got shape {}".format(matrix.shape))
        if np.max(np.abs(matrix - matrix.conj().T)) > tolerance:
            raise InvalidDensityMatrixError("matrix is not Hermitian")
        if abs(np.trace(matrix) - 1) > tolerance:
            raise InvalidDensityMatrixError("trace is {} instead of one".format(np.trace(matrix).real))
        if np.min(np.linalg.eigvalsh(matrix)) < -tolerance:
            raise InvalidDensityMatrixError("matrix has a negative eigenvalue")
        self.matrix = matrix

    @classmethod
    def from_state(cls, psi):
        """The pure state |psi><psi| of the normalized amplitude vector."""
        psi = np.asarray(psi, dtype=complex).ravel()
        norm = np.vdot(psi, psi).real
        if not norm > 0:
            raise InvalidDensityMatrixError("the zero vector is not a state")
        return cls(np.outer(psi, psi.conj()) / norm)

    @classmethod
    def maximally_mixed(cls, d):
        return cls(np.eye(d) / d)

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def purity(self):
        return float(np.sum(np.abs(self.matrix) ** 2))

    def sqrt(self):
        """The Hermitian square root with negative eigenvalues clipped at zero."""
        values, vectors = eigh(self.matrix)
        return (vectors * np.sqrt(np.clip(values, 0, None))) @ vectors.conj().T

    def __repr__(self):
        return 'DensityMatrix(d={}, purity={:.6g})'.format(self.dim, self.purity)


def _as_density(rho):
    return rho if isinstance(rho, DensityMatrix) else DensityMatrix(rho)


def l1_distance(p, q):
    """
    Half the L1 norm between two distributions.

    >>> round(l1_distance([0.6, 0.4], [0.5, 0.5]), 12)
    0.1
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise DimensionMismatchError("distributions have lengths {} and {}".format(p.shape, q.shape))
    return float(0.5 * np.abs(p - q).sum())


def infidelity(rho_tar, rho):
    """
    1 - Tr sqrt(sqrt(rho_tar) rho sqrt(rho_tar)), evaluated as the trace norm of
    sqrt(rho_tar) sqrt(rho).
    """
    rho_tar = _as_density(rho_tar)
    rho = _as_density(rho)
    if rho_tar.dim != rho.dim:
        raise DimensionMismatchError("density matrices of dimension {} and {}".format(rho_tar.dim, rho.dim))
    fidelity = svdvals(rho_tar.sqrt() @ rho.sqrt()).sum()
    return float(np.clip(1 - fidelity, 0.0, 1.0))


def purity_error(rho1, rho2):
    """|Tr rho1^2 - Tr rho2^2|"""
    rho1 = _as_density(rho1)
    rho2 = _as_density(rho2)
    if rho1.dim != rho2.dim:
        raise DimensionMismatchError("density matrices of dimension {} and {}".format(rho1.dim, rho2.dim))
    return abs(rho1.purity - rho2.purity)


class MetricReport(Analysis):
    """
    Per-sample metrics of an evaluation with summary statistics.

    Parameters
    ----------
    metrics : dict
        Maps a metric name ('l1', 'infidelity', 'purity_error') to per-sample values.
    bins : int
        Histogram bin count.
    threshold : float
        Reports the fraction of samples whose L1 distance is below it.
    """

    _name = "Metrics"

    def __init__(self, metrics, bins=DEFAULT_BINS, threshold=DEFAULT_THRESHOLD, display=False):
        super(MetricReport, self).__init__({k: np.asarray(v, dtype=float) for k, v in metrics.items()},
                                           display=display)
        if bins < 1:
            raise InvalidArgumentError("bins must be positive")
        self._bins = int(bins)
        self._threshold = float(threshold)
        self.logic()

    def __getitem__(self, item):
        return self._data[item]

    @property
    def names(self):
        return [k for k in ('l1', 'infidelity', 'purity_error') if k in self._data]

    @property
    def threshold(self):
        return self._threshold

    @property
    def count(self):
        return len(self._data['l1'])

    def run(self):
        self._results = {'Samples': self.count}
        for name in self.names:
            values = self._data[name]
            self._results['{} mean'.format(name)] = float(np.mean(values))
            self._results['{} std'.format(name)] = float(np.std(values))
            self._results['{} median'.format(name)] = float(np.median(values))
        self._results['l1 < {:g}'.format(self._threshold)] = self.threshold_fraction()

    def threshold_fraction(self, threshold=None):
        threshold = self._threshold if threshold is None else threshold
        return float(np.mean(self._data['l1'] < threshold))

    def histograms(self):
        """Maps each metric to (counts, bin edges) over its value range."""
        return {name: np.histogram(self._data[name], bins=self._bins) for name in self.names}

    def to_frame(self):
        frame = pd.DataFrame({name: self._data[name] for name in self.names})
        frame.index.name = 'sample'
        return frame

    def summary(self):
        out = super(MetricReport, self).summary()
        out['histograms'] = {name: {'counts': counts.tolist(), 'edges': edges.tolist()}
                             for name, (counts, edges) in self.histograms().items()}
        return out

    def save(self, path, summary_path=None):
        """Writes the per-sample table as CSV and, when summary_path is given, the summary as JSON."""
        self.to_frame().to_csv(path)
        if summary_path is not None:
            with open(summary_path, 'w') as handle:
                json.dump(self.summary(), handle, sort_keys=True, indent=2)
                handle.write('\n')


def _normalized_states(spec, params, currents, psi_in):
    states, _, _ = propagate(spec, params, currents, psi_in)
    norms = np.sqrt(np.sum(np.abs(states) ** 2, axis=1))
    return states / norms[:, None]


def evaluate(spec, params_hat, params_tar=None, dataset=None, psi_in=None, currents=None, bins=DEFAULT_BINS,
             threshold=DEFAULT_THRESHOLD, display=False):
    """
    Scores a trained parameter set.

    The L1 distance compares the predicted distributions with the dataset's
    distributions, or with the distributions of params_tar when no dataset is
    given. When params_tar is known the infidelity and purity error of the
    normalized output states are added.

    Parameters
    ----------
    spec : CircuitSpec
    params_hat : Parameters
    params_tar : Parameters, optional
    dataset : Dataset or list of Sample, optional
    psi_in : array-like, optional
    currents : array-like, optional
        Current settings used when no dataset is given.
    bins : int
    threshold : float
    display : bool

    Returns
    -------
    report : MetricReport
    """
    if dataset is not None:
        currents, targets = as_batch(dataset)
    elif params_tar is not None and currents is not None:
        currents = np.atleast_2d(np.asarray(currents, dtype=float))
        targets = output_distribution(spec, params_tar, currents, psi_in)
    else:
        raise InvalidArgumentError("evaluate needs a dataset or target parameters with currents")
    predicted = output_distribution(spec, params_hat, currents, psi_in)
    metrics = {'l1': 0.5 * np.abs(predicted - targets).sum(axis=1)}
    if params_tar is not None:
        estimated = _normalized_states(spec, params_hat, currents, psi_in)
        true = _normalized_states(spec, params_tar, currents, psi_in)
        rhos = [(DensityMatrix.from_state(t), DensityMatrix.from_state(e)) for t, e in zip(true, estimated)]
        metrics['infidelity'] = [infidelity(t, e) for t, e in rhos]
        metrics['purity_error'] = [purity_error(t, e) for t, e in rhos]
    return MetricReport(metrics, bins=bins, threshold=threshold, display=display)


def parameter_recovery(spec, estimated, target):
    """
    A table comparing estimated and target parameters per component.

    Both sets are canonicalized first. b is compared modulo 2 pi, theta through
    the reflectivity sin^2(theta) and alpha and eta after gauge fixing.

    Returns
    -------
    table : pandas.DataFrame
        Columns group, index, estimated, target and error.
    """
    est = canonicalize(spec, estimated)
    tar = canonicalize(spec, target)
    columns = {
        'a': (est.a, tar.a),
        'b': (est.b, tar.b),
        'reflectivity': (est.reflectivity, tar.reflectivity),
        'alpha': (est.alpha, tar.alpha),
        'eta': (est.eta, tar.eta),
    }
    frames = []
    for group, (e, t) in columns.items():
        error = wrap_phase(e - t) if group == 'b' else e - t
        frames.append(pd.DataFrame({'group': group, 'index': np.arange(len(e)), 'estimated': e, 'target': t,
                                    'error': error}))
    return pd.concat(frames, ignore_index=True)
