"""pic_calibration module: tomography
Classes:
    TomographyConfig - design and ascent settings of a reconstruction.
    MeasurementSetting - the effect rows a measurement section realizes at one current setting.
    CholeskyParam - real parameterization of a lower-triangular complex matrix.
    Reconstruction - a maximum-likelihood estimate with its ascent history.
    TomographyReport - reconstruction quality over many simulated dynamics.
Functions:
    split_mesh - cuts a spec into a dynamics and a measurement section.
    build_effects - effect rows of a measurement section per current setting.
    design_rank - rank of the stacked effect operators.
    mle_reconstruct - maximum-likelihood density matrix by monotone Adam ascent.
    simulate_tomography - random dynamics, simulated measurements and reconstructions end to end.
"""
import json
import logging
import warnings

import numpy as np
import pandas as pd
from scipy.special import xlogy

from ..circuit import MeshSection, evolve, transfer_matrix
from ..data import add_noise
from ..exc import DeficientDesignWarning, DimensionMismatchError, InvalidArgumentError
from ..preferences import Preferences, require_positive
from .base import Analysis
from .metrics import DensityMatrix, infidelity, purity_error
from .optim import AdamState, adam_update

logger = logging.getLogger(__name__)

# Rejections halve the learning rate; below this no step can change the estimate.
_MIN_LEARNING_RATE = 1e-15


class TomographyConfig(Preferences):
    """Measurement design and likelihood ascent settings."""

    _name = 'TomographyConfig'
    _defaults = {
        'dynamics_depth': 9,
        'settings': 14,
        'dynamics': 20,
        'noise': 0.0,
        'current_range': [0.0, 7.0],
        'learning_rate': 0.01,
        'decay': 0.999,
        'beta1': 0.9,
        'beta2': 0.999,
        'epsilon': 1e-8,
        'tolerance': 1e-9,
        'streak': 5,
        'max_iterations': 5000,
    }

    def _validate(self):
        require_positive(self, 'dynamics_depth', 'settings', 'dynamics', 'learning_rate', 'decay', 'tolerance',
                         'streak')
        if self.noise < 0 or self.max_iterations < 0:
            raise InvalidArgumentError("noise and max_iterations must be non-negative")


def split_mesh(spec, dynamics_depth):
    """
    Layers 1..depth form the dynamics section and the remaining layers the
    measurement section; both share the mode space of spec.

    Returns
    -------
    dynamics, measurement : MeshSection
    """
    if int(dynamics_depth) != dynamics_depth or not 1 <= dynamics_depth < len(spec.layers):
        raise InvalidArgumentError("dynamics depth must lie in 1..{}, got {!r}".format(
            len(spec.layers) - 1, dynamics_depth))
    depth = int(dynamics_depth)
    return MeshSection(spec, 1, depth), MeshSection(spec, depth + 1, len(spec.layers))


def support_modes(measurement):
    """The modes that can carry light when the measurement section starts: the dynamics' light cone."""
    if measurement.first_layer == 1:
        return [measurement.spec.input_mode]
    return MeshSection(measurement.spec, 1, measurement.first_layer - 1).reachable_modes()


class MeasurementSetting(object):
    """
    Effect rows E of shape (ports, d) such that the predicted distribution of a
    state rho on the support is diag(E rho E^dagger), renormalized.
    """

    def __init__(self, currents, effects):
        self.currents = np.asarray(currents, dtype=float)
        self.effects = np.asarray(effects, dtype=complex)

    @property
    def shape(self):
        return self.effects.shape

    def weights(self, rho):
        return np.einsum('pi,ij,pj->p', self.effects, rho, self.effects.conj()).real

    def probabilities(self, rho):
        rho = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
        w = self.weights(rho)
        return w / w.sum()


def build_effects(measurement, params, settings, support=None):
    """
    The effect rows of a measurement section for each current setting: the
    section's transfer matrix restricted to the active ports and the support
    modes, with rows scaled by sqrt(eta).

    Parameters
    ----------
    measurement : MeshSection
    params : Parameters
        Calibrated parameters of the whole spec.
    settings : list of array-like
        Full current vectors; only the section's phase shifters matter.
    support : list of int, optional
        The state's modes, the dynamics light cone by default.

    Returns
    -------
    settings : list of MeasurementSetting
    """
    spec = measurement.spec
    params.check(spec)
    support = support_modes(measurement) if support is None else list(support)
    scale = np.sqrt(params.eta)[:, None]
    out = []
    for currents in settings:
        currents = np.asarray(currents, dtype=float)
        if currents.shape != (spec.ps_count,):
            raise DimensionMismatchError("a setting needs {} currents, got {}".format(spec.ps_count, currents.shape))
        matrix = transfer_matrix(measurement, params, currents)
        out.append(MeasurementSetting(currents, scale * matrix[np.ix_(spec.ports, support)]))
    return out


def _stack(effects):
    stacked = np.array([s.effects if isinstance(s, MeasurementSetting) else np.asarray(s, dtype=complex)
                        for s in effects])
    if stacked.ndim != 3 or not len(stacked):
        raise DimensionMismatchError("effects must be a non-empty list of (ports, d) matrices")
    return stacked


def design_rank(effects):
    """
    The rank of the real span of every effect operator e^dagger e and the rank
    d^2 an informationally complete design needs.

    Returns
    -------
    rank, required : int
    """
    stacked = _stack(effects)
    d = stacked.shape[2]
    rows = stacked.reshape(-1, d)
    operators = (rows.conj()[:, :, None] * rows[:, None, :]).reshape(len(rows), -1)
    real = np.hstack([operators.real, operators.imag])
    return int(np.linalg.matrix_rank(real)), d * d


class CholeskyParam(object):
    """
    d^2 reals describing a lower-triangular T: the d real diagonal entries, then
    a (real, imaginary) pair per entry below the diagonal in row-major order.
    The estimate is rho = T T^dagger / Tr(T T^dagger).
    """

    def __init__(self, values):
        values = np.array(values, dtype=float).ravel()
        d = int(round(np.sqrt(len(values))))
        if d < 1 or d * d != len(values):
            raise DimensionMismatchError("{} values do not describe a square matrix".format(len(values)))
        self.values = values
        self.dim = d
        self._rows, self._cols = np.tril_indices(d, -1)

    @classmethod
    def identity(cls, d):
        """The scaled identity I / sqrt(d): the maximally mixed state."""
        values = np.zeros(d * d)
        values[:d] = 1 / np.sqrt(d)
        return cls(values)

    @classmethod
    def from_matrix(cls, lower):
        lower = np.asarray(lower, dtype=complex)
        d = lower.shape[0]
        rows, cols = np.tril_indices(d, -1)
        pairs = np.column_stack([lower[rows, cols].real, lower[rows, cols].imag]).ravel()
        return cls(np.concatenate([np.diag(lower).real, pairs]))

    def matrix(self):
        d = self.dim
        lower = np.diag(self.values[:d]).astype(complex)
        pairs = self.values[d:].reshape(-1, 2)
        lower[self._rows, self._cols] = pairs[:, 0] + 1j * pairs[:, 1]
        return lower

    def trace(self):
        """Tr(T T^dagger), the squared Frobenius norm of T."""
        return float(np.sum(self.values ** 2))

    def rho(self):
        lower = self.matrix()
        return lower @ lower.conj().T / self.trace()

    def density(self):
        return DensityMatrix(self.rho())

    def flatten_gradient(self, complex_grad):
        """Packs dL/dRe T + i dL/dIm T into the parameter order, keeping the lower triangle and real diagonal."""
        complex_grad = np.asarray(complex_grad, dtype=complex)
        below = complex_grad[self._rows, self._cols]
        return np.concatenate([np.diag(complex_grad).real, np.column_stack([below.real, below.imag]).ravel()])


def _likelihood(stacked, measured, param, with_grad=False):
    """Log-likelihood sum q log p of the measured distributions and optionally its gradient."""
    lower = param.matrix()
    trace = param.trace()
    rho = lower @ lower.conj().T / trace
    weights = np.einsum('spi,ij,spj->sp', stacked, rho, stacked.conj()).real
    totals = weights.sum(axis=1)
    if np.any(totals <= 0) or np.any((weights <= 0) & (measured > 0)):
        return -np.inf, None
    value = float(xlogy(measured, weights / totals[:, None]).sum())
    if not with_grad:
        return value, None
    upstream = (np.divide(measured, weights, out=np.zeros_like(weights), where=measured > 0)
                - measured.sum(axis=1, keepdims=True) / totals[:, None])
    operator = np.einsum('spj,sp,spi->ji', stacked.conj(), upstream, stacked)
    h = (operator - np.trace(operator @ rho).real * np.eye(param.dim)) / trace
    return value, param.flatten_gradient(2 * h @ lower)


class Reconstruction(object):
    """The estimate, the accepted log-likelihoods and the ascent bookkeeping."""

    def __init__(self, param, log_likelihood, iterations, converged, rank, required):
        self.param = param
        self.log_likelihood = list(log_likelihood)
        self.iterations = iterations
        self.converged = converged
        self.rank = rank
        self.required = required

    @property
    def rho(self):
        return self.param.density()

    @property
    def deficient(self):
        return self.rank < self.required


def mle_reconstruct(effects, measured, dim=None, config=None, initial=None, check_design=True):
    """
    Maximizes sum over settings and ports of q log p(rho) over the Cholesky
    parameterization.

    Adam proposes each step; a step that lowers the log-likelihood is rejected
    and halves the learning rate, so the accepted sequence never decreases. The
    ascent stops after streak accepted steps whose change is below tolerance
    relative to max(|L|, 1), or after max_iterations iterations.

    Parameters
    ----------
    effects : list of MeasurementSetting or (ports, d) arrays
    measured : array-like
        One measured distribution per setting.
    dim : int, optional
        Checked against the effect width when given.
    config : TomographyConfig, optional
    initial : CholeskyParam, optional
        The scaled identity by default or when its trace is zero.
    check_design : bool
        Issue DeficientDesignWarning when the design is not informationally complete.

    Returns
    -------
    reconstruction : Reconstruction
    """
    config = config or TomographyConfig()
    stacked = _stack(effects)
    measured = np.asarray(measured, dtype=float)
    d = stacked.shape[2]
    if dim is not None and dim != d:
        raise DimensionMismatchError("effects act on dimension {} but {} was requested".format(d, dim))
    if measured.shape != stacked.shape[:2]:
        raise DimensionMismatchError("measured distributions have shape {} but the effects need {}".format(
            measured.shape, stacked.shape[:2]))
    if np.any(measured < 0):
        raise InvalidArgumentError("measured distributions must be non-negative")
    rank, required = design_rank(stacked)
    if check_design and rank < required:
        warnings.warn(DeficientDesignWarning(rank, required), stacklevel=2)
    param = initial if initial is not None and initial.trace() > 0 else CholeskyParam.identity(d)
    if param.dim != d:
        raise DimensionMismatchError("initial parameterization has dimension {}".format(param.dim))
    value, grad = _likelihood(stacked, measured, param, with_grad=True)
    history = [value]
    state = AdamState(len(param.values), config.learning_rate, config.decay, config.beta1, config.beta2,
                      config.epsilon)
    streak = 0
    converged = False
    iterations = 0
    while iterations < config.max_iterations:
        iterations += 1
        values, proposed_state = adam_update(state, param.values, -grad)
        proposal = CholeskyParam(values)
        if proposal.trace() > 0:
            proposed, proposed_grad = _likelihood(stacked, measured, proposal, with_grad=True)
        else:
            proposed = -np.inf
        if np.isfinite(proposed) and proposed >= value:
            small = abs(proposed - value) < config.tolerance * max(abs(value), 1.0)
            param, state, value, grad = proposal, proposed_state, proposed, proposed_grad
            state.end_epoch()
            history.append(value)
            streak = streak + 1 if small else 0
            if streak >= config.streak:
                converged = True
                break
        else:
            state.learning_rate *= 0.5
            if state.learning_rate < _MIN_LEARNING_RATE:
                converged = True
                break
    logger.debug("reconstruction: %d iterations, log-likelihood %.12g, converged %s", iterations, value, converged)
    return Reconstruction(param, history, iterations, converged, rank, required)


class TomographyReport(Analysis):
    """
    Infidelity and purity error of reconstructions against the true states.

    Parameters
    ----------
    reconstructions : list of Reconstruction
    truths : list of DensityMatrix or None
        Reference states; metrics are left out when missing.
    settings : int
    dynamics_depth : int
    """

    _name = "Tomography"

    def __init__(self, reconstructions, truths=None, settings=0, dynamics_depth=0, display=False):
        super(TomographyReport, self).__init__(list(reconstructions), display=display)
        self.truths = truths
        self.settings = settings
        self.dynamics_depth = dynamics_depth
        if truths is not None:
            self.infidelity = np.array([infidelity(t, r.rho) for t, r in zip(truths, self._data)])
            self.purity_error = np.array([purity_error(t, r.rho) for t, r in zip(truths, self._data)])
        else:
            self.infidelity = self.purity_error = None
        self.logic()

    @property
    def reconstructions(self):
        return self._data

    def run(self):
        first = self._data[0]
        self._results = {
            'States': len(self._data),
            'Dimension': first.param.dim,
            'Settings': self.settings,
            'Dynamics depth': self.dynamics_depth,
            'Design rank': first.rank,
            'Required rank': first.required,
            'Converged': sum(r.converged for r in self._data),
        }
        if self.infidelity is not None:
            self._results['Infidelity mean'] = float(np.mean(self.infidelity))
            self._results['Infidelity std'] = float(np.std(self.infidelity))
            self._results['Purity error mean'] = float(np.mean(self.purity_error))
            self._results['Purity error std'] = float(np.std(self.purity_error))

    def to_frame(self):
        frame = pd.DataFrame({
            'iterations': [r.iterations for r in self._data],
            'converged': [r.converged for r in self._data],
            'log_likelihood': [r.log_likelihood[-1] for r in self._data],
        })
        if self.infidelity is not None:
            frame['infidelity'] = self.infidelity
            frame['purity_error'] = self.purity_error
        frame.index.name = 'state'
        return frame

    def save(self, path, states_path=None):
        """Writes the per-state table as CSV and optionally every estimate's real and imaginary parts as JSON."""
        self.to_frame().to_csv(path)
        if states_path is not None:
            states = [{'real': r.rho.matrix.real.tolist(), 'imag': r.rho.matrix.imag.tolist()} for r in self._data]
            with open(states_path, 'w') as handle:
                json.dump({'summary': self.summary(), 'states': states}, handle, sort_keys=True)
                handle.write('\n')


def random_settings(spec, count, rng, current_range=(0.0, 7.0)):
    """count current vectors drawn uniformly over current_range."""
    return [rng.uniform(current_range[0], current_range[1], spec.ps_count) for _ in range(count)]


def simulate_tomography(spec, params, config=None, seed=0, settings=None, display=False):
    """
    Reconstructs the output states of random dynamics on a calibrated chip.

    The first dynamics_depth layers prepare a state from random currents, the
    remaining layers measure it under every setting, the measured
    distributions optionally get Gaussian noise, and mle_reconstruct recovers
    the state, which is compared with the simulated one.

    Parameters
    ----------
    spec : CircuitSpec
    params : Parameters
    config : TomographyConfig, optional
    seed : int
    settings : list of array-like, optional
        Measurement currents; random ones are drawn when omitted.
    display : bool

    Returns
    -------
    report : TomographyReport
    """
    config = config or TomographyConfig()
    rng = np.random.default_rng(seed)
    dynamics, measurement = split_mesh(spec, config.dynamics_depth)
    support = dynamics.reachable_modes()
    if settings is None:
        settings = random_settings(spec, config.settings, rng, config.current_range)
    effects = build_effects(measurement, params, settings, support)
    rank, required = design_rank(effects)
    if rank < required:
        warnings.warn(DeficientDesignWarning(rank, required), stacklevel=2)
    truths = []
    reconstructions = []
    for k in range(config.dynamics):
        currents = rng.uniform(config.current_range[0], config.current_range[1], spec.ps_count)
        truth = DensityMatrix.from_state(evolve(dynamics, params, currents)[support])
        measured = np.array([s.probabilities(truth) for s in effects])
        if config.noise > 0:
            measured = np.array([add_noise(row, config.noise, rng)[0] for row in measured])
        reconstructions.append(mle_reconstruct(effects, measured, config=config, check_design=False))
        truths.append(truth)
        logger.info("dynamics %d of %d reconstructed", k + 1, config.dynamics)
    return TomographyReport(reconstructions, truths, settings=len(effects), dynamics_depth=config.dynamics_depth,
                            display=display)
