"""pic_calibration module: optim
Classes:
    TrainConfig - Adam and loss settings.
    ScheduleConfig - the alternating freeze schedule.
    Phase - one leg of the schedule and the parameter groups it trains.
    PhaseRecord - bookkeeping of a finished leg.
    AdamState - moments, step counts and learning rate of the optimizer.
    CalibrationResult - trained parameters, loss history and phase boundaries.
Functions:
    default_phases - alternating a/b rounds, then theta/alpha, then everything.
    adam_update - one bias-corrected Adam update of a flat vector.
    adam_step - adam_update applied to the trainable coordinates of a Parameters object.
    cutoff_met - the small-consecutive-decrease stopping rule.
    run_schedule - trains a Parameters object on a dataset.
    load_calibration - reads a saved CalibrationResult.
"""
import json
import logging
import warnings

import numpy as np
import pandas as pd

from ..circuit import GROUPS, Parameters, canonicalize
from ..exc import (ConfigError, DataFileError, EpochLimitWarning, FingerprintMismatchError, InvalidArgumentError,
                   NonFiniteError, DimensionMismatchError)
from ..preferences import Preferences, require_positive
from .base import Analysis
from .grad import LOSSES, REDUCTIONS, loss, loss_and_grad, trainable_mask

logger = logging.getLogger(__name__)

CALIBRATION_FORMAT = 'pic-calibration'
CALIBRATION_VERSION = 1


class TrainConfig(Preferences):
    """Adam constants, learning-rate schedule and loss options."""

    _name = 'TrainConfig'
    _defaults = {
        'learning_rate': 0.01,
        'decay': 0.99,
        'beta1': 0.9,
        'beta2': 0.999,
        'epsilon': 1e-8,
        'restart_per_phase': False,
        'loss': 'l1',
        'reduction': 'sum',
        'chunk_size': 1024,
        'threads': 1,
    }

    def _validate(self):
        require_positive(self, 'learning_rate', 'decay', 'epsilon', 'chunk_size', 'threads')
        if not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1:
            raise ConfigError("beta1 and beta2 must lie in [0, 1)")
        if self.decay > 1:
            raise ConfigError("decay must not exceed 1")
        if self.loss not in LOSSES:
            raise ConfigError("loss must be one of {}".format(', '.join(LOSSES)))
        if self.reduction not in REDUCTIONS:
            raise ConfigError("reduction must be one of {}".format(', '.join(REDUCTIONS)))


class Phase(object):
    """A schedule leg: a name and the parameter groups trained during it."""

    def __init__(self, name, groups):
        self.name = name
        self.groups = tuple(groups)
        unknown = set(self.groups) - set(GROUPS)
        if not self.groups or unknown:
            raise ConfigError("phase '{}' needs groups from {}".format(name, ', '.join(GROUPS)))

    def as_dict(self):
        return {'name': self.name, 'groups': list(self.groups)}

    def __eq__(self, other):
        return isinstance(other, Phase) and (self.name, self.groups) == (other.name, other.groups)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Phase({!r}, {})'.format(self.name, '+'.join(self.groups))


def default_phases(rounds=8):
    """
    Rounds of {a, eta} then {b, eta}, then {theta, alpha, eta}, then every group.

    >>> [p.name for p in default_phases(1)]
    ['round 1 a', 'round 1 b', 'theta alpha', 'joint']
    """
    phases = []
    for k in range(1, rounds + 1):
        phases.append(Phase('round {} a'.format(k), ('a', 'eta')))
        phases.append(Phase('round {} b'.format(k), ('b', 'eta')))
    phases.append(Phase('theta alpha', ('theta', 'alpha', 'eta')))
    phases.append(Phase('joint', GROUPS))
    return phases


class ScheduleConfig(Preferences):
    """
    The nonsimultaneous training schedule.

    phases is an optional list of (name, groups) pairs replacing the default
    alternation; untrainable_shifters lists phase shifters whose a and b never train.
    """

    _name = 'ScheduleConfig'
    _defaults = {
        'alternation_rounds': 8,
        'cutoff_threshold': 1e-5,
        'cutoff_streak': 5,
        'max_epochs': 2000,
        'phases': None,
        'untrainable_shifters': [],
    }

    def _validate(self):
        require_positive(self, 'cutoff_threshold', 'cutoff_streak')
        if self.alternation_rounds < 0 or self.max_epochs < 0:
            raise ConfigError("alternation_rounds and max_epochs must be non-negative")
        if not self.phase_list():
            raise ConfigError("the schedule has no phases")

    def phase_list(self):
        if self.phases is None:
            return default_phases(self.alternation_rounds)
        return [p if isinstance(p, Phase) else Phase(p[0], p[1]) for p in self.phases]

    def as_dict(self):
        out = super(ScheduleConfig, self).as_dict()
        out['phases'] = [p.as_dict() for p in self.phase_list()]
        out['untrainable_shifters'] = [int(k) for k in self.untrainable_shifters]
        return out


class AdamState(object):
    """
    Adam moments with one step count per coordinate, so a coordinate unfrozen
    late gets a bias-corrected first step.
    """

    def __init__(self, size, learning_rate=0.01, decay=0.99, beta1=0.9, beta2=0.999, epsilon=1e-8):
        if not learning_rate > 0:
            raise InvalidArgumentError("learning rate must be positive")
        self.learning_rate = float(learning_rate)
        self.decay = float(decay)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.epsilon = float(epsilon)
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.counts = np.zeros(size, dtype=int)
        self.epochs = 0

    @classmethod
    def from_config(cls, size, config):
        return cls(size, config.learning_rate, config.decay, config.beta1, config.beta2, config.epsilon)

    def copy(self):
        out = AdamState(len(self.m), self.learning_rate, self.decay, self.beta1, self.beta2, self.epsilon)
        out.m = self.m.copy()
        out.v = self.v.copy()
        out.counts = self.counts.copy()
        out.epochs = self.epochs
        return out

    def end_epoch(self):
        """Decays the learning rate once."""
        self.learning_rate *= self.decay
        self.epochs += 1


def adam_update(state, flat, values, mask=None):
    """
    One Adam update of a flat vector. Coordinates outside mask, their moments
    and their step counts stay untouched.

    Returns
    -------
    flat : np.ndarray
        A new array.
    state : AdamState
        A new object.
    """
    flat = np.array(flat, dtype=float)
    on = np.ones(len(flat), dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    g = np.asarray(values, dtype=float)[on]
    state = state.copy()
    state.counts[on] += 1
    state.m[on] = state.beta1 * state.m[on] + (1 - state.beta1) * g
    state.v[on] = state.beta2 * state.v[on] + (1 - state.beta2) * g * g
    m_hat = state.m[on] / (1 - state.beta1 ** state.counts[on])
    v_hat = state.v[on] / (1 - state.beta2 ** state.counts[on])
    flat[on] -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return flat, state


def adam_step(state, params, grad):
    """
    One Adam update of the unmasked coordinates of params.

    Returns
    -------
    params : Parameters
        A new object.
    state : AdamState
        A new object.
    """
    if len(grad) != params.size or len(state.m) != params.size:
        raise DimensionMismatchError("gradient, state and parameters do not align")
    if not grad.is_finite():
        bad = np.flatnonzero(~np.isfinite(grad.values))
        raise NonFiniteError("non-finite gradient at flat index {}".format(bad.tolist()[:10]))
    flat, state = adam_update(state, params.flatten(), grad.values, grad.mask)
    return params.unflatten(flat, project=True), state


def cutoff_met(loss_history, threshold=1e-5, streak=5):
    """
    True when each of the last streak decreases between adjacent epochs lies in [0, threshold).

    >>> cutoff_met([1.0, 0.999999, 0.999998, 0.999997, 0.999996, 0.999995], 1e-5, 5)
    True
    >>> cutoff_met([1.0, 0.9, 0.8], 1e-5, 5)
    False
    """
    if len(loss_history) < streak + 1:
        return False
    drops = -np.diff(np.asarray(loss_history[-(streak + 1):], dtype=float))
    return bool(np.all((drops >= 0) & (drops < threshold)))


class PhaseRecord(object):
    """Where a finished leg sits in the loss history: entries start..stop - 1."""

    def __init__(self, name, groups, start, stop, cutoff):
        self.name = name
        self.groups = tuple(groups)
        self.start = int(start)
        self.stop = int(stop)
        self.cutoff = bool(cutoff)

    @property
    def epochs(self):
        return self.stop - self.start

    def as_dict(self):
        return {'name': self.name, 'groups': list(self.groups), 'start': self.start, 'stop': self.stop,
                'epochs': self.epochs, 'cutoff': self.cutoff}

    @classmethod
    def from_dict(cls, payload):
        return cls(payload['name'], payload['groups'], payload['start'], payload['stop'], payload['cutoff'])

    def __eq__(self, other):
        return isinstance(other, PhaseRecord) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other


class CalibrationResult(Analysis):
    """
    The outcome of a training schedule.

    Parameters
    ----------
    params : Parameters
        The gauge-fixed trained parameters.
    raw_params : Parameters
        The trained parameters as the optimizer left them.
    loss_history : list of float
        One loss per epoch.
    phases : list of PhaseRecord
    config : dict
        Echo of the settings that produced the result.
    seed : int or None
    fingerprint : str
        The circuit the parameters belong to.
    final_loss : float
        Loss of raw_params after the last update.
    learning_rates : list of float, optional
        The Adam learning rate of every epoch.
    """

    _name = "Calibration"

    def __init__(self, params, raw_params, loss_history, phases, config, seed, fingerprint, final_loss,
                 learning_rates=None, display=False):
        super(CalibrationResult, self).__init__(params, display=display)
        self.params = params
        self.raw_params = raw_params
        self.loss_history = [float(v) for v in loss_history]
        self.phases = list(phases)
        self.config = config
        self.seed = seed
        self.fingerprint = fingerprint
        self.final_loss = float(final_loss)
        self.learning_rates = [float(v) for v in (learning_rates or ())]
        self.logic()

    def run(self):
        self._results = {
            'Phases': len(self.phases),
            'Epochs': len(self.loss_history),
            'Cut-offs met': sum(p.cutoff for p in self.phases),
            'Initial loss': self.loss_history[0] if self.loss_history else self.final_loss,
            'Final loss': self.final_loss,
            'Seed': 'None' if self.seed is None else self.seed,
        }

    @property
    def epoch_counts(self):
        return [p.epochs for p in self.phases]

    @property
    def boundaries(self):
        """Loss history indices where a new leg starts."""
        return [p.start for p in self.phases[1:]]

    def boundary_drops(self):
        """
        The loss drop from the last epoch of a leg to the first epoch of the
        next, for every leg after the first, and the median drop between
        adjacent epochs inside legs.

        Returns
        -------
        drops : np.ndarray
        median_within : float
        """
        history = np.asarray(self.loss_history)
        boundary = []
        within = []
        for number, phase in enumerate(self.phases):
            if phase.stop == phase.start:
                continue
            if number > 0 and phase.start > 0:
                boundary.append(history[phase.start - 1] - history[phase.start])
            within.extend(-np.diff(history[phase.start:phase.stop]))
        median = float(np.median(within)) if within else 0.0
        return np.array(boundary), median

    def loss_frame(self):
        """The loss history as a DataFrame with epoch, loss and phase columns."""
        names = []
        for phase in self.phases:
            names.extend([phase.name] * phase.epochs)
        return pd.DataFrame({'epoch': np.arange(len(self.loss_history)), 'loss': self.loss_history,
                             'phase': names})

    def as_dict(self):
        return {
            'format': CALIBRATION_FORMAT,
            'version': CALIBRATION_VERSION,
            'fingerprint': self.fingerprint,
            'seed': self.seed,
            'config': self.config,
            'phases': [p.as_dict() for p in self.phases],
            'loss_history': self.loss_history,
            'learning_rates': self.learning_rates,
            'final_loss': self.final_loss,
            'params': self.params.as_dict(),
            'raw_params': self.raw_params.as_dict(),
        }

    def save(self, path):
        with open(path, 'w') as handle:
            json.dump(self.as_dict(), handle, sort_keys=True)
            handle.write('\n')

    def save_loss_history(self, path):
        self.loss_frame().to_csv(path, index=False)


def load_calibration(path, spec=None):
    """Reads a file written by CalibrationResult.save, checking the fingerprint against spec when given."""
    try:
        with open(path) as handle:
            payload = json.load(handle)
    except ValueError as err:
        raise DataFileError("{} is not valid JSON: {}".format(path, err))
    if payload.get('format') != CALIBRATION_FORMAT or payload.get('version') != CALIBRATION_VERSION:
        raise DataFileError("{} is not a version {} calibration report".format(path, CALIBRATION_VERSION))
    if spec is not None and payload.get('fingerprint') != spec.fingerprint():
        raise FingerprintMismatchError("{} was calibrated on another circuit".format(path))
    try:
        return CalibrationResult(Parameters.from_dict(payload['params']),
                                 Parameters.from_dict(payload['raw_params']), payload['loss_history'],
                                 [PhaseRecord.from_dict(p) for p in payload['phases']], payload['config'],
                                 payload['seed'], payload['fingerprint'], payload['final_loss'],
                                 payload.get('learning_rates'))
    except (KeyError, TypeError, ValueError) as err:
        raise DataFileError("malformed calibration report {}: {}".format(path, err))


def run_schedule(spec, train, config=None, train_config=None, init_params=None, psi_in=None, seed=None,
                 display=False):
    """
    Trains the parameters of spec on train with the nonsimultaneous schedule.

    Each leg trains only its groups (eta is trainable in every default leg) and
    stops when cutoff_met holds for the leg's own loss history or after
    max_epochs epochs. One epoch is one loss evaluation over the whole training
    set followed by one Adam step and one learning-rate decay.

    Parameters
    ----------
    spec : CircuitSpec
    train : Dataset or list of Sample
    config : ScheduleConfig, optional
    train_config : TrainConfig, optional
    init_params : Parameters, optional
        Ideal-hardware values by default.
    psi_in : array-like, optional
    seed : int, optional
        Recorded in the result.
    display : bool

    Returns
    -------
    result : CalibrationResult
    """
    config = config or ScheduleConfig()
    train_config = train_config or TrainConfig()
    params = Parameters.ideal(spec) if init_params is None else init_params.copy()
    params.check(spec)
    options = dict(psi_in=psi_in, kind=train_config.loss, reduction=train_config.reduction,
                   chunk_size=train_config.chunk_size, threads=train_config.threads)
    history = []
    records = []
    rates = []
    state = None
    for phase in config.phase_list():
        mask = trainable_mask(params, phase.groups, config.untrainable_shifters)
        if state is None or train_config.restart_per_phase:
            state = AdamState.from_config(params.size, train_config)
        start = len(history)
        met = False
        for epoch in range(config.max_epochs):
            value, grad = loss_and_grad(spec, params, train, mask=mask, **options)
            if not np.isfinite(value) or not grad.is_finite():
                raise NonFiniteError("non-finite loss in phase '{}' at epoch {}".format(phase.name, epoch),
                                     phase=phase.name, epoch=epoch)
            history.append(value)
            rates.append(state.learning_rate)
            logger.debug("%s epoch %d loss %.10g", phase.name, epoch, value)
            if cutoff_met(history[start:], config.cutoff_threshold, config.cutoff_streak):
                met = True
                break
            params, state = adam_step(state, params, grad)
            state.end_epoch()
        records.append(PhaseRecord(phase.name, phase.groups, start, len(history), met))
        if config.max_epochs > 0 and not met:
            warnings.warn("phase '{}' stopped at the epoch limit {}".format(phase.name, config.max_epochs),
                          EpochLimitWarning)
        logger.info("phase '%s': %d epochs, loss %.6g, cut-off %s", phase.name, len(history) - start,
                    history[-1] if len(history) > start else float('nan'), 'met' if met else 'not met')
    final = loss(spec, params, train, **options)
    echo = {'schedule': config.as_dict(), 'train': train_config.as_dict()}
    return CalibrationResult(canonicalize(spec, params), params, history, records, echo, seed,
                             spec.fingerprint(), final, rates, display=display)
