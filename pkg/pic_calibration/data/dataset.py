"""pic_calibration module: dataset
Classes:
    Sample - one current setting and the output distribution measured for it.
    Dataset - samples tied to the fingerprint of the circuit that produced them.
    TargetConfig - the spread of randomly drawn hardware parameters around ideal values.
Functions:
    sample_target_params - draws a random imperfect chip.
    generate_synthetic_dataset - simulates noisy measurements of a chip.
    split_dataset - seeded train/test partition.
    add_noise - additive Gaussian noise on a distribution, clamped and renormalized.
    save_dataset, load_dataset - line-delimited JSON records with a metadata header.
    save_params, load_params - parameter files tied to a circuit fingerprint.
"""
import json
import logging

import numpy as np

from ..circuit import Parameters, output_distribution, mesh_from_dict
from ..circuit.mesh import MESH_FORMAT, MESH_VERSION
from ..exc import (DataFileError, FingerprintMismatchError, InvalidArgumentError, MalformedRecordError,
                   DimensionMismatchError)
from ..preferences import Preferences
from .data import Data
from .data_operations import to_float_array

logger = logging.getLogger(__name__)

DATASET_FORMAT = 'pic-dataset'
PARAMS_FORMAT = 'pic-params'
FORMAT_VERSION = 1

DEFAULT_CURRENT_RANGE = (0.0, 7.0)

# Probability vectors must sum to one within this tolerance.
_SUM_TOLERANCE = 1e-9

# Guard against a noise level that never leaves a positive entry.
_MAX_REDRAWS = 1000


class Sample(object):
    """
    A current distribution applied to all phase shifters and the normalized
    output distribution over the active ports.

    Parameters
    ----------
    currents : array-like
        Currents in mA, one per phase shifter.
    probabilities : array-like
        Non-negative probabilities summing to one, one per active port.
    index : int, optional
        Position of the sample in the generating sequence.
    """

    def __init__(self, currents, probabilities, index=None):
        self.currents = to_float_array(currents, 'currents')
        self.probabilities = to_float_array(probabilities, 'probabilities')
        self.index = index
        if np.any(self.probabilities < 0) or abs(self.probabilities.sum() - 1.0) > _SUM_TOLERANCE:
            raise InvalidArgumentError("probabilities must be non-negative and sum to one")

    def as_dict(self):
        return {
            'index': self.index,
            'currents': [float(v) for v in self.currents],
            'probabilities': [float(v) for v in self.probabilities],
        }

    def __eq__(self, other):
        return (isinstance(other, Sample) and self.index == other.index
                and np.array_equal(self.currents, other.currents)
                and np.array_equal(self.probabilities, other.probabilities))

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Sample(index={}, ps={}, ports={})'.format(self.index, len(self.currents), len(self.probabilities))


class Dataset(Data):
    """
    An ordered collection of samples produced by one circuit.

    Parameters
    ----------
    samples : list of Sample
    fingerprint : str
        Fingerprint of the CircuitSpec the samples belong to.
    metadata : dict, optional
        Generation provenance: seed, noise level, current range and targets.
    spec : CircuitSpec, optional
        The circuit itself, written to the file header when present.
    name : str, optional
    """

    def __init__(self, samples, fingerprint, metadata=None, spec=None, name=None):
        samples = list(samples)
        super(Dataset, self).__init__(samples, name)
        self._fingerprint = fingerprint
        self._metadata = dict(metadata or {})
        self._spec = spec
        if spec is not None and spec.fingerprint() != fingerprint:
            raise FingerprintMismatchError("dataset fingerprint does not match its circuit")
        if samples:
            shapes = set((len(s.currents), len(s.probabilities)) for s in samples)
            if len(shapes) != 1:
                raise DimensionMismatchError("samples have inconsistent lengths {}".format(sorted(shapes)))
            if spec is not None and shapes != {(spec.ps_count, spec.port_count)}:
                raise DimensionMismatchError("samples do not fit {!r}".format(spec))

    @property
    def samples(self):
        return self._values

    @property
    def fingerprint(self):
        return self._fingerprint

    @property
    def metadata(self):
        return self._metadata

    @property
    def spec(self):
        return self._spec

    @property
    def currents(self):
        """All currents stacked to shape (n, ps)."""
        return np.array([s.currents for s in self._values])

    @property
    def probabilities(self):
        """All distributions stacked to shape (n, ports)."""
        return np.array([s.probabilities for s in self._values])

    @property
    def synthetic(self):
        return self._metadata.get('targets') == 'synthetic'

    def check(self, spec):
        """Raises FingerprintMismatchError unless the dataset was produced by spec."""
        if spec.fingerprint() != self._fingerprint:
            raise FingerprintMismatchError("dataset belongs to circuit {}... but {}... was given".format(
                self._fingerprint[:12], spec.fingerprint()[:12]))

    def subset(self, indices, name=None):
        """The dataset restricted to the given positions, in that order."""
        return Dataset([self._values[i] for i in indices], self._fingerprint, self._metadata, self._spec, name)

    def __eq__(self, other):
        return (isinstance(other, Dataset) and self._fingerprint == other._fingerprint
                and self._metadata == other._metadata and self._values == other._values)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Dataset(n={}, fingerprint={}...)'.format(len(self), self._fingerprint[:12])


class TargetConfig(Preferences):
    """Half widths of the intervals random chips are drawn from."""

    _name = 'TargetConfig'
    _defaults = {
        'a': 0.12,
        'delta_theta': 0.05,
        'delta_alpha': 0.1,
        'delta_eta': 0.1,
    }

    def _validate(self):
        if not self.a > 0:
            raise InvalidArgumentError("a must be positive")
        if not 0 <= self.delta_theta <= 0.5:
            raise InvalidArgumentError("delta_theta must lie in [0, 0.5]")
        if not 0 <= self.delta_alpha < 1:
            raise InvalidArgumentError("delta_alpha must lie in [0, 1)")
        if not 0 <= self.delta_eta < 1:
            raise InvalidArgumentError("delta_eta must lie in [0, 1)")


def sample_target_params(spec, rng, config=None):
    """
    Draws a random chip near the ideal one.

    a is fixed to its empirical value, b ~ U[-pi, pi), sin^2(theta) ~ U[0.5 - dt, 0.5 + dt],
    alpha ~ U[1 - da, 1] and eta ~ U[1 - de, 1 + de].

    Parameters
    ----------
    spec : CircuitSpec
    rng : numpy.random.Generator
    config : TargetConfig, optional

    Returns
    -------
    params : Parameters
    """
    config = config or TargetConfig()
    b = rng.uniform(-np.pi, np.pi, spec.ps_count)
    reflectivity = rng.uniform(0.5 - config.delta_theta, 0.5 + config.delta_theta, spec.bs_count)
    alpha = rng.uniform(1 - config.delta_alpha, 1.0, spec.bs_count)
    eta = rng.uniform(1 - config.delta_eta, 1 + config.delta_eta, spec.port_count)
    theta = np.arcsin(np.sqrt(reflectivity))
    return Parameters(np.full(spec.ps_count, config.a), b, theta, alpha, eta)


def add_noise(clean, sigma, rng):
    """Adds N(0, sigma) per entry, clamps at zero and renormalizes. Returns the vector and the redraw count."""
    for redraws in range(_MAX_REDRAWS):
        noisy = np.maximum(clean + rng.normal(0.0, sigma, clean.shape), 0.0)
        total = noisy.sum()
        if total > 0:
            return noisy / total, redraws
    raise InvalidArgumentError("noise level {} leaves no positive probability".format(sigma))


def generate_synthetic_dataset(spec, target_params, n, noise_sigma=0.0, current_range=DEFAULT_CURRENT_RANGE,
                               seed=0, start_index=0, name=None):
    """
    Simulates measurements of a chip with known parameters.

    Sample k draws its currents uniformly from current_range and then its noise
    from numpy.random.default_rng([seed, k]), so any sample can be regenerated
    on its own. Noisy distributions are clamped at zero and renormalized; a
    sample whose noisy distribution is all zero is redrawn and the redraw is
    counted in the metadata.

    Parameters
    ----------
    spec : CircuitSpec
    target_params : Parameters
    n : int
        Number of samples, at least one.
    noise_sigma : float
        Standard deviation of the additive Gaussian noise on the normalized scale.
    current_range : tuple of float
        Lowest and highest current in mA.
    seed : int
    start_index : int
        Index of the first sample; a test set continues the index range of its training set.
    name : str, optional

    Returns
    -------
    dataset : Dataset
    """
    if int(n) != n or n < 1:
        raise InvalidArgumentError("n must be a positive integer, got {!r}".format(n))
    if not noise_sigma >= 0:
        raise InvalidArgumentError("noise sigma must be non-negative, got {!r}".format(noise_sigma))
    low, high = float(current_range[0]), float(current_range[1])
    if not 0 <= low <= high:
        raise InvalidArgumentError("invalid current range {!r}".format(current_range))
    target_params.check(spec)
    indices = range(int(start_index), int(start_index) + int(n))
    rngs = [np.random.default_rng([int(seed), k]) for k in indices]
    currents = np.array([rng.uniform(low, high, spec.ps_count) for rng in rngs]).reshape(int(n), spec.ps_count)
    clean = output_distribution(spec, target_params, currents)
    samples = []
    redraws = 0
    for k, rng, row_currents, row in zip(indices, rngs, currents, clean):
        if noise_sigma > 0:
            row, extra = add_noise(row, noise_sigma, rng)
            redraws += extra
        samples.append(Sample(row_currents, row, index=k))
    if redraws:
        logger.info("redrew the noise of %d all-zero sample(s)", redraws)
    metadata = {
        'seed': int(seed),
        'noise_sigma': float(noise_sigma),
        'current_range': [low, high],
        'start_index': int(start_index),
        'noise_redraws': redraws,
        'targets': 'synthetic',
        'target_params': target_params.as_dict(),
    }
    return Dataset(samples, spec.fingerprint(), metadata, spec=spec, name=name)


def split_dataset(ds, ratio, seed=0):
    """
    Splits ds into train and test parts by a seeded shuffle. The train part holds
    floor(n * ratio) samples; both parts keep the original sample order.
    """
    if not 0 < ratio < 1:
        raise InvalidArgumentError("ratio must lie strictly between 0 and 1, got {!r}".format(ratio))
    n = len(ds)
    n_train = int(np.floor(n * ratio + 1e-9))
    if n_train == 0 or n_train == n:
        raise InvalidArgumentError("splitting {} samples at {} leaves one side empty".format(n, ratio))
    order = np.random.default_rng(seed).permutation(n)
    train = np.sort(order[:n_train])
    test = np.sort(order[n_train:])
    return ds.subset(train, name='train'), ds.subset(test, name='test')


def save_dataset(ds, path):
    """Writes a header line and one JSON record per sample. Floats keep their shortest exact repr."""
    header = {
        'format': DATASET_FORMAT,
        'version': FORMAT_VERSION,
        'fingerprint': ds.fingerprint,
        'mesh': None if ds.spec is None else ds.spec.as_dict(),
        'n': len(ds),
        'metadata': ds.metadata,
    }
    with open(path, 'w') as handle:
        handle.write(json.dumps(header, sort_keys=True))
        handle.write('\n')
        for sample in ds:
            handle.write(json.dumps(sample.as_dict(), sort_keys=True))
            handle.write('\n')


def _read_header(line, path):
    try:
        header = json.loads(line)
    except ValueError:
        raise MalformedRecordError("{}:1: unreadable header".format(path), line=1, last_good_line=0)
    if not isinstance(header, dict) or header.get('format') != DATASET_FORMAT:
        raise DataFileError("{} is not a dataset file".format(path))
    if header.get('version') != FORMAT_VERSION:
        raise DataFileError("{} has unsupported version {!r}".format(path, header.get('version')))
    return header


def load_dataset(path, spec=None):
    """
    Reads a file written by save_dataset.

    Parameters
    ----------
    path : str
    spec : CircuitSpec, optional
        When given, the header fingerprint must match it.

    Returns
    -------
    dataset : Dataset
    """
    with open(path) as handle:
        lines = handle.read().splitlines()
    if not lines:
        raise MalformedRecordError("{} is empty".format(path), line=1, last_good_line=0)
    header = _read_header(lines[0], path)
    fingerprint = header.get('fingerprint')
    if spec is not None and spec.fingerprint() != fingerprint:
        raise FingerprintMismatchError("{} belongs to another circuit".format(path))
    if spec is None and header.get('mesh') is not None:
        payload = dict(header['mesh'], format=MESH_FORMAT, version=MESH_VERSION)
        spec = mesh_from_dict(payload)
    samples = []
    last_good = 1
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            samples.append(Sample(record['currents'], record['probabilities'], record.get('index')))
        except (ValueError, KeyError, TypeError) as err:
            raise MalformedRecordError("{}:{}: malformed record after line {} ({})".format(
                path, number, last_good, err), line=number, last_good_line=last_good)
        last_good = number
    if len(samples) != header.get('n', len(samples)):
        raise MalformedRecordError("{} announces {} samples but ends after {} (last good line {})".format(
            path, header.get('n'), len(samples), last_good), line=last_good + 1, last_good_line=last_good)
    try:
        return Dataset(samples, fingerprint, header.get('metadata'), spec=spec)
    except FingerprintMismatchError:
        raise FingerprintMismatchError("{} header mesh does not match its fingerprint".format(path))


def save_params(params, path, spec=None):
    """Writes params as versioned JSON, tied to spec when given."""
    payload = {'format': PARAMS_FORMAT, 'version': FORMAT_VERSION,
               'fingerprint': None if spec is None else spec.fingerprint()}
    payload.update(params.as_dict())
    with open(path, 'w') as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write('\n')


def params_from_dict(payload, spec=None, source='parameters'):
    """Builds Parameters from a saved dict and checks it against spec when given."""
    if payload.get('format') != PARAMS_FORMAT or payload.get('version') != FORMAT_VERSION:
        raise DataFileError("{} is not a version {} parameter document".format(source, FORMAT_VERSION))
    if spec is not None:
        if payload.get('fingerprint') not in (None, spec.fingerprint()):
            raise FingerprintMismatchError("{} belong to another circuit".format(source))
    try:
        params = Parameters.from_dict(payload)
    except (KeyError, TypeError, ValueError) as err:
        raise DataFileError("malformed {}: {}".format(source, err))
    if spec is not None:
        params.check(spec)
    return params


def load_params(path, spec=None):
    try:
        with open(path) as handle:
            payload = json.load(handle)
    except ValueError as err:
        raise DataFileError("{} is not valid JSON: {}".format(path, err))
    return params_from_dict(payload, spec, source=path)
