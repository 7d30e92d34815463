"""pic_calibration module: grad
Classes:
    GradVector - partial derivatives in the flattened parameter order with a trainable mask.
Functions:
    trainable_mask - builds a mask from group names and frozen phase shifters.
    as_batch - stacks samples into current and target arrays.
    loss - the summed half L1 distance (or negative log-likelihood) over a batch.
    loss_and_grad - the loss with its exact gradient by reverse accumulation.
    finite_diff_grad - central difference gradient used as an oracle.
"""
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.special import xlogy

from ..circuit import GROUPS
from ..circuit.forward import layer_factors, propagate
from ..data import Dataset, Sample
from ..exc import DegenerateDistributionError, DimensionMismatchError, InvalidArgumentError

LOSSES = ('l1', 'nll')
REDUCTIONS = ('sum', 'mean')

DEFAULT_CHUNK_SIZE = 1024


class GradVector(object):
    """
    One real partial derivative per parameter in the order a, b, theta, alpha,
    eta, together with the trainable mask aligned to it. Masked-out entries are
    exactly zero.
    """

    def __init__(self, values, mask, slices):
        values = np.asarray(values, dtype=float)
        mask = np.asarray(mask, dtype=bool)
        if values.shape != mask.shape:
            raise DimensionMismatchError("gradient and mask lengths differ: {} and {}".format(
                values.shape, mask.shape))
        self.values = np.where(mask, values, 0.0)
        self.mask = mask
        self._slices = dict(slices)

    @classmethod
    def for_params(cls, params, values, mask=None):
        mask = np.ones(params.size, dtype=bool) if mask is None else mask
        return cls(values, mask, params.group_slices())

    def group(self, name):
        """The partials of one parameter group."""
        return self.values[self._slices[name]]

    def norm(self):
        return float(np.linalg.norm(self.values))

    def is_finite(self):
        return bool(np.all(np.isfinite(self.values)))

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return 'GradVector(n={}, trainable={}, norm={:.4g})'.format(len(self), int(self.mask.sum()), self.norm())


def trainable_mask(params, groups=GROUPS, frozen_shifters=()):
    """
    True for every parameter of the named groups, except a and b of the frozen
    phase shifters.
    """
    unknown = set(groups) - set(GROUPS)
    if unknown:
        raise InvalidArgumentError("unknown parameter group(s): {}".format(', '.join(sorted(unknown))))
    mask = np.zeros(params.size, dtype=bool)
    slices = params.group_slices()
    for group in groups:
        mask[slices[group]] = True
    frozen = np.asarray(list(frozen_shifters), dtype=int)
    if len(frozen):
        if frozen.min() < 0 or frozen.max() >= len(params.a):
            raise InvalidArgumentError("frozen phase shifter index out of range")
        mask[slices['a'].start + frozen] = False
        mask[slices['b'].start + frozen] = False
    return mask


def as_batch(batch):
    """
    Stacks a Dataset, a list of Sample or a (currents, probabilities) pair into
    two float arrays of shapes (n, ps) and (n, ports).
    """
    if isinstance(batch, Dataset):
        currents, targets = batch.currents, batch.probabilities
    elif isinstance(batch, tuple) and len(batch) == 2:
        currents, targets = np.atleast_2d(batch[0]).astype(float), np.atleast_2d(batch[1]).astype(float)
    else:
        samples = list(batch)
        if not all(isinstance(s, Sample) for s in samples):
            raise InvalidArgumentError("a batch must hold Sample objects")
        currents = np.array([s.currents for s in samples])
        targets = np.array([s.probabilities for s in samples])
    if len(currents) == 0:
        raise InvalidArgumentError("the batch is empty")
    if len(currents) != len(targets):
        raise DimensionMismatchError("{} current rows for {} target rows".format(len(currents), len(targets)))
    return currents.reshape(len(currents), -1), targets.reshape(len(targets), -1)


def _check_options(kind, reduction):
    if kind not in LOSSES:
        raise InvalidArgumentError("unknown loss '{}', expected one of {}".format(kind, ', '.join(LOSSES)))
    if reduction not in REDUCTIONS:
        raise InvalidArgumentError("unknown reduction '{}', expected one of {}".format(
            reduction, ', '.join(REDUCTIONS)))


def _chunk(spec, params, currents, targets, psi_in, kind, need_grad):
    """Loss sum and flat gradient of one chunk of samples."""
    states, tape, phases = propagate(spec, params, currents, psi_in, record=need_grad)
    amplitudes = states[:, spec.ports]
    magnitudes = np.abs(amplitudes) ** 2
    weights = magnitudes * params.eta
    totals = weights.sum(axis=1)
    if not np.all(totals > 0):
        raise DegenerateDistributionError("no light reaches the active ports")
    model = weights / totals[:, None]
    if kind == 'l1':
        value = 0.5 * np.abs(model - targets).sum()
        upstream = 0.5 * np.sign(model - targets)
    else:
        value = -xlogy(targets, model).sum()
        upstream = -np.divide(targets, model, out=np.zeros_like(model), where=targets > 0)
    if not need_grad:
        return value, None

    d_weights = (upstream - (upstream * model).sum(axis=1, keepdims=True)) / totals[:, None]
    d_eta = (d_weights * magnitudes).sum(axis=0)
    adjoint = np.zeros_like(states)
    adjoint[:, spec.ports] = 2 * params.eta * d_weights * amplitudes

    d_a = np.zeros(len(params.a))
    d_b = np.zeros(len(params.b))
    d_theta = np.zeros(len(params.theta))
    d_alpha = np.zeros(len(params.alpha))
    squared = currents ** 2
    for layer, inputs in zip(reversed(spec.layers), reversed(tape)):
        c, s, root, factors = layer_factors(layer, params, phases)
        i = layer.tops
        j = i + 1
        xi, xj = inputs[:, i], inputs[:, j]
        ui = root * (c * xi + s * xj)
        uj = root * (-s * xi + c * xj)
        gi, gj = adjoint[:, i], adjoint[:, j]
        if layer.has_ps.any():
            d_phi = np.real(np.conj(gj) * 1j * factors * uj)[:, layer.has_ps]
            d_b[layer.ps_indices] += d_phi.sum(axis=0)
            d_a[layer.ps_indices] += (d_phi * squared[:, layer.ps_indices]).sum(axis=0)
        gu_i = gi
        gu_j = np.conj(factors) * gj
        d_theta[layer.bs_indices] += np.real(np.conj(gu_i) * uj - np.conj(gu_j) * ui).sum(axis=0)
        d_alpha[layer.bs_indices] += (np.real(np.conj(gu_i) * ui + np.conj(gu_j) * uj).sum(axis=0)
                                      / (2 * params.alpha[layer.bs_indices]))
        adjoint[:, i] = root * (c * gu_i - s * gu_j)
        adjoint[:, j] = root * (s * gu_i + c * gu_j)
    return value, np.concatenate([d_a, d_b, d_theta, d_alpha, d_eta])


def _evaluate(spec, params, batch, psi_in, kind, reduction, need_grad, chunk_size, threads):
    _check_options(kind, reduction)
    params.check(spec)
    currents, targets = as_batch(batch)
    if currents.shape[1] != spec.ps_count or targets.shape[1] != spec.port_count:
        raise DimensionMismatchError("batch shapes {} and {} do not fit {!r}".format(
            currents.shape, targets.shape, spec))
    if chunk_size < 1:
        raise InvalidArgumentError("chunk size must be positive")
    bounds = [(k, min(k + chunk_size, len(currents))) for k in range(0, len(currents), chunk_size)]

    def work(bound):
        return _chunk(spec, params, currents[bound[0]:bound[1]], targets[bound[0]:bound[1]], psi_in, kind,
                      need_grad)

    if threads and threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(bound) for bound in bounds]

    # Chunks are reduced in sample order whatever the thread count.
    value = 0.0
    grad = np.zeros(params.size) if need_grad else None
    for part_value, part_grad in parts:
        value += part_value
        if need_grad:
            grad += part_grad
    if reduction == 'mean':
        value /= len(currents)
        if need_grad:
            grad /= len(currents)
    return float(value), grad


def loss(spec, params, batch, psi_in=None, kind='l1', reduction='sum', chunk_size=DEFAULT_CHUNK_SIZE,
         threads=None):
    """
    The training loss over a batch: the sum over samples of half the L1
    distance between the predicted and target distributions, or the multinomial
    negative log-likelihood when kind is 'nll'.

    Parameters
    ----------
    spec : CircuitSpec
    params : Parameters
    batch : Dataset, list of Sample or (currents, probabilities)
    psi_in : array-like, optional
        Input amplitudes, the localized input by default.
    kind : str
        'l1' or 'nll'.
    reduction : str
        'sum' or 'mean' over samples.
    chunk_size : int
        Samples evaluated together.
    threads : int, optional
        Worker threads over chunks; the result does not depend on it.

    Returns
    -------
    value : float
    """
    value, _ = _evaluate(spec, params, batch, psi_in, kind, reduction, False, chunk_size, threads)
    return value


def loss_and_grad(spec, params, batch, psi_in=None, mask=None, kind='l1', reduction='sum',
                  chunk_size=DEFAULT_CHUNK_SIZE, threads=None):
    """
    The loss and its exact gradient with respect to every parameter.

    The gradient is accumulated in reverse through the normalization, the eta
    weighting, |psi|^2 and every layer, using the layer inputs recorded on the
    forward pass. The L1 absolute values use the sign subgradient, zero where a
    predicted probability equals its target exactly.

    Parameters
    ----------
    mask : array-like of bool, optional
        Trainable entries in the flattened order; other partials are set to zero.

    Returns
    -------
    value : float
    grad : GradVector
    """
    value, grad = _evaluate(spec, params, batch, psi_in, kind, reduction, True, chunk_size, threads)
    return value, GradVector.for_params(params, grad, mask)


def finite_diff_grad(spec, params, batch, psi_in=None, step=1e-5, mask=None, objective=None, **kwargs):
    """
    Central differences (L(x + h e_k) - L(x - h e_k)) / 2h for every trainable coordinate.

    Parameters
    ----------
    step : float
        The step h > 0.
    objective : callable, optional
        Replaces the training loss; it is called with a Parameters object.
    kwargs
        Passed to loss.

    Returns
    -------
    grad : GradVector
    """
    if not step > 0:
        raise InvalidArgumentError("step must be positive, got {!r}".format(step))
    if objective is None:
        def objective(p):
            return loss(spec, p, batch, psi_in, **kwargs)
    mask = np.ones(params.size, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    base = params.flatten()
    grad = np.zeros_like(base)
    for k in np.flatnonzero(mask):
        up = base.copy()
        down = base.copy()
        up[k] += step
        down[k] -= step
        grad[k] = (objective(params.unflatten(up)) - objective(params.unflatten(down))) / (2 * step)
    return GradVector.for_params(params, grad, mask)
