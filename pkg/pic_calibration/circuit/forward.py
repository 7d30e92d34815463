"""pic_calibration module: forward
Classes:
    Parameters - the trainable hardware parameters a, b, theta, alpha and eta.
Functions:
    currents_to_phases - the thermo-optic phase-current law phi = a I^2 + b.
    input_state - the localized input amplitude vector of a spec.
    apply_unit - applies one lossy beam splitter and its phase shifter to an amplitude vector.
    evolve - propagates amplitude vectors through the layers of a mesh.
    output_distribution - eta weighted, masked and renormalized output probabilities.
    transfer_matrix - the dense nonunitary mode transfer matrix.
    wrap_phase - maps phases into [-pi, pi).
    canonicalize - the gauge-fixed copy of a Parameters object.
    phases_to_currents - inverts the phase-current law for target phases.
"""
import logging

import numpy as np
from scipy.stats import gmean

from ..exc import DimensionMismatchError, DegenerateDistributionError, InvalidArgumentError, UnreachablePhaseError

logger = logging.getLogger(__name__)

GROUPS = ('a', 'b', 'theta', 'alpha', 'eta')

# Empirical thermo-optic coefficient in rad/mA^2.
DEFAULT_A = 0.12

# Lower bound kept by alpha and eta after projection; sqrt(alpha) must stay real.
POSITIVE_FLOOR = 1e-9


class Parameters(object):
    """
    The full trainable parameter set of a mesh.

    Parameters
    ----------
    a : array-like
        Phase-current coefficients in rad/mA^2, one per phase shifter.
    b : array-like
        Phase offsets in rad, one per phase shifter.
    theta : array-like
        Beam splitter angles in rad; the reflectivity is sin(theta)^2.
    alpha : array-like
        Transfer efficiency of each beam splitter, positive.
    eta : array-like
        Relative coupling efficiency of each active output port, positive.
    """

    def __init__(self, a, b, theta, alpha, eta):
        self.a = np.array(a, dtype=float).ravel()
        self.b = np.array(b, dtype=float).ravel()
        self.theta = np.array(theta, dtype=float).ravel()
        self.alpha = np.array(alpha, dtype=float).ravel()
        self.eta = np.array(eta, dtype=float).ravel()
        if len(self.a) != len(self.b):
            raise DimensionMismatchError("a and b must have the same length")
        if len(self.theta) != len(self.alpha):
            raise DimensionMismatchError("theta and alpha must have the same length")
        if np.any(self.alpha <= 0) or np.any(self.eta <= 0):
            raise InvalidArgumentError("alpha and eta must be positive")

    @classmethod
    def ideal(cls, spec, a=DEFAULT_A):
        """The ideal-hardware starting point: a=0.12, b=0, theta=pi/4, alpha=1, eta=1."""
        return cls(np.full(spec.ps_count, a), np.zeros(spec.ps_count), np.full(spec.bs_count, np.pi / 4),
                   np.ones(spec.bs_count), np.ones(spec.port_count))

    @property
    def sizes(self):
        return tuple(len(getattr(self, g)) for g in GROUPS)

    @property
    def size(self):
        return sum(self.sizes)

    @property
    def reflectivity(self):
        return np.sin(self.theta) ** 2

    def group_slices(self):
        """Maps each group name to its slice of the flattened vector."""
        out = {}
        start = 0
        for group, n in zip(GROUPS, self.sizes):
            out[group] = slice(start, start + n)
            start += n
        return out

    def flatten(self):
        """Concatenates the groups in the fixed order a, b, theta, alpha, eta."""
        return np.concatenate([getattr(self, g) for g in GROUPS])

    def unflatten(self, flat, project=False):
        """
        Returns a new Parameters object with this object's shape holding the
        values in flat. With project, alpha and eta are first clamped to the
        positive floor.
        """
        flat = np.asarray(flat, dtype=float)
        if flat.shape != (self.size,):
            raise DimensionMismatchError("flat vector has shape {} but {} is required".format(flat.shape, self.size))
        slices = self.group_slices()
        values = {g: flat[slices[g]] for g in GROUPS}
        if project:
            for group in ('alpha', 'eta'):
                values[group] = np.maximum(values[group], POSITIVE_FLOOR)
        return Parameters(**values)

    def copy(self):
        return Parameters(self.a, self.b, self.theta, self.alpha, self.eta)

    def check(self, spec):
        """Raises DimensionMismatchError unless the array lengths fit spec."""
        expected = (spec.ps_count, spec.ps_count, spec.bs_count, spec.bs_count, spec.port_count)
        for group, n, m in zip(GROUPS, self.sizes, expected):
            if n != m:
                raise DimensionMismatchError("{} has length {} but the circuit needs {}".format(group, n, m))

    def as_dict(self):
        return {g: [float(v) for v in getattr(self, g)] for g in GROUPS}

    @classmethod
    def from_dict(cls, payload):
        return cls(*[payload[g] for g in GROUPS])

    def __eq__(self, other):
        return isinstance(other, Parameters) and all(np.array_equal(getattr(self, g), getattr(other, g))
                                                     for g in GROUPS)

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Parameters(ps={}, bs={}, ports={})'.format(len(self.a), len(self.theta), len(self.eta))


def currents_to_phases(a, b, currents):
    """
    Applies the phase-current law phi_k = a_k I_k^2 + b_k elementwise. Phases are not wrapped.

    Parameters
    ----------
    a, b : array-like
        Coefficients per phase shifter.
    currents : array-like
        Currents in mA, shape (ps,) or (n, ps).

    Returns
    -------
    phases : np.ndarray
        Same shape as currents.

    >>> float(currents_to_phases([0.12], [0.5], [5.0])[0])
    3.5
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    currents = np.asarray(currents, dtype=float)
    if a.shape != b.shape or currents.shape[-1:] != a.shape:
        raise DimensionMismatchError("a, b and currents must have equal lengths, got {}, {} and {}".format(
            a.shape, b.shape, currents.shape))
    return a * currents ** 2 + b


def wrap_phase(phases):
    """Maps phases into [-pi, pi)."""
    phases = np.asarray(phases, dtype=float)
    return phases - 2 * np.pi * np.floor((phases + np.pi) / (2 * np.pi))


def input_state(circuit, mode=None):
    """The localized unit amplitude vector on mode (the circuit's input mode by default)."""
    spec = getattr(circuit, 'spec', circuit)
    psi = np.zeros(circuit.mode_count, dtype=complex)
    psi[spec.input_mode if mode is None else mode] = 1.0
    return psi


def apply_unit(state, unit, theta, alpha, phi=None):
    """
    Applies one lossy beam splitter sqrt(alpha) [[cos, sin], [-sin, cos]] to the
    pair (top_mode, top_mode + 1) of state, then diag(1, exp(i phi)) when phi is
    given. Returns a new array.

    Parameters
    ----------
    state : array-like
        Complex amplitude vector.
    unit : Unit
        The unit to apply.
    theta, alpha : float
        Angle and transfer efficiency of the unit's beam splitter.
    phi : float, optional
        Phase of the following phase shifter, applied to the lower mode.
    """
    out = np.array(state, dtype=complex)
    i, j = unit.modes
    if j >= len(out):
        raise InvalidArgumentError("unit {!r} is outside a state of {} modes".format(unit, len(out)))
    root = np.sqrt(alpha)
    c, s = np.cos(theta), np.sin(theta)
    xi, xj = out[i], out[j]
    out[i] = root * (c * xi + s * xj)
    out[j] = root * (-s * xi + c * xj)
    if phi is not None:
        out[j] *= np.exp(1j * phi)
    return out


def layer_factors(layer, params, phases):
    """
    Per-unit quantities of one layer for a batch: cos, sin and sqrt(alpha) of
    shape (units,) and the phase factors exp(i phi) of shape (n, units), equal to
    one for units without a phase shifter.
    """
    theta = params.theta[layer.bs_indices]
    root = np.sqrt(params.alpha[layer.bs_indices])
    factors = np.ones((phases.shape[0], len(layer)), dtype=complex)
    if layer.has_ps.any():
        factors[:, layer.has_ps] = np.exp(1j * phases[:, layer.ps_indices])
    return np.cos(theta), np.sin(theta), root, factors


def apply_layer(states, layer, params, phases):
    """Applies every unit of layer to a batch of states of shape (n, modes). Returns a new array."""
    c, s, root, factors = layer_factors(layer, params, phases)
    i = layer.tops
    j = i + 1
    xi = states[:, i]
    xj = states[:, j]
    out = states.copy()
    out[:, i] = root * (c * xi + s * xj)
    out[:, j] = factors * root * (-s * xi + c * xj)
    return out


def _as_batch(currents, n_ps):
    currents = np.asarray(currents, dtype=float)
    single = currents.ndim == 1
    batch = currents.reshape(1, -1) if single else currents
    if batch.ndim != 2 or batch.shape[1] != n_ps:
        raise DimensionMismatchError("currents have shape {} but {} phase shifters are needed".format(
            currents.shape, n_ps))
    return batch, single


def propagate(circuit, params, currents, psi_in=None, record=False):
    """
    Propagates a batch through circuit.

    Parameters
    ----------
    circuit : CircuitSpec or MeshSection
    params : Parameters
    currents : np.ndarray
        Shape (n, ps).
    psi_in : array-like, optional
        One input amplitude vector shared by the batch, or one per sample (n, modes).
    record : bool
        Keep the input of every layer for reverse accumulation.

    Returns
    -------
    states : np.ndarray
        Output amplitudes, shape (n, modes).
    tape : list of np.ndarray or None
        Layer inputs in order when record is set.
    phases : np.ndarray
        The phases of every shifter, shape (n, ps).
    """
    if len(params.theta) < 1 and len(circuit.layers) > 0:
        raise DimensionMismatchError("no beam splitter parameters for a non-empty circuit")
    phases = currents_to_phases(params.a, params.b, currents)
    psi = input_state(circuit) if psi_in is None else np.asarray(psi_in, dtype=complex)
    if psi.shape[-1] != circuit.mode_count:
        raise DimensionMismatchError("input state has {} modes but the circuit has {}".format(
            psi.shape[-1], circuit.mode_count))
    states = np.array(np.broadcast_to(psi, (currents.shape[0], circuit.mode_count)), dtype=complex)
    tape = [] if record else None
    for layer in circuit.layers:
        if record:
            tape.append(states)
        states = apply_layer(states, layer, params, phases)
    return states, tape, phases


def evolve(circuit, params, currents, psi_in=None):
    """
    Propagates psi_in through every layer of circuit, each unit acting as in
    apply_unit with phases from currents_to_phases.

    Parameters
    ----------
    circuit : CircuitSpec or MeshSection
    params : Parameters
    currents : array-like
        Currents in mA, shape (ps,) or (n, ps).
    psi_in : array-like, optional
        Input amplitude vector, the localized input by default.

    Returns
    -------
    psi_out : np.ndarray
        Complex amplitudes of shape (modes,) or (n, modes).
    """
    batch, single = _as_batch(currents, len(params.a))
    states, _, _ = propagate(circuit, params, batch, psi_in)
    return states[0] if single else states


def distribution_from_states(states, spec, eta):
    """The eta weighted, masked and renormalized distributions of a batch of output states."""
    weights = np.abs(states[:, spec.ports]) ** 2 * eta
    totals = weights.sum(axis=1)
    if not np.all(totals > 0):
        bad = np.flatnonzero(~(totals > 0))
        raise DegenerateDistributionError("no light reaches the active ports for sample(s) {}".format(
            bad.tolist()[:10]))
    return weights / totals[:, None]


def output_distribution(spec, params, currents, psi_in=None):
    """
    The network probability distribution over the active ports: |psi_v|^2 on the
    active ports, weighted by eta and renormalized to sum to one.

    Returns
    -------
    probabilities : np.ndarray
        Shape (ports,) or (n, ports) following the shape of currents.
    """
    params.check(spec)
    batch, single = _as_batch(currents, spec.ps_count)
    states, _, _ = propagate(spec, params, batch, psi_in)
    probabilities = distribution_from_states(states, spec, params.eta)
    return probabilities[0] if single else probabilities


def transfer_matrix(circuit, params, currents):
    """The dense (modes x modes) transfer matrix of circuit at one current setting."""
    currents = np.asarray(currents, dtype=float).reshape(1, -1)
    n = circuit.mode_count
    batch = np.repeat(currents, n, axis=0)
    states, _, _ = propagate(circuit, params, batch, np.eye(n, dtype=complex))
    return states.T


_FIXED = -2
_FREE = -1


def canonicalize(spec, params):
    """
    The gauge-fixed copy of params with identical predicted distributions for the
    spec's localized input.

    * theta is mapped into [0, pi/2]. A sign pattern (s_i, s_j) entering a unit
      turns theta into s_i s_j theta, a sign on its upper output adds pi to theta
      and a sign on its lower output is absorbed by b += pi. Signs are pushed
      forward layer by layer; edges that are still dark or that leave a unit
      through its lower arm can take either sign, which makes every unit of the
      light-cone mesh reachable.
    * b is wrapped into [-pi, pi).
    * alpha and eta are divided by their geometric means.
    """
    out = params.copy()
    theta = out.theta
    b = out.b
    sign = np.ones(spec.mode_count, dtype=int)
    # Per mode: _FREE for a dark edge, a phase shifter index for a lower output that may flip, else _FIXED.
    flip = np.full(spec.mode_count, _FREE, dtype=int)
    flip[spec.input_mode] = _FIXED
    last = len(spec.layers)
    for number, layer in enumerate(spec.layers, start=1):
        for unit in layer:
            i, j = unit.modes
            k = unit.bs_index
            want = 1 if np.mod(theta[k], np.pi) <= np.pi / 2 else -1
            if sign[i] * sign[j] != want:
                for m in (j, i):
                    if flip[m] == _FIXED:
                        continue
                    if flip[m] >= 0:
                        b[flip[m]] += np.pi
                    sign[m] = -sign[m]
                    break
                else:
                    logger.debug("beam splitter %d cannot be mapped into [0, pi/2]", k)
            si, sj = sign[i], sign[j]
            reduced = np.mod(si * sj * theta[k], 2 * np.pi)
            if reduced > np.pi:
                ti = -si
                reduced -= np.pi
            else:
                ti = si
            theta[k] = reduced
            if unit.ps_index is not None:
                tj = sj
                if ti * si == -1:
                    b[unit.ps_index] += np.pi
                flip[j] = unit.ps_index
            else:
                tj = sj if number == last else ti * si * sj
                flip[j] = _FIXED
            flip[i] = _FIXED
            sign[i], sign[j] = ti, tj
    out.b = wrap_phase(b)
    out.theta = theta
    return gauge_fix(out)


def gauge_fix(params):
    """Returns a copy of params with alpha and eta rescaled to geometric mean one."""
    out = params.copy()
    if len(out.alpha):
        out.alpha = out.alpha / gmean(out.alpha)
    if len(out.eta):
        out.eta = out.eta / gmean(out.eta)
    return out


def phases_to_currents(params, target_phases, max_current=7.0):
    """
    Inverts the phase-current law for every shifter:
    I_k = sqrt(mod(phi*_k - b_k, 2 pi) / a_k).

    Parameters
    ----------
    params : Parameters
        Calibrated parameters; every a_k must be positive.
    target_phases : array-like
        The wanted phase of each shifter in rad.
    max_current : float
        The largest current the driver delivers in mA.

    Returns
    -------
    currents : np.ndarray
    """
    target = np.asarray(target_phases, dtype=float)
    if target.shape != params.a.shape:
        raise DimensionMismatchError("{} target phases for {} phase shifters".format(target.size, len(params.a)))
    bad = np.flatnonzero(~(params.a > 0))
    if len(bad):
        raise UnreachablePhaseError("phase shifters {} have a non-positive coefficient".format(bad.tolist()),
                                    shifters=bad)
    currents = np.sqrt(np.mod(target - params.b, 2 * np.pi) / params.a)
    bad = np.flatnonzero(currents > max_current)
    if len(bad):
        raise UnreachablePhaseError("phase shifters {} need more than {} mA".format(bad.tolist(), max_current),
                                    shifters=bad)
    return currents
