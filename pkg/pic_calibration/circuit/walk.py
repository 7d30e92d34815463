"""pic_calibration module: walk
Classes:
    CoinSpec - position and time dependent coin and loss settings of a discrete-time walk.
Functions:
    coin_matrix - the 2x2 coin operator in the (down, up) basis.
    walk_state - runs a lossy discrete-time walk on the position (x) coin space.
    walk_distribution - the walk's probabilities mapped onto the mesh output ports.
    coins_from_mesh - the coin settings a mesh realizes at given currents.
    port_positions - the (position, coin) label of every mesh output port.
    mesh_equivalence_check - largest deviation between the mesh and walk output distributions.
    hadamard_walk_currents - currents preparing the Hadamard walk on a calibrated chip.
    hadamard_reference_distribution - the ideal chip's Hadamard walk distribution.
"""
import numpy as np

from ..exc import DimensionMismatchError, InvalidArgumentError
from .forward import Parameters, currents_to_phases, output_distribution, phases_to_currents
from .mesh import build_qw_mesh

DOWN = 0
UP = 1


def coin_matrix(theta, gamma=0.0, beta=0.0):
    """
    The coin operator [[cos, e^{i gamma} sin], [-e^{i beta} sin, e^{i (gamma + beta)} cos]]
    acting on (down, up) amplitudes.

    >>> np.allclose(coin_matrix(np.pi / 4, 0, np.pi) * np.sqrt(2), [[1, 1], [1, -1]])
    True
    """
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, np.exp(1j * gamma) * s],
                     [-np.exp(1j * beta) * s, np.exp(1j * (gamma + beta)) * c]], dtype=complex)


class CoinSpec(object):
    """
    Coin angles theta, gamma, beta and the loss strength alpha per time step and
    position. Every array has shape (steps, 2 * steps + 1); position x0 = steps is
    the walker's starting site.
    """

    def __init__(self, theta, gamma, beta, alpha):
        self.theta = np.array(theta, dtype=float)
        self.gamma = np.array(gamma, dtype=float)
        self.beta = np.array(beta, dtype=float)
        self.alpha = np.array(alpha, dtype=float)
        shape = self.theta.shape
        if len(shape) != 2 or shape[1] != 2 * shape[0] + 1:
            raise DimensionMismatchError("coin arrays must have shape (T, 2T + 1), got {}".format(shape))
        if any(arr.shape != shape for arr in (self.gamma, self.beta, self.alpha)):
            raise DimensionMismatchError("coin arrays must share one shape")
        if np.any(self.alpha < 0):
            raise InvalidArgumentError("loss strengths must be non-negative")

    @property
    def steps(self):
        return self.theta.shape[0]

    @property
    def positions(self):
        return self.theta.shape[1]

    @property
    def origin(self):
        return self.steps

    @classmethod
    def uniform(cls, steps, theta=np.pi / 4, gamma=0.0, beta=0.0, alpha=1.0):
        """The same coin at every site and step."""
        if steps < 1:
            raise InvalidArgumentError("steps must be positive, got {}".format(steps))
        shape = (steps, 2 * steps + 1)
        return cls(np.full(shape, theta), np.full(shape, gamma), np.full(shape, beta), np.full(shape, alpha))

    @classmethod
    def hadamard(cls, steps, alpha=1.0):
        return cls.uniform(steps, np.pi / 4, 0.0, np.pi, alpha)


def walk_state(steps, coins, initial=None):
    """
    Applies the shift, loss and coin operators step by step: first the coin at
    every site, then sqrt(alpha) on both coin states, then down moves to x - 1
    and up moves to x + 1.

    Parameters
    ----------
    steps : int
        Number of steps T >= 1; coins must cover them.
    coins : CoinSpec
    initial : array-like, optional
        Amplitudes of shape (2T + 1, 2) in (down, up) order per site. Defaults to
        the localized |x0> (x) |down>.

    Returns
    -------
    state : np.ndarray
        Complex amplitudes of shape (2T + 1, 2), subnormalized under loss.
    """
    if steps < 1:
        raise InvalidArgumentError("steps must be positive, got {}".format(steps))
    if coins.steps != steps:
        raise DimensionMismatchError("coins cover {} steps, not {}".format(coins.steps, steps))
    if initial is None:
        state = np.zeros((coins.positions, 2), dtype=complex)
        state[coins.origin, DOWN] = 1.0
    else:
        state = np.array(initial, dtype=complex)
        if state.shape != (coins.positions, 2):
            raise DimensionMismatchError("initial state has shape {} instead of {}".format(
                state.shape, (coins.positions, 2)))
    for t in range(steps):
        c, s = np.cos(coins.theta[t]), np.sin(coins.theta[t])
        gamma, beta = np.exp(1j * coins.gamma[t]), np.exp(1j * coins.beta[t])
        root = np.sqrt(coins.alpha[t])
        down, up = state[:, DOWN], state[:, UP]
        new_down = root * (c * down + gamma * s * up)
        new_up = root * (-beta * s * down + gamma * beta * c * up)
        if new_down[0] != 0 or new_up[-1] != 0:
            raise InvalidArgumentError("the walker leaves the position grid at step {}".format(t + 1))
        state = np.zeros_like(state)
        state[:-1, DOWN] = new_down[1:]
        state[1:, UP] = new_up[:-1]
    return state


def port_positions(spec):
    """
    The (position, coin) label of every output mode of spec with x0 = T. The upper
    output of a final-layer unit at top mode m lands on (x0 + m - T, down) and its
    lower output on (x0 + m - T + 2, up).
    """
    T = spec.steps
    origin = T
    labels = [None] * spec.mode_count
    for unit in spec.layers[-1]:
        m = unit.top_mode
        labels[m] = (origin + m - T, DOWN)
        labels[m + 1] = (origin + m - T + 2, UP)
    return labels


def _unit_sites(spec):
    """Maps (layer number, position) to the unit sitting there, x = x0 + top_mode - (T - 1)."""
    T = spec.steps
    return {(number, T + unit.top_mode - (T - 1)): unit for number, unit in spec.units()}


def coins_from_mesh(spec, params, currents):
    """
    The coin settings realized by a light-cone mesh at the given currents.

    Each unit equals diag(1, -e^{i phi}) C(pi/2 - theta, 0, 0) in the (down, up)
    basis of its input. The trailing -e^{i phi} on the up output is absorbed into
    gamma = pi + phi of the coin that output feeds, so beta is zero everywhere.
    Sites outside the light cone keep a balanced lossless coin.
    """
    T = spec.steps
    phases = currents_to_phases(params.a, params.b, currents)
    coins = CoinSpec.uniform(T)
    sites = _unit_sites(spec)
    for (number, x), unit in sites.items():
        coins.theta[number - 1, x] = np.pi / 2 - params.theta[unit.bs_index]
        coins.alpha[number - 1, x] = params.alpha[unit.bs_index]
        feeder = sites.get((number - 1, x - 1))
        if feeder is not None:
            phi = 0.0 if feeder.ps_index is None else phases[feeder.ps_index]
            coins.gamma[number - 1, x] = np.pi + phi
        else:
            coins.gamma[number - 1, x] = 0.0
    return coins


def walk_distribution(spec, coins):
    """The walk's final probabilities on the output ports of spec, normalized over all ports."""
    state = walk_state(spec.steps, coins)
    probabilities = np.array([abs(state[x, c]) ** 2 for x, c in port_positions(spec)])
    return probabilities / probabilities.sum()


def _full_view(spec, params):
    """spec observing every port, with params holding unit coupling efficiencies on them."""
    full = spec.with_port_mask(np.ones(spec.mode_count, dtype=bool))
    out = params.copy()
    out.eta = np.ones(full.port_count)
    return full, out


def mesh_equivalence_check(steps, params, currents=None):
    """
    Runs the light-cone mesh and the independent walk model from the localized
    input and returns the largest absolute difference of their output
    distributions over all 2T ports.

    Parameters
    ----------
    steps : int
    params : Parameters
        Mesh parameters; eta is ignored.
    currents : array-like, optional
        Currents in mA, zero by default.
    """
    spec = build_qw_mesh(steps)
    full, params = _full_view(spec, params)
    currents = np.zeros(full.ps_count) if currents is None else np.asarray(currents, dtype=float)
    mesh = output_distribution(full, params, currents)
    walk = walk_distribution(full, coins_from_mesh(full, params, currents))
    return float(np.max(np.abs(mesh - walk)))


def hadamard_target_phases(spec):
    """pi/2 on the first phase shifter, zero on all the others."""
    phases = np.zeros(spec.ps_count)
    if spec.ps_count:
        phases[0] = np.pi / 2
    return phases


def hadamard_walk_currents(spec, calibrated, max_current=7.0):
    """
    Currents that set the first shifter to pi/2 and every other shifter to 0 on a
    calibrated chip, which prepares the balanced input of the Hadamard walk.
    """
    return phases_to_currents(calibrated, hadamard_target_phases(spec), max_current)


def hadamard_reference_distribution(steps):
    """The ideal chip's output over all 2T ports for the Hadamard walk preparation."""
    spec = build_qw_mesh(steps)
    spec = spec.with_port_mask(np.ones(spec.mode_count, dtype=bool))
    ideal = Parameters.ideal(spec)
    return output_distribution(spec, ideal, hadamard_walk_currents(spec, ideal))
