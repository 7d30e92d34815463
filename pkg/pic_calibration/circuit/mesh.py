"""pic_calibration module: mesh
Classes:
    Unit - one 2x2 beam splitter, optionally followed by a phase shifter, on modes (i, i + 1).
    Layer - a set of units acting on pairwise disjoint mode pairs.
    CircuitSpec - the immutable topology of a layered mesh of adjacent 2x2 units.
    MeshSection - a contiguous run of layers of a CircuitSpec sharing its mode space.
Functions:
    build_qw_mesh - builds the light-cone mesh of a T step discrete-time quantum walk.
    validate_mesh - checks every CircuitSpec invariant.
    masked_ports - the active output ports of a spec, top to bottom.
    save_mesh, load_mesh, mesh_to_text, mesh_from_text - versioned text round trip.
"""
import hashlib
import json

import numpy as np

from ..exc import InvalidArgumentError, InvalidMeshError, DataFileError

MESH_FORMAT = 'pic-mesh'
MESH_VERSION = 1

# Keeps mode indices representable in the int32 index arrays used by the forward model.
_MAX_STEPS = 2 ** 20


class Unit(object):
    """A beam splitter acting on modes (top_mode, top_mode + 1), optionally followed by a phase shifter.

    Parameters
    ----------
    top_mode : int
        The upper mode of the pair.
    bs_index : int
        Index of the beam splitter into theta and alpha.
    ps_index : int or None
        Index of the phase shifter into a, b and the currents, or None.
    """

    __slots__ = ('_top_mode', '_bs_index', '_ps_index')

    def __init__(self, top_mode, bs_index, ps_index=None):
        object.__setattr__(self, '_top_mode', int(top_mode))
        object.__setattr__(self, '_bs_index', int(bs_index))
        object.__setattr__(self, '_ps_index', None if ps_index is None else int(ps_index))

    def __setattr__(self, key, value):
        raise AttributeError("Unit is immutable")

    @property
    def top_mode(self):
        return self._top_mode

    @property
    def bs_index(self):
        return self._bs_index

    @property
    def ps_index(self):
        return self._ps_index

    @property
    def modes(self):
        return self._top_mode, self._top_mode + 1

    def __eq__(self, other):
        return isinstance(other, Unit) and self.as_tuple() == other.as_tuple()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.as_tuple())

    def __repr__(self):
        return 'Unit(top_mode={}, bs_index={}, ps_index={})'.format(*self.as_tuple())

    def as_tuple(self):
        return self._top_mode, self._bs_index, self._ps_index


class Layer(object):
    """An ordered set of units. The index arrays used by the forward model are built once here."""

    def __init__(self, units):
        self._units = tuple(units)
        self.tops = np.array([u.top_mode for u in self._units], dtype=int)
        self.bs_indices = np.array([u.bs_index for u in self._units], dtype=int)
        self.has_ps = np.array([u.ps_index is not None for u in self._units], dtype=bool)
        self.ps_indices = np.array([u.ps_index for u in self._units if u.ps_index is not None], dtype=int)
        for arr in (self.tops, self.bs_indices, self.has_ps, self.ps_indices):
            arr.setflags(write=False)

    @property
    def units(self):
        return self._units

    def __len__(self):
        return len(self._units)

    def __iter__(self):
        return iter(self._units)

    def __getitem__(self, item):
        return self._units[item]

    def __eq__(self, other):
        return isinstance(other, Layer) and self._units == other._units

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return 'Layer({!r})'.format(list(self._units))


class CircuitSpec(object):
    """
    The topology of a layered mesh of 2x2 units on adjacent modes. Instances are
    immutable and safe to share between threads.

    Parameters
    ----------
    steps : int
        Circuit depth T.
    layers : sequence of Layer or sequence of sequence of Unit
        Layers in the order light passes through them.
    input_mode : int
        Mode index of the injected localized state.
    port_mask : sequence of bool
        True for observed output ports, one entry per mode.
    mode_count : int, optional
        Number of modes, 2T when omitted.
    ps_count, bs_count : int, optional
        Declared component counts, taken from the layers when omitted.
    """

    def __init__(self, steps, layers, input_mode, port_mask, mode_count=None, ps_count=None, bs_count=None):
        self._steps = int(steps)
        self._mode_count = 2 * self._steps if mode_count is None else int(mode_count)
        self._layers = tuple(layer if isinstance(layer, Layer) else Layer(layer) for layer in layers)
        self._input_mode = int(input_mode)
        mask = np.array(port_mask, dtype=bool).ravel()
        mask.setflags(write=False)
        self._port_mask = mask
        units = [u for layer in self._layers for u in layer]
        self._bs_count = len(units) if bs_count is None else int(bs_count)
        self._ps_count = sum(u.ps_index is not None for u in units) if ps_count is None else int(ps_count)
        ports = np.flatnonzero(mask)
        ports.setflags(write=False)
        self._ports = ports

    @property
    def steps(self):
        return self._steps

    @property
    def mode_count(self):
        return self._mode_count

    @property
    def layers(self):
        return self._layers

    @property
    def input_mode(self):
        return self._input_mode

    @property
    def port_mask(self):
        return self._port_mask

    @property
    def ps_count(self):
        return self._ps_count

    @property
    def bs_count(self):
        return self._bs_count

    @property
    def ports(self):
        """Active output ports as an index array."""
        return self._ports

    @property
    def port_count(self):
        return len(self._ports)

    def units(self):
        """Iterates over (layer number, unit) with layers numbered from 1."""
        for number, layer in enumerate(self._layers, start=1):
            for unit in layer:
                yield number, unit

    def with_port_mask(self, port_mask):
        """Returns a copy of this spec observing the given ports."""
        return CircuitSpec(self._steps, self._layers, self._input_mode, port_mask, mode_count=self._mode_count,
                           ps_count=self._ps_count, bs_count=self._bs_count)

    def with_input_mode(self, input_mode):
        """Returns a copy of this spec injecting light into input_mode."""
        return CircuitSpec(self._steps, self._layers, input_mode, self._port_mask, mode_count=self._mode_count,
                           ps_count=self._ps_count, bs_count=self._bs_count)

    def as_dict(self):
        return {
            'steps': self._steps,
            'mode_count': self._mode_count,
            'input_mode': self._input_mode,
            'port_mask': [bool(m) for m in self._port_mask],
            'ps_count': self._ps_count,
            'bs_count': self._bs_count,
            'layers': [[list(u.as_tuple()) for u in layer] for layer in self._layers],
        }

    def fingerprint(self):
        """SHA-256 digest of the canonical text form, used to tie files to a spec."""
        return hashlib.sha256(mesh_to_text(self).encode('utf-8')).hexdigest()

    def __eq__(self, other):
        return isinstance(other, CircuitSpec) and self.as_dict() == other.as_dict()

    def __ne__(self, other):
        return not self == other

    def __hash__(self):
        return hash(self.fingerprint())

    def __repr__(self):
        return 'CircuitSpec(steps={}, modes={}, bs={}, ps={}, ports={})'.format(
            self._steps, self._mode_count, self._bs_count, self._ps_count, self.port_count)


class MeshSection(object):
    """
    Layers first_layer..last_layer (1-indexed, inclusive) of a CircuitSpec. A
    section shares the mode space and the global component indices of its spec,
    so the forward model runs on it with the full Parameters object.
    """

    def __init__(self, spec, first_layer, last_layer):
        if not 1 <= first_layer <= last_layer <= len(spec.layers):
            raise InvalidArgumentError("invalid layer range {}..{}".format(first_layer, last_layer))
        self._spec = spec
        self._first = int(first_layer)
        self._last = int(last_layer)
        self._layers = spec.layers[first_layer - 1:last_layer]

    @property
    def spec(self):
        return self._spec

    @property
    def layers(self):
        return self._layers

    @property
    def mode_count(self):
        return self._spec.mode_count

    @property
    def first_layer(self):
        return self._first

    @property
    def last_layer(self):
        return self._last

    @property
    def bs_indices(self):
        return sorted(u.bs_index for layer in self._layers for u in layer)

    @property
    def ps_indices(self):
        return sorted(u.ps_index for layer in self._layers for u in layer if u.ps_index is not None)

    @property
    def bs_count(self):
        return len(self.bs_indices)

    def reachable_modes(self, input_modes=None):
        """Modes that can carry light at the output of this section when light enters on input_modes."""
        lit = set([self._spec.input_mode] if input_modes is None else input_modes)
        for layer in self._layers:
            for unit in layer:
                if lit.intersection(unit.modes):
                    lit.update(unit.modes)
        return sorted(lit)

    def __repr__(self):
        return 'MeshSection(layers {}..{} of {!r})'.format(self._first, self._last, self._spec)


def default_port_mask(steps):
    """All ports except the two extreme modes on each side; all ports when that would leave none."""
    mask = np.ones(2 * steps, dtype=bool)
    if steps >= 3:
        mask[[0, 1, 2 * steps - 2, 2 * steps - 1]] = False
    return mask


def build_qw_mesh(steps, port_mask=None, input_mode=None):
    """
    Builds the light-cone mesh of a T step discrete-time quantum walk.

    Layer t (t = 1..T) holds t units at top modes T - t + 2k, k = 0..t-1, so the
    pairs of consecutive layers overlap by one mode and realize the shift operator.
    Beam splitters and phase shifters are numbered layer by layer, top to bottom
    within a layer; units of the last layer carry no phase shifter.

    Parameters
    ----------
    steps : int
        The circuit depth T >= 1.
    port_mask : sequence of bool, optional
        Observed ports. Defaults to excluding modes 0, 1, 2T-2 and 2T-1.
    input_mode : int, optional
        Injection mode. Defaults to T, the lower path of the layer-1 unit.

    Returns
    -------
    spec : CircuitSpec

    >>> spec = build_qw_mesh(12)
    >>> spec.bs_count, spec.ps_count, spec.mode_count
    (78, 66, 24)
    """
    try:
        steps_int = int(steps)
    except (TypeError, ValueError):
        raise InvalidArgumentError("steps must be an integer, got {!r}".format(steps))
    if steps_int != steps or steps_int < 1:
        raise InvalidArgumentError("steps must be a positive integer, got {!r}".format(steps))
    if steps_int > _MAX_STEPS:
        raise InvalidArgumentError("steps {} overflows the mode indexing".format(steps_int))
    T = steps_int
    layers = []
    bs = 0
    ps = 0
    for t in range(1, T + 1):
        units = []
        for k in range(t):
            if t < T:
                units.append(Unit(T - t + 2 * k, bs, ps))
                ps += 1
            else:
                units.append(Unit(T - t + 2 * k, bs))
            bs += 1
        layers.append(Layer(units))
    mask = default_port_mask(T) if port_mask is None else port_mask
    return CircuitSpec(T, layers, T if input_mode is None else input_mode, mask)


def validate_mesh(spec):
    """
    Checks every CircuitSpec invariant and raises InvalidMeshError naming the
    first violated one.

    The checks run in this order: mode pair range, overlapping units, layer
    sizes, phase shifter placement, duplicate indices, component counts, port
    mask and input mode.
    """
    T = spec.steps
    if T < 1:
        raise InvalidMeshError("steps must be positive")
    if spec.mode_count != 2 * T:
        raise InvalidMeshError("mode count {} is not 2T = {}".format(spec.mode_count, 2 * T))
    for number, layer in enumerate(spec.layers, start=1):
        used = set()
        for unit in layer:
            if unit.top_mode < 0 or unit.top_mode + 1 >= spec.mode_count:
                raise InvalidMeshError("unit {!r} in layer {} is outside the mode range".format(unit, number))
            if used.intersection(unit.modes):
                raise InvalidMeshError("overlapping units in layer {}".format(number))
            used.update(unit.modes)
    if len(spec.layers) != T:
        raise InvalidMeshError("layer count {} does not match T = {}".format(len(spec.layers), T))
    for number, layer in enumerate(spec.layers, start=1):
        if len(layer) != number:
            raise InvalidMeshError("layer {} holds {} units instead of {}".format(number, len(layer), number))
        if number == T and any(u.ps_index is not None for u in layer):
            raise InvalidMeshError("units of the final layer must not carry a phase shifter")
    bs_indices = [u.bs_index for _, u in spec.units()]
    ps_indices = [u.ps_index for _, u in spec.units() if u.ps_index is not None]
    if len(set(bs_indices)) != len(bs_indices) or len(set(ps_indices)) != len(ps_indices):
        raise InvalidMeshError("duplicate indices")
    expected_bs = T * (T + 1) // 2
    if spec.bs_count != expected_bs or spec.ps_count != spec.bs_count - T:
        raise InvalidMeshError("count mismatch: bs_count={}, ps_count={}, expected {} and {}".format(
            spec.bs_count, spec.ps_count, expected_bs, expected_bs - T))
    if sorted(bs_indices) != list(range(spec.bs_count)) or sorted(ps_indices) != list(range(spec.ps_count)):
        raise InvalidMeshError("count mismatch: component indices are not contiguous")
    if len(spec.port_mask) != spec.mode_count:
        raise InvalidMeshError("port mask has {} entries for {} modes".format(len(spec.port_mask), spec.mode_count))
    if not 0 <= spec.input_mode < spec.mode_count:
        raise InvalidMeshError("input mode {} is outside the mode range".format(spec.input_mode))


def masked_ports(spec):
    """
    The active output port indices in top to bottom order.

    >>> masked_ports(build_qw_mesh(1))
    [0, 1]
    """
    return [int(p) for p in spec.ports]


def mesh_to_text(spec):
    """Serializes spec to the versioned canonical JSON text."""
    payload = {'format': MESH_FORMAT, 'version': MESH_VERSION}
    payload.update(spec.as_dict())
    return json.dumps(payload, sort_keys=True, separators=(',', ':'))


def mesh_from_dict(payload):
    """Builds a CircuitSpec from the dict form written by mesh_to_text."""
    if payload.get('format') != MESH_FORMAT:
        raise DataFileError("not a mesh document: format={!r}".format(payload.get('format')))
    if payload.get('version') != MESH_VERSION:
        raise DataFileError("unsupported mesh version {!r}".format(payload.get('version')))
    try:
        layers = [[Unit(*u) for u in layer] for layer in payload['layers']]
        return CircuitSpec(payload['steps'], layers, payload['input_mode'], payload['port_mask'],
                           mode_count=payload['mode_count'], ps_count=payload['ps_count'],
                           bs_count=payload['bs_count'])
    except (KeyError, TypeError, ValueError) as err:
        raise DataFileError("malformed mesh document: {}".format(err))


def mesh_from_text(text):
    try:
        payload = json.loads(text)
    except ValueError as err:
        raise DataFileError("mesh text is not valid JSON: {}".format(err))
    return mesh_from_dict(payload)


def save_mesh(spec, path):
    with open(path, 'w') as handle:
        handle.write(mesh_to_text(spec))
        handle.write('\n')


def load_mesh(path):
    with open(path) as handle:
        return mesh_from_text(handle.read())
