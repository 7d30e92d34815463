"""pic_calibration module: preferences
Classes:
    DefaultPreferences - metaclass that protects the class level defaults.
    Preferences - root class of every configuration object in the package.
"""
import copy

import six

from ..exc import ConfigError


class DefaultPreferences(type):
    """The type for Default Preferences that cannot be modified"""

    def __setattr__(cls, key, value):
        if key == "_defaults":
            raise AttributeError("Cannot override defaults")
        else:
            return type.__setattr__(cls, key, value)

    def __delattr__(cls, item):
        if item == "_defaults":
            raise AttributeError("Cannot delete defaults")
        else:
            return type.__delattr__(cls, item)


@six.add_metaclass(DefaultPreferences)
class Preferences(object):
    """The base Preferences class.

    Subclasses declare their settings in the class level ``_defaults`` dict. An
    instance holds a private copy of the defaults updated with the keyword
    arguments passed to the constructor. Unknown keys raise a ConfigError.
    """

    _name = "Preferences"
    _defaults = {}

    def __init__(self, **kwargs):
        unknown = sorted(set(kwargs) - set(self._defaults))
        if unknown:
            raise ConfigError("unknown {} setting(s): {}".format(self._name, ', '.join(unknown)))
        values = copy.deepcopy(self._defaults)
        values.update({key: value for key, value in kwargs.items() if value is not None})
        object.__setattr__(self, '_values', values)
        self._validate()

    def __getattr__(self, item):
        values = self.__dict__.get('_values', {})
        if item in values:
            return values[item]
        raise AttributeError(item)

    def __setattr__(self, key, value):
        raise AttributeError("{} is read-only; use replace() instead".format(self._name))

    def __eq__(self, other):
        return type(self) is type(other) and self._values == other._values

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '{}({})'.format(type(self).__name__,
                               ', '.join('{}={!r}'.format(k, v) for k, v in sorted(self._values.items())))

    def _validate(self):
        """Override this method to check the values of a subclass."""
        pass

    def replace(self, **kwargs):
        """Returns a copy of this object with the given settings changed."""
        values = dict(self._values)
        values.update(kwargs)
        return type(self)(**values)

    def as_dict(self):
        """The settings as a plain dict, used for config echoes."""
        return copy.deepcopy(self._values)

    @classmethod
    def defaults(cls):
        return copy.deepcopy(cls._defaults)


def require_positive(prefs, *keys):
    """Raises a ConfigError unless every named setting of prefs is > 0."""
    for key in keys:
        if not getattr(prefs, key) > 0:
            raise ConfigError("{} must be positive, got {!r}".format(key, getattr(prefs, key)))
