import os
import shutil
import tempfile
import unittest
import warnings

import numpy as np

from ..circuit import Parameters

SLOW = bool(os.environ.get('PIC_CALIBRATION_SLOW'))


def random_params(spec, rng, a=0.12, spread=0.1):
    """Parameters near the ideal chip with random offsets and losses."""
    return Parameters(np.full(spec.ps_count, a) * rng.uniform(0.9, 1.1, spec.ps_count),
                      rng.uniform(-np.pi, np.pi, spec.ps_count),
                      np.pi / 4 + rng.uniform(-spread, spread, spec.bs_count),
                      rng.uniform(1 - spread, 1.0, spec.bs_count),
                      rng.uniform(1 - spread, 1 + spread, spec.port_count))


class MeshTestCase(unittest.TestCase):
    """A TestCase with a fixed seed, a scratch directory and warning assertions."""

    _seed = 987654321

    def setUp(self):
        self.rng = np.random.default_rng(self._seed)
        self._tmp = None

    def tearDown(self):
        if self._tmp is not None:
            shutil.rmtree(self._tmp, ignore_errors=True)

    @property
    def save_path(self):
        """A scratch directory removed after the test."""
        if self._tmp is None:
            self._tmp = tempfile.mkdtemp(prefix='pic_calibration_')
        return self._tmp

    def path(self, name):
        return os.path.join(self.save_path, name)

    def assertWarnsCategory(self, expected_warning, callable_obj, *args, **kwargs):
        """Calls callable_obj, asserts that it warned with expected_warning and returns its result."""
        with warnings.catch_warnings(record=True) as warning_list:
            warnings.simplefilter('always')
            out = callable_obj(*args, **kwargs)
        self.assertTrue(any(issubclass(w.category, expected_warning) for w in warning_list),
                        "{} was not issued".format(expected_warning.__name__))
        return out

    def assertNotWarnsCategory(self, expected_warning, callable_obj, *args, **kwargs):
        with warnings.catch_warnings(record=True) as warning_list:
            warnings.simplefilter('always')
            out = callable_obj(*args, **kwargs)
        self.assertFalse(any(issubclass(w.category, expected_warning) for w in warning_list))
        return out
