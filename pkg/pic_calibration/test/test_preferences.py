import unittest

from ..analysis import ScheduleConfig, TomographyConfig, TrainConfig
from ..data import TargetConfig
from ..exc import ConfigError
from ..preferences import Preferences, require_positive


class CoolingConfig(Preferences):

    _name = 'CoolingConfig'
    _defaults = {'rate': 2.0, 'ports': [0, 1]}

    def _validate(self):
        require_positive(self, 'rate')


class TestPreferences(unittest.TestCase):

    def test_100_defaults(self):
        """Unset keys take the class defaults"""
        config = CoolingConfig()
        self.assertEqual(config.rate, 2.0)
        self.assertEqual(config.ports, [0, 1])

    def test_101_override(self):
        """Keyword arguments override defaults and None keeps the default"""
        self.assertEqual(CoolingConfig(rate=3.0).rate, 3.0)
        self.assertEqual(CoolingConfig(rate=None).rate, 2.0)

    def test_102_unknown_key(self):
        """Unknown settings are refused"""
        with self.assertRaises(ConfigError) as ctx:
            CoolingConfig(speed=1)
        self.assertIn('speed', str(ctx.exception))

    def test_103_validation(self):
        """_validate runs on construction"""
        self.assertRaises(ConfigError, CoolingConfig, rate=0)

    def test_104_read_only(self):
        """Instances and class defaults cannot be changed"""
        config = CoolingConfig()
        with self.assertRaises(AttributeError):
            config.rate = 5.0
        with self.assertRaises(AttributeError):
            CoolingConfig._defaults = {}
        with self.assertRaises(AttributeError):
            del CoolingConfig._defaults

    def test_105_private_copies(self):
        """Mutable defaults are copied per instance"""
        first = CoolingConfig()
        first.ports.append(5)
        self.assertEqual(CoolingConfig().ports, [0, 1])
        self.assertEqual(CoolingConfig.defaults()['ports'], [0, 1])

    def test_106_replace_and_echo(self):
        """replace makes a validated copy and as_dict echoes every setting"""
        config = CoolingConfig().replace(rate=4.0)
        self.assertEqual(config, CoolingConfig(rate=4.0))
        self.assertNotEqual(config, CoolingConfig())
        self.assertEqual(config.as_dict(), {'rate': 4.0, 'ports': [0, 1]})
        self.assertRaises(ConfigError, CoolingConfig().replace, rate=-1.0)

    def test_107_package_configs(self):
        """Every configuration class of the package builds from its defaults"""
        for cls in (TrainConfig, ScheduleConfig, TomographyConfig, TargetConfig):
            config = cls()
            self.assertEqual(cls(**cls.defaults()), config)
        self.assertEqual(len(ScheduleConfig().as_dict()['phases']), 18)


if __name__ == '__main__':
    unittest.main()
