"""pic_calibration package: preferences
Modules:
    preferences - the configuration root class
"""
from .preferences import DefaultPreferences, Preferences, require_positive
