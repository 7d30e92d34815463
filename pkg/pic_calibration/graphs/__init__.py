"""pic_calibration package: graphs
Modules:
    base - the graph root class
    calibration - figures of calibration, validation and walk reports
"""

from .base import Graph
from .calibration import GraphRecovery, GraphLossHistory, GraphMetricHistogram, GraphWalk
