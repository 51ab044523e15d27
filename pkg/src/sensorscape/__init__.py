"""Sensor-placement sweeps for a two-sensor light-seeking robot."""
from .dynamics import (CANONICAL_LAYOUT, ControllerWeights, RobotState, SensorLayout,
                       SimConfig, SimOutcome, derivatives, integrate, integrate_saturated,
                       rotation_matrix, sensor_value, sensor_world_position, simulate)
from .environments import (BEARINGS, DesignGrid, Environment, WeightGrid, make_design_grid,
                           make_environments, make_weight_grid, mirror_design)
from .errors import (ChecksumMismatch, DimensionMismatch, InvalidRadius, MissingMatrixDump,
                     NumericalDivergence)
from .metrics import (DesignRecord, MetricPair, cf_resistance, count_values, learnability,
                      overlap, rank_designs)
from .sweep import DesignResult, SweepManifest, evaluate_controller, evaluate_design, run_sweep

__version__ = "0.1.0"
