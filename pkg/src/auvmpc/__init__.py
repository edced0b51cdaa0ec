"""Energy-optimal point-to-point motion control for a small AUV."""

__version__ = "0.1.0"

from .params import VehicleParams, load_params
from .scenario import Scenario, scenario_from_file
from .harness import run_scenario

__all__ = ["VehicleParams", "load_params", "Scenario", "scenario_from_file",
           "run_scenario", "__version__"]
