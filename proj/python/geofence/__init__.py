"""Python bindings for the geofencing simulator.

Configs are plain dicts with the same keys as the CLI's JSON config files.
"""

import csv
import io
import json

from . import _core
from ._core import ConfigError, grid_placement, object_error, reward, sensing_power

__all__ = [
    "ConfigError",
    "expand_config",
    "energy_table",
    "grid_placement",
    "nmin",
    "object_error",
    "reward",
    "run_one",
    "sensing_power",
    "sweep",
]


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def expand_config(config):
    return json.loads(_core.expand_config(json.dumps(config)))


def run_one(config):
    """Metrics of one run as a dict."""
    return json.loads(_core.run_one(json.dumps(config)))


def sweep(config):
    """Sweep rows as a list of dicts of strings (same columns as sweep.csv)."""
    return _rows(_core.sweep_csv(json.dumps(config)))


def nmin(config, tau, policy="grid"):
    return _core.nmin(json.dumps(config), tau, policy)


def energy_table(config):
    return _rows(_core.energy_table_csv(json.dumps(config)))
