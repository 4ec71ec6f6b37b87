"""Python access to the rydsim core."""

import json

from ._core import *  # noqa: F401,F403
from ._core import __version__, default_config as _default_config, run_scenario_json, run_sweep_json


def default_config(name):
    return json.loads(_default_config(name))


def run_scenario(config, out=""):
    return json.loads(run_scenario_json(json.dumps(config), out))


def run_sweep(config, out=""):
    return json.loads(run_sweep_json(json.dumps(config), out))
