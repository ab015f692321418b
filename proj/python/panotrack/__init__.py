"""Person tracking on a 360 degree equirectangular camera."""

import json

from ._core import (
    CameraModel,
    ConfigError,
    DomainError,
    InputError,
    PanotrackError,
    image_to_polar,
    localization_sensitivity,
    localize,
    solve_assignment,
    world_to_image,
    wrap_distance,
)
from . import _core

__all__ = [
    "CameraModel",
    "ConfigError",
    "DomainError",
    "InputError",
    "PanotrackError",
    "image_to_polar",
    "localization_sensitivity",
    "localize",
    "run",
    "solve_assignment",
    "world_to_image",
    "wrap_distance",
]


def run(scenario, config=None):
    """Simulate, track and evaluate a scenario.

    `scenario` and `config` use the same layout as the JSON files read by the
    command-line tool. Returns {"report": ..., "tracks": [...]}.
    """
    text = _core._run_json(json.dumps(scenario), json.dumps(config) if config else "")
    return json.loads(text)
