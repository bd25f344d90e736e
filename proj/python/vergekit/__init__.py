"""Gaze-vergence toolkit: binocular eye simulation, depth calibration and
estimation, vergence-controlled see-through state machines, and hidden-scene
warping. The heavy lifting lives in the C++ extension module."""

from vergekit._core import *  # noqa: F401,F403

__version__ = "0.1.0"
