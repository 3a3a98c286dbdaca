"""Python front end for the slfv core library."""

import json

from ._slfv import ParamError, wm_curve
from . import _slfv

__all__ = ["ParamError", "run", "derive", "config_hash", "wm_curve"]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def run(command, config, seed=None, threads=1):
    """Run a CLI command in-process; returns {file name: content}."""
    return dict(_slfv.run(command, _text(config), seed, threads))


def derive(regime):
    return json.loads(_slfv.derive(_text(regime)))


def config_hash(config):
    return _slfv.config_hash(_text(config))
