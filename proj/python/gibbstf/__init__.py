"""Python front end to the gibbstf C++ library.

Models and test functions are described with the same dictionaries as the
experiment JSON files, e.g. ``{"type": "strauss", "R": 0.05}`` and
``[{"type": "strauss_indicator", "k": 1}, {"type": "count", "r": 0.05}]``.
"""

import json

import numpy as np

from ._gibbstf import (
    CollarMissing,
    ConfigError,
    DegenerateCounts,
    ModelMismatch,
    SingularE,
    TooFewBlocks,
    theta_from_beta_gamma,
)
from . import _gibbstf

__all__ = [
    "CollarMissing",
    "ConfigError",
    "DegenerateCounts",
    "ModelMismatch",
    "SingularE",
    "TooFewBlocks",
    "covariance",
    "estimate",
    "read_pattern",
    "sample_poisson",
    "simulate",
    "theta_from_beta_gamma",
    "write_pattern",
]


def _theta(theta=None, beta=None, gamma=None):
    if theta is not None:
        return np.asarray(theta, dtype=float)
    if beta is None:
        raise ValueError("give theta or beta (and gamma)")
    if gamma is None:
        return np.array([-np.log(beta)])
    return np.asarray(theta_from_beta_gamma(beta, gamma), dtype=float)


def sample_poisson(intensity, lower, upper, seed=0):
    return _gibbstf.sample_poisson(intensity, list(lower), list(upper), seed)


def simulate(model, lower, upper, theta=None, beta=None, gamma=None, seed=0, burn_in=10000,
             steps_per_point=200.0, max_points=None):
    """Birth-death Metropolis-Hastings sample on the box [lower, upper]; returns an (n, d) array."""
    return _gibbstf.simulate(json.dumps(model), _theta(theta, beta, gamma), list(lower), list(upper), seed,
                             burn_in, steps_per_point, max_points)


def estimate(points, lower, upper, model, method="tf", h=None, window=None, erode=None, spacing=0.0):
    """Fit on the carrier [lower, upper] eroded by `erode` (default: the model range),
    or on `window=(lower, upper)` when given. Returns the report as a dict."""
    wl, wu = (list(window[0]), list(window[1])) if window is not None else (None, None)
    text = _gibbstf.estimate(np.asarray(points, dtype=float), list(lower), list(upper), json.dumps(model), method,
                             json.dumps(h) if h is not None else "", wl, wu, erode, spacing)
    return json.loads(text)


def covariance(points, lower, upper, model, theta, method="explicit", h=None, erode=None, D_block=None, spacing=0.0):
    text = _gibbstf.covariance(np.asarray(points, dtype=float), list(lower), list(upper), json.dumps(model),
                               np.asarray(theta, dtype=float), method, json.dumps(h) if h is not None else "",
                               erode, D_block, spacing)
    return json.loads(text)


def read_pattern(path, window_path=""):
    """Returns (points, lower, upper)."""
    return _gibbstf.read_pattern(str(path), str(window_path))


def write_pattern(points, lower, upper, path):
    _gibbstf.write_pattern(np.asarray(points, dtype=float), list(lower), list(upper), str(path))
