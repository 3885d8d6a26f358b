"""Generalized NLS solitons in slowly varying potentials."""

import json

from ._core import (
    Config,
    ConfigError,
    Grid,
    Nonlinearity,
    NlsdynError,
    Potential,
    Profile,
    ProfileFamily,
    SolitonParams,
    certify,
    decompose,
    fit_loglog,
    mass_curve,
    newton_flow,
    solve_profile,
    synthesize,
)
from . import _core

__all__ = [
    "Config",
    "ConfigError",
    "Grid",
    "Nonlinearity",
    "NlsdynError",
    "Potential",
    "Profile",
    "ProfileFamily",
    "SolitonParams",
    "certify",
    "decompose",
    "fit_loglog",
    "mass_curve",
    "newton_flow",
    "run_experiment",
    "solve_profile",
    "sweep_orders",
    "synthesize",
]


def run_experiment(config, write_outputs=True, certify=True):
    """Run the full pipeline for a Config and return the summary as a dict."""
    return json.loads(_core.run_experiment_json(config, write_outputs, certify))


def sweep_orders(base, parameter, values, observables, workers=0, certify=True):
    """Order study over eps_V, eps_0 or dt; returns the sweep report as a dict."""
    return json.loads(
        _core.sweep_orders_json(base, parameter, list(values), list(observables), workers, certify)
    )
