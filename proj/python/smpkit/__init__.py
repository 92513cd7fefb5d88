"""Strong maximum principle experiments for Schrödinger operators with measure potentials."""

import json as _json

from . import _smpkit
from ._smpkit import (
    ConfigError,
    ConvergenceError,
    DomainError,
    PreconditionError,
    SmpkitError,
    capacity_c1,
    exit_kernel_mass,
    exit_kernel_tail,
    expected_residence,
    green_ball,
    green_ball_stable,
    set_workers,
    version,
    volume_average,
    workers,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "DomainError",
    "PreconditionError",
    "SmpkitError",
    "capacity_c1",
    "catalog",
    "classify",
    "config_hash",
    "exit_kernel_mass",
    "exit_kernel_tail",
    "expected_residence",
    "fk_resolvent",
    "green_ball",
    "green_ball_stable",
    "plotdata",
    "potential",
    "run",
    "set_workers",
    "strip_timing",
    "validate",
    "version",
    "volume_average",
    "workers",
]


def _dump(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def validate(config):
    """List of (field, rule) violations; empty when the config is valid."""
    return _smpkit.validate_json(_dump(config))


def config_hash(config):
    return _smpkit.config_hash_json(_dump(config))


def run(config, workers=0, write_files=False):
    """Run an experiment config (dict or JSON string). Returns (report, exit_code)."""
    report, code = _smpkit.run_json(_dump(config), workers, write_files)
    return _json.loads(report), code


def strip_timing(report):
    return _json.loads(_smpkit.strip_timing_json(_dump(report)))


def plotdata(report, what):
    """CSV text for one data set of a report."""
    return _smpkit.plotdata_json(_dump(report), what)


def catalog():
    return _json.loads(_smpkit.catalog_json())


def potential(measure, operator, x):
    """Green potential of a measure at x; float('inf') when it diverges."""
    return _smpkit.potential_json(_dump(measure), _dump(operator), list(x))


def classify(x, measure, operator, r_max=0.5, r_min=0.05, count=4):
    return _json.loads(_smpkit.classify_json(list(x), _dump(measure), _dump(operator), r_max, r_min, count))


def fk_resolvent(x, measure, operator, n=10000, dt=1e-3, seed=0):
    """Monte Carlo estimate of the perturbed resolvent applied to 1 at x."""
    return _json.loads(_smpkit.fk_resolvent_json(list(x), _dump(measure), _dump(operator), n, dt, seed))
