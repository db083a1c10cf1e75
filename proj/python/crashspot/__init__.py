"""Severity-weighted collision analysis: temporal association tests,
Getis-Ord Gi* hotspot detection, and IDW interpolation.

The heavy lifting lives in the C++ extension module; this package re-exports
its public surface.
"""

from ._core import (
    ConfigError,
    DataError,
    __version__,
    assign_period,
    chi2_sf,
    chi_square,
    classify,
    cramers_v,
    daily_mean,
    gi_star_grid,
    haversine_m,
    idw,
    severity_weight,
)

__all__ = [
    "ConfigError",
    "DataError",
    "__version__",
    "assign_period",
    "chi2_sf",
    "chi_square",
    "classify",
    "cramers_v",
    "daily_mean",
    "gi_star_grid",
    "haversine_m",
    "idw",
    "severity_weight",
]
