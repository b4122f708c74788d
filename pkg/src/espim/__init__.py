"""Eye-strain scoring and eye-tracking analytics for target-selection sessions.

Submodules:

- ``model``       closed-form score, difficulty/movement-time fits, fixation drift
- ``session``     session-log schema (version 1), parsing, canonical serialization
- ``fixations``   dispersion-based fixation detection and event counting
- ``metrics``     per-session behavioral metrics
- ``stats``       descriptives, paired t-tests, correlations, group splits
- ``cluster``     seeded k-means and screen-region analysis
- ``report``      aggregate analysis report and CSV emission
- ``collector``   HTTP upload service persisting session logs
- ``cli``         command-line front end
"""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    AnfInterval,
    DomainError,
    EspimEstimate,
    EspimInputs,
    EspimScore,
    FittsFit,
    FqlsResult,
    ScreenSpec,
    TargetSpec,
    espim,
    espim_estimated,
    estimate_anf,
    fit_fitts,
    fitts_mt,
    fqls,
    shannon_id,
)
