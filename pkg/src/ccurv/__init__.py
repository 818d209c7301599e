"""Curves of prescribed constant geodesic curvature on closed surfaces.

Submodules
----------
geometry
    Charted surfaces: metric, curvature, geodesics, injectivity radius.
curve
    Discrete curves and regions, the A^c functional and its variations.
shortening
    Birkhoff shortening, curve shortening flow, corner rounding and the
    prescribed-curvature Newton solver.
minmax
    Sweepouts, pull-tight width, cut-and-paste surgery and competitor
    sweepouts.
criteria
    Closed-form existence thresholds and the condition-region figures.
io, cli
    Serialization and the ``ccurv`` command.
"""

__version__ = "0.1.0"
