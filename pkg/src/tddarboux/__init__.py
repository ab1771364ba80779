"""Time-dependent Darboux transformations for nonstationary quantum models.

A numpy/scipy library that builds the closed-form catalog of exactly
solvable time-dependent potentials (oscillator with time-varying
frequency, its erf and Airy relatives, and the singular oscillator),
applies first- and second-order Darboux transforms, realizes the
associated supercharge algebra, and certifies every identity numerically
(residual gates, Crank-Nicolson propagation, independent cross-checks).
"""

from . import errors, fields, models, specfun, trajectory  # noqa: F401

__version__ = "0.1.0"
