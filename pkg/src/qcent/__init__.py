"""Entropy continuity bounds and PFE-channel numerics on finite truncations.

Submodules:

* :mod:`qcent.core` - spectral numerics and entropy functionals
* :mod:`qcent.channels` - Kraus channels, complementary states, Choi rank
* :mod:`qcent.diagnosis` - class A/B/C diagnosis of structured channel families
* :mod:`qcent.energy` - spectra, Gibbs states and energy-entropy envelopes
* :mod:`qcent.bounds` - continuity bounds and Kraus-family criteria
* :mod:`qcent.roof` - discrete convex-roof and entanglement-of-formation estimates
* :mod:`qcent.verify` - the inequality-verification harness behind ``qcent verify``
"""
from .core import (
    binary_entropy,
    extended_shannon_entropy,
    g_function,
    trace_distance,
    von_neumann_entropy,
)
from .errors import QcentError

__version__ = "0.1.0"

__all__ = [
    "QcentError",
    "binary_entropy",
    "extended_shannon_entropy",
    "g_function",
    "trace_distance",
    "von_neumann_entropy",
]
