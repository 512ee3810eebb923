"""Spectral toolkit for the transverse-field random energy model.

H = Gamma*T + U on the N-dimensional Hamming cube: exact and extremal
spectra, ball Green functions, deep-hole geometry, partition functions,
disorder ensembles, and the closed-form predictions they are checked
against.
"""

__version__ = "0.1.0"

from .disorder import DisorderField, sample_rem, truncate, large_deviation_set, rescale
from .hypercube import Configuration, apply_T, hadamard_transform, t_spectrum
from .operators import OperatorSpec, qrem_spec
from .eigensolve import dense_spectrum, lanczos_extremal
from .predictions import BETA_C

__all__ = [
    "BETA_C",
    "Configuration",
    "DisorderField",
    "OperatorSpec",
    "apply_T",
    "dense_spectrum",
    "hadamard_transform",
    "lanczos_extremal",
    "large_deviation_set",
    "qrem_spec",
    "rescale",
    "sample_rem",
    "t_spectrum",
    "truncate",
    "__version__",
]
