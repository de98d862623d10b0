"""Real-vector-space quantum dynamics with a universal rebit (ubit).

The heavy lifting lives in the compiled extension; this package re-exports
the operations most useful from python.
"""

from ._core import (
    UbitError,
    antisym_exp,
    bessel_j1,
    complex_to_real_state,
    compute_nu_spectrum,
    generate_coupling,
    hamiltonian_to_stueckelbergian,
    precession_envelope,
    precession_model,
    predict_beta,
    predict_gamma,
    real_to_complex_state,
    run_precession,
    run_relaxation,
    sincos_exponential,
)
from ._core import __version__

__all__ = [
    "UbitError",
    "antisym_exp",
    "bessel_j1",
    "complex_to_real_state",
    "compute_nu_spectrum",
    "generate_coupling",
    "hamiltonian_to_stueckelbergian",
    "precession_envelope",
    "precession_model",
    "predict_beta",
    "predict_gamma",
    "real_to_complex_state",
    "run_precession",
    "run_relaxation",
    "sincos_exponential",
    "__version__",
]
