"""Lattice approximation of symmetric alpha-stable random measures.

Discretize an integrand on a lattice of spacing h, weight i.i.d. noise by the
normalized cell coefficients, and sum: the result approximates the stable
integral of the integrand, exactly in law for the exact scheme with stable
noise. Fractional kernels turn this into linear fractional stable motion.
"""

__version__ = "0.1.0"

from ._rng import SeedSpec, configure_threads  # noqa: E402
from .errors import ConfigError, NumericalError, StableLatError, UnsupportedInputError  # noqa: E402
from .function_model import (  # noqa: E402
    FractionalIntegral, FunctionSpec, GaussBump, IndicatorBox, KernelConvolution, LfsmKernel,
    LinearCombination, PowerTail, Scale, Shift, evaluate, from_dict, load_spec, lp_norm,
    tail_window, zero_spec)
from .lattice import CellCoefficients, discretize, discretize_exact, norms, piecewise_error  # noqa: E402
from .lfsm import LfsmParams, beta_of, discretize_lfsm, sample_lfsm_integral, sample_lfsm_path  # noqa: E402
from .measure_sim import SampleBatch, sample_fdd, sample_filtered, sample_integral  # noqa: E402
from .stable_core import (  # noqa: E402
    ExactSaS, StableParams, SymmetricPareto, c_alpha, sample_noise, sample_sas, stable_cf)
from .stats_validate import (  # noqa: E402
    convergence_study, empirical_cf, ks_two_sample, lalpha_membership, lf_conditions)
