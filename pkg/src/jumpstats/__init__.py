"""Photon-counting statistics of quantum-jump unravelings.

A driven two-level emitter decaying into a monitored channel admits a
family of unravelings whose jump operator is offset by a c-number: the
unconditional master equation is unchanged while the click statistics is
not.  This package computes that statistics two ways, which cross-check
each other: spectrally, from the count-tilted generator of the master
equation (scaled cumulant generating function, activity, Mandel Q), and
stochastically, by Monte Carlo quantum-jump trajectories.
"""

from .fcs import (
    CountDistribution,
    CountingStatistics,
    SweepPoint,
    activity_mandel,
    counting_resolved_pk,
    finite_time_mgf,
    scgf,
    scgf_derivatives,
    sweep,
)
from .linalg import EigenDecomposition, eig, eigvals, expm, kron, leading_eigenpair
from .liouville import (
    GeneratorMatrix,
    devectorize,
    excited_state,
    ground_state,
    jump_superoperator_matrix,
    lindblad_generator,
    tilted_generator,
    vectorize,
)
from .model import (
    AtomParams,
    Unraveling,
    gauge_shift,
    shifted_unraveling,
    standard_unraveling,
    waveguide_unraveling,
)
from .trajectories import (
    BiasedStatistics,
    CountHistogram,
    EnsembleStatistics,
    TrajectoryRecord,
    average_conditional_density,
    biased_statistics,
    default_time_step,
    ensemble_statistics,
    simulate_trajectory,
    trajectory_seeds,
    write_histogram_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AtomParams",
    "Unraveling",
    "standard_unraveling",
    "shifted_unraveling",
    "waveguide_unraveling",
    "gauge_shift",
    "vectorize",
    "devectorize",
    "ground_state",
    "excited_state",
    "GeneratorMatrix",
    "lindblad_generator",
    "tilted_generator",
    "jump_superoperator_matrix",
    "CountingStatistics",
    "CountDistribution",
    "SweepPoint",
    "scgf",
    "scgf_derivatives",
    "activity_mandel",
    "sweep",
    "finite_time_mgf",
    "counting_resolved_pk",
    "EigenDecomposition",
    "kron",
    "expm",
    "eig",
    "eigvals",
    "leading_eigenpair",
    "TrajectoryRecord",
    "CountHistogram",
    "EnsembleStatistics",
    "BiasedStatistics",
    "default_time_step",
    "trajectory_seeds",
    "simulate_trajectory",
    "ensemble_statistics",
    "average_conditional_density",
    "biased_statistics",
    "write_histogram_csv",
    "__version__",
]
