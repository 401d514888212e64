"""pilotwave: a numerical laboratory for relaxation to quantum equilibrium.

One-dimensional de Broglie-Bohm trajectories through a square-well beam
splitter, the Bernoulli/contraction interval maps they reduce to, and the
Perron-Frobenius / entropy machinery describing ensemble relaxation.
"""

__version__ = "0.1.0"

from .errors import (BoundaryContamination, ConfigError, DegenerateWavenumber,
                     EvanescentRegime, GridTooCoarse, MonotonicityViolation,
                     NodeSingularity, NonPositiveDensity, NonUnitaryAmplitudes,
                     NotNormalized, OrderViolation, OutOfSupport, PilotwaveError,
                     PrecisionExhausted, RoughDensity, SaturatedSeparation,
                     StepUnderflow, WrongHalfInterval)
from .wavefield import (BarrierSpec, BranchState, GridWavefunction,
                        ScatteringAmplitudes, SnapshotSeries, WavePacketSpec,
                        asymptotic_out_state, balanced_splitter_ratio,
                        evolve_schrodinger, fringe_spacing, fringe_visibility,
                        init_packet, scattering_amplitudes, side_norms)
from .trajectories import (EnsembleFates, FateGeometry, FieldSampler, Trajectory,
                           bohm_velocity, ensemble_fates, equivariance_check,
                           integrate_trajectory, sample_born, stratified_born,
                           transport)
from .maps import (BinaryWord, MapOrbit, SegmentSpec, bernoulli_step,
                   branch_history, coherent_step, iterate_map, lyapunov_estimate,
                   x_to_y, y_to_x)
from .frobenius import (SpectralDecomposition, UnitDensity, bernoulli_poly,
                        pf_apply, relaxation_distance, spectral_coefficients,
                        spectral_evolve)
from .entropy import (EntropyTrace, entropy_trace_pf, h_theorem_rate,
                      relaxation_ode_evolve, valentini_entropy)
from .scenarios import RunManifest, ScenarioConfig, run_scenario
from .acceptance import Lab, verify_all

__all__ = [name for name in dir() if not name.startswith("_")]
