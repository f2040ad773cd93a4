//! Steady-state simulation of a two-quantum-well hybrid optomechanical
//! cavity under two-tone driving.
//!
//! The pipeline runs from physical parameters ([`model`]) through the
//! linearized quadrature dynamics ([`dynamics`]) to the stationary
//! covariance ([`steadystate`]) and the minimized mechanical quadrature
//! variance ([`squeezing`]). [`sweep`] scans it over parameter grids.

pub mod dynamics;
pub mod error;
pub mod model;
pub mod squeezing;
pub mod steadystate;
pub mod sweep;

pub use dynamics::{
    build_diffusion, build_drift, check_stability, LinearSystem, Matrix8, Mode, Stability,
    StabilityVerdict,
};
pub use error::{Error, Result};
pub use model::{
    drive_amplitude, steady_amplitudes, thermal_occupation, DriveTone, EffectiveCouplings,
    ExcitonParams, Sideband, SteadyAmplitudes, SystemParams, ToneDetuning, ToneDetunings,
};
pub use squeezing::{
    minimize_variance, quadrature_variance, to_decibel, MechanicalBlock, SqueezingResult,
};
pub use steadystate::{
    integrate_to_steady_state, solve_lyapunov, CovarianceMatrix, LyapunovSolution, OdeOptions,
};
pub use sweep::{
    evaluate_point, figure_spec, reproduce_figure, run_sweep, run_sweep_with, Axis,
    CaptionCoupling, Execution, FigureId, Grid, OperatingPoint, PointOutcome, PointRecord,
    SweepParameter, SweepResult, SweepSpec,
};
