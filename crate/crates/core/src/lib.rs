//! Radial Skyrme and Adkins-Nappi wave equations: evolution, energy and
//! virial diagnostics, the static Skyrmion and the scenario harness.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod harness;
pub mod integrator;
pub mod model;
pub mod quadrature;
pub mod state;
pub mod statics;
pub mod weight;

pub use diagnostics::{
    energy, exterior_energy, functional_rhs, functional_value, he_remainder, identity_residual_series,
    weighted_energy, FunctionalKind, IntegrabilityAccumulator, LemmaForm, VirialConfig,
};
pub use error::{Error, Result};
pub use grid::{build_grid, radial_derivative, radial_second_derivative, RadialGrid};
pub use integrator::{cfl_dt, evolve, rk4_step, IntegratorConfig, Observer, Snapshots, Stepper, Trajectory};
pub use model::{accel, f_factor, stable_g1, ModelKind, ModelParams};
pub use quadrature::{quadrature, NeumaierSum};
pub use state::{sample_initial_data, DataFamily, FieldState, InitialDataSpec, VelocityMode};
pub use statics::{shoot_skyrmion, static_residual, StaticProfile};
pub use weight::Weight;
