//! Simulation, control and estimation for the one-phase Stefan problem.
//!
//! The plant is a liquid layer `[0, s(t)]` melting into a solid held at the
//! melting point. Heat enters at `x = 0` either as a flux (Neumann) or as a
//! boundary temperature (Dirichlet); the front moves with the Stefan
//! condition `ṡ = -β T_x(s)`.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controllers;
pub mod diagnostics;
pub mod domain;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod scenario;
pub mod sim;
pub mod special;
pub mod verify;

pub use controllers::{ControlLaw, ObserverInit, Violation};
pub use diagnostics::{ConstraintFlags, DiagnosticsRecord, ExpFit, LyapunovConstants};
pub use domain::{
    derive_params, linear_initial_profile, linear_observer_init, ObserverState, PhysicalParams, PlantState,
    Perturbation, Setpoint, TemperatureProfile,
};
pub use error::{Result, StefanError};
pub use grid::{h1_norm, l2_norm};
pub use kernels::ControllerGains;
pub use scenario::{Experiment, Scenario};
pub use sim::{
    run_experiment, run_scenario, Actuation, ActuationKind, DtPolicy, Integrator, SimConfig, Trajectory,
};
