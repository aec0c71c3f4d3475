//! Plant and observer integration on the immobilized grid.
//!
//! With `σ = x/s(t)` the liquid temperature obeys
//! `T_t = (α'/s²) T_σσ + σ (ṡ/s) T_σ` on the fixed unit interval, where
//! `α' = α(1+ε₁)` is the plant's actual diffusivity. Everything here works
//! on superheat `u = T - T_m` and converts back at the boundary of the API.

mod oracle;
mod run;

pub use oracle::{run_similarity_oracle, similarity_lambda, SimilaritySolution};
pub use run::{run_experiment, run_scenario, Trajectory};

use crate::domain::{ObserverState, PhysicalParams, PlantState, Perturbation, TemperatureProfile};
use crate::error::{Result, StefanError};
use crate::grid::{slope_at_end, spacing};
use crate::kernels::observer_gain_profile;
use serde::{Deserialize, Serialize};

/// Which boundary condition the actuator imposes at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActuationKind {
    /// Heat flux `-k T_x(0) = q_c`, W/m².
    Neumann,
    /// Boundary superheat `T(0) = T_m + T_c`, K.
    Dirichlet,
}

/// Actuator command for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Actuation {
    pub kind: ActuationKind,
    pub value: f64,
}

impl Actuation {
    pub fn neumann(q: f64) -> Self {
        Actuation {
            kind: ActuationKind::Neumann,
            value: q,
        }
    }

    pub fn dirichlet(t_c: f64) -> Self {
        Actuation {
            kind: ActuationKind::Dirichlet,
            value: t_c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    #[default]
    Euler,
    /// Heun's two-stage method.
    Rk2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// Fraction `θ ∈ (0, 1]` of [`cfl_max_dt`], re-evaluated every step.
    CflFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub dt_policy: DtPolicy,
    pub t_end: f64,
    pub sample_every: f64,
    pub integrator: Integrator,
    /// Stop early once `|s - s_r| < tol · s_r`.
    pub convergence_tol: Option<f64>,
}

impl SimConfig {
    pub fn new(n: usize, t_end: f64, sample_every: f64) -> Result<Self> {
        let cfg = SimConfig {
            n,
            dt_policy: DtPolicy::CflFraction(0.4),
            t_end,
            sample_every,
            integrator: Integrator::Euler,
            convergence_tol: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 8 {
            return Err(StefanError::Parameter {
                name: "n",
                value: self.n as f64,
                reason: "need at least 8 grid intervals",
            });
        }
        match self.dt_policy {
            DtPolicy::Fixed(dt) if !(dt > 0.0) || !dt.is_finite() => {
                return Err(StefanError::Parameter {
                    name: "dt",
                    value: dt,
                    reason: "fixed step must be positive",
                })
            }
            DtPolicy::CflFraction(theta) if !(theta > 0.0 && theta <= 1.0) => {
                return Err(StefanError::Parameter {
                    name: "cfl_fraction",
                    value: theta,
                    reason: "must lie in (0, 1]",
                })
            }
            _ => {}
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(StefanError::Parameter {
                name: "t_end",
                value: self.t_end,
                reason: "horizon must be positive",
            });
        }
        if !(self.sample_every > 0.0) || !self.sample_every.is_finite() {
            return Err(StefanError::Parameter {
                name: "sample_every",
                value: self.sample_every,
                reason: "sampling interval must be positive",
            });
        }
        if let Some(tol) = self.convergence_tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(StefanError::Parameter {
                    name: "convergence_tol",
                    value: tol,
                    reason: "must lie in (0, 1)",
                });
            }
        }
        Ok(())
    }
}

/// Plant coefficients actually used for integration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PlantCoefficients {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
}

impl PlantCoefficients {
    pub fn new(params: &PhysicalParams, perturbation: &Perturbation) -> Self {
        PlantCoefficients {
            alpha: perturbation.alpha(params),
            beta: perturbation.beta(params),
            k: params.k(),
        }
    }

    pub fn nominal(params: &PhysicalParams) -> Self {
        Self::new(params, &Perturbation::NONE)
    }
}

#[inline]
fn velocity(u: &[f64], s: f64, beta: f64) -> f64 {
    -beta * slope_at_end(u) / s
}

/// Interface speed `ṡ = -β(1+ε₂) T_x(s)`.
pub fn interface_velocity(
    state: &PlantState,
    params: &PhysicalParams,
    perturbation: &Perturbation,
) -> Result<f64> {
    if !(state.s > 0.0) {
        return Err(StefanError::State(format!(
            "interface position must be positive, got {}",
            state.s
        )));
    }
    Ok(velocity(&state.superheat(params), state.s, perturbation.beta(params)))
}

/// Largest stable explicit step: half the diffusion limit in physical units,
/// further capped by the advection limit `(s/n)/|ṡ|`.
pub fn cfl_max_dt(
    state: &PlantState,
    params: &PhysicalParams,
    perturbation: &Perturbation,
    n: usize,
) -> f64 {
    let sdot = velocity(&state.superheat(params), state.s, perturbation.beta(params));
    cfl_limit(state.s, sdot, perturbation.alpha(params), n)
}

pub(crate) fn cfl_limit(s: f64, sdot: f64, alpha: f64, n: usize) -> f64 {
    let dx = s / n as f64;
    let diffusion = 0.5 * dx * dx / alpha;
    if sdot != 0.0 {
        diffusion.min(dx / sdot.abs())
    } else {
        diffusion
    }
}

/// Right-hand side of the immobilized heat equation for superheat `u`.
///
/// `extra` adds a nodewise source (the observer correction); the interface
/// node stays pinned and a Dirichlet boundary node is left untouched.
#[allow(clippy::too_many_arguments)]
fn heat_rhs(
    u: &[f64],
    s: f64,
    sdot: f64,
    alpha: f64,
    k: f64,
    act: Actuation,
    extra: Option<&[f64]>,
    out: &mut [f64],
) {
    let n = u.len() - 1;
    let h = spacing(u.len());
    let diff = alpha / (s * s * h * h);
    let adv = sdot / (s * 2.0 * h);
    for i in 1..n {
        let sigma = i as f64 * h;
        out[i] = diff * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + sigma * adv * (u[i + 1] - u[i - 1]);
    }
    out[n] = 0.0;
    out[0] = match act.kind {
        // ghost node u_{-1} = u_1 + 2h s q/k from T_σ(0) = -s q/k
        ActuationKind::Neumann => 2.0 * diff * (u[1] - u[0] + h * s * act.value / k),
        ActuationKind::Dirichlet => 0.0,
    };
    if let Some(src) = extra {
        for i in 0..n {
            if i == 0 && act.kind == ActuationKind::Dirichlet {
                continue;
            }
            out[i] += src[i];
        }
    }
}

fn apply_boundary(u: &mut [f64], act: Actuation) {
    let n = u.len() - 1;
    u[n] = 0.0;
    if act.kind == ActuationKind::Dirichlet {
        u[0] = act.value;
    }
}

/// Plant state in superheat form, as carried by the run loop.
#[derive(Debug, Clone)]
pub(crate) struct PlantCore {
    pub u: Vec<f64>,
    pub s: f64,
}

/// Stage values the observer needs from the plant for one step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    /// Measured interface position `Y = s`.
    pub y: f64,
    /// Its rate `Ẏ`.
    pub y_dot: f64,
}

/// Rate of the measured interface position by backward difference, for use
/// when the plant's velocity is not available.
pub fn measured_velocity(y_prev: f64, y_now: f64, dt: f64) -> f64 {
    (y_now - y_prev) / dt
}

impl PlantCore {
    /// Advances one step; returns the measurements seen at each stage.
    pub fn advance(
        &mut self,
        act: Actuation,
        coef: &PlantCoefficients,
        dt: f64,
        integrator: Integrator,
        scratch: &mut Vec<f64>,
    ) -> Result<[Measurement; 2]> {
        let n = self.u.len() - 1;
        scratch.resize(n + 1, 0.0);
        let sdot0 = velocity(&self.u, self.s, coef.beta);
        let limit = cfl_limit(self.s, sdot0, coef.alpha, n);
        if dt > limit * (1.0 + 1e-12) {
            return Err(StefanError::Cfl { dt, limit });
        }
        heat_rhs(&self.u, self.s, sdot0, coef.alpha, coef.k, act, None, scratch);
        let first = Measurement {
            y: self.s,
            y_dot: sdot0,
        };
        let stages = match integrator {
            Integrator::Euler => {
                for (u, du) in self.u.iter_mut().zip(scratch.iter()) {
                    *u += dt * du;
                }
                self.s += dt * sdot0;
                [first, first]
            }
            Integrator::Rk2 => {
                let mut pred: Vec<f64> = self.u.iter().zip(scratch.iter()).map(|(u, du)| u + dt * du).collect();
                apply_boundary(&mut pred, act);
                let s_pred = self.s + dt * sdot0;
                if !(s_pred > 0.0) {
                    return Err(StefanError::State(format!("interface position became {s_pred}")));
                }
                let sdot1 = velocity(&pred, s_pred, coef.beta);
                let mut k2 = vec![0.0; n + 1];
                heat_rhs(&pred, s_pred, sdot1, coef.alpha, coef.k, act, None, &mut k2);
                for i in 0..=n {
                    self.u[i] += 0.5 * dt * (scratch[i] + k2[i]);
                }
                self.s += 0.5 * dt * (sdot0 + sdot1);
                [
                    first,
                    Measurement {
                        y: s_pred,
                        y_dot: sdot1,
                    },
                ]
            }
        };
        apply_boundary(&mut self.u, act);
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(StefanError::State(format!("interface position became {}", self.s)));
        }
        if let Some(i) = self.u.iter().position(|v| !v.is_finite()) {
            return Err(StefanError::State(format!("non-finite temperature at node {i}")));
        }
        Ok(stages)
    }
}

/// Observer correction `-p(x, s)(Ẏ/β + T̂_x(s))` at every node.
fn observer_source(
    u_hat: &[f64],
    meas: Measurement,
    alpha: f64,
    beta: f64,
    lambda: f64,
    dirichlet: bool,
) -> Vec<f64> {
    let n = u_hat.len() - 1;
    let innovation = meas.y_dot / beta + slope_at_end(u_hat) / meas.y;
    if lambda == 0.0 || innovation == 0.0 {
        return vec![0.0; n + 1];
    }
    let gains = observer_gain_profile(n, meas.y, lambda, alpha, dirichlet);
    gains.iter().map(|p| -p * innovation).collect()
}

/// Observer copy of the nominal plant, in superheat form.
#[derive(Debug, Clone)]
pub(crate) struct ObserverCore {
    pub u_hat: Vec<f64>,
}

impl ObserverCore {
    pub fn advance(
        &mut self,
        act: Actuation,
        stages: [Measurement; 2],
        nominal: &PlantCoefficients,
        lambda: f64,
        dt: f64,
        integrator: Integrator,
    ) -> Result<()> {
        let n = self.u_hat.len() - 1;
        let dirichlet = act.kind == ActuationKind::Dirichlet;
        let rhs = |u: &[f64], m: Measurement| {
            let src = observer_source(u, m, nominal.alpha, nominal.beta, lambda, dirichlet);
            let mut out = vec![0.0; n + 1];
            heat_rhs(u, m.y, m.y_dot, nominal.alpha, nominal.k, act, Some(&src), &mut out);
            out
        };
        let k1 = rhs(&self.u_hat, stages[0]);
        match integrator {
            Integrator::Euler => {
                for (u, du) in self.u_hat.iter_mut().zip(&k1) {
                    *u += dt * du;
                }
            }
            Integrator::Rk2 => {
                let mut pred: Vec<f64> = self.u_hat.iter().zip(&k1).map(|(u, du)| u + dt * du).collect();
                apply_boundary(&mut pred, act);
                let k2 = rhs(&pred, stages[1]);
                for i in 0..=n {
                    self.u_hat[i] += 0.5 * dt * (k1[i] + k2[i]);
                }
            }
        }
        apply_boundary(&mut self.u_hat, act);
        if let Some(i) = self.u_hat.iter().position(|v| !v.is_finite()) {
            return Err(StefanError::State(format!("non-finite estimate at node {i}")));
        }
        Ok(())
    }
}

pub(crate) fn to_profile(u: &[f64], tm: f64) -> TemperatureProfile {
    let mut values: Vec<f64> = u.iter().map(|v| tm + v).collect();
    *values.last_mut().expect("nonempty") = tm;
    TemperatureProfile::new(values).expect("finite values")
}

/// One explicit step of the (possibly perturbed) plant.
pub fn step_plant(
    state: &PlantState,
    actuation: Actuation,
    params: &PhysicalParams,
    perturbation: &Perturbation,
    dt: f64,
    integrator: Integrator,
) -> Result<PlantState> {
    if !(dt > 0.0) {
        return Err(StefanError::Parameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive",
        });
    }
    if !(state.s > 0.0) {
        return Err(StefanError::State(format!(
            "interface position must be positive, got {}",
            state.s
        )));
    }
    let coef = PlantCoefficients::new(params, perturbation);
    let mut core = PlantCore {
        u: state.superheat(params),
        s: state.s,
    };
    let mut scratch = Vec::new();
    core.advance(actuation, &coef, dt, integrator, &mut scratch)?;
    Ok(PlantState {
        s: core.s,
        profile: to_profile(&core.u, params.tm()),
        t: state.t + dt,
    })
}

/// Measurements for one observer step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverInput {
    pub actuation: Actuation,
    /// Plant measurement at the start of the step.
    pub start: Measurement,
    /// Measurement at the predictor stage; used only by RK2.
    pub stage: Option<Measurement>,
}

/// One step of the state estimator driven by the measured interface.
pub fn step_observer(
    obs: &ObserverState,
    input: &ObserverInput,
    params: &PhysicalParams,
    lambda: f64,
    dt: f64,
    integrator: Integrator,
) -> Result<ObserverState> {
    if !(dt > 0.0) {
        return Err(StefanError::Parameter {
            name: "dt",
            value: dt,
            reason: "time step must be positive",
        });
    }
    let nominal = PlantCoefficients::nominal(params);
    let n = obs.profile_hat.n();
    let limit = cfl_limit(input.start.y, input.start.y_dot, nominal.alpha, n);
    if dt > limit * (1.0 + 1e-12) {
        return Err(StefanError::Cfl { dt, limit });
    }
    let mut core = ObserverCore {
        u_hat: obs.superheat(params),
    };
    let stages = [input.start, input.stage.unwrap_or(input.start)];
    core.advance(input.actuation, stages, &nominal, lambda, dt, integrator)?;
    Ok(ObserverState {
        profile_hat: to_profile(&core.u_hat, params.tm()),
        t: obs.t + dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{linear_initial_profile, linear_observer_init};

    fn zinc() -> PhysicalParams {
        PhysicalParams::zinc()
    }

    #[test]
    fn velocity_of_linear_profile() {
        let p = zinc();
        let st = linear_initial_profile(1e4, 0.01, p.tm(), 50).unwrap();
        let v = interface_velocity(&st, &p, &Perturbation::NONE).unwrap();
        assert!((v - p.beta() * 1e4).abs() < 1e-12 * v);
        assert!((v - 1.577e-3).abs() < 1e-6);
        let pert = Perturbation::new(0.0, -0.2).unwrap();
        let vp = interface_velocity(&st, &p, &pert).unwrap();
        assert!((vp - 0.8 * v).abs() < 1e-15);
        let flat = linear_initial_profile(0.0, 0.01, p.tm(), 50).unwrap();
        assert_eq!(interface_velocity(&flat, &p, &Perturbation::NONE).unwrap(), 0.0);
    }

    #[test]
    fn cfl_values() {
        let p = zinc();
        let st = linear_initial_profile(0.0, 0.01, p.tm(), 100).unwrap();
        let dt = cfl_max_dt(&st, &p, &Perturbation::NONE, 100);
        assert!((dt - 1.1032e-4).abs() < 1e-7, "{dt}");
        let wide = PlantState { s: 0.02, ..st.clone() };
        assert!((cfl_max_dt(&wide, &p, &Perturbation::NONE, 100) / dt - 4.0).abs() < 1e-12);
        let pert = Perturbation::new(0.3, 0.0).unwrap();
        assert!((cfl_max_dt(&st, &p, &pert, 100) * 1.3 - dt).abs() < 1e-18);
    }

    #[test]
    fn zero_state_is_a_fixed_point() {
        let p = zinc();
        let st = linear_initial_profile(0.0, 0.05, p.tm(), 20).unwrap();
        let dt = cfl_max_dt(&st, &p, &Perturbation::NONE, 20) * 0.4;
        for integ in [Integrator::Euler, Integrator::Rk2] {
            let next = step_plant(&st, Actuation::neumann(0.0), &p, &Perturbation::NONE, dt, integ).unwrap();
            assert_eq!(next.s, st.s);
            assert_eq!(next.profile, st.profile);
        }
    }

    #[test]
    fn small_step_moves_interface_by_velocity() {
        let p = zinc();
        let st = linear_initial_profile(1e4, 0.01, p.tm(), 40).unwrap();
        let v = interface_velocity(&st, &p, &Perturbation::NONE).unwrap();
        let dt = 1e-7;
        let next = step_plant(&st, Actuation::neumann(1e5), &p, &Perturbation::NONE, dt, Integrator::Rk2).unwrap();
        assert!(((next.s - st.s) - v * dt).abs() < 1e-3 * v * dt);
    }

    #[test]
    fn oversized_step_is_rejected() {
        let p = zinc();
        let st = linear_initial_profile(1e4, 0.01, p.tm(), 40).unwrap();
        let limit = cfl_max_dt(&st, &p, &Perturbation::NONE, 40);
        let err = step_plant(&st, Actuation::neumann(0.0), &p, &Perturbation::NONE, 2.0 * limit, Integrator::Euler);
        assert!(matches!(err, Err(StefanError::Cfl { .. })));
    }

    #[test]
    fn dirichlet_step_assigns_boundary() {
        let p = zinc();
        let st = linear_initial_profile(1e4, 0.01, p.tm(), 40).unwrap();
        let dt = 0.4 * cfl_max_dt(&st, &p, &Perturbation::NONE, 40);
        let next = step_plant(&st, Actuation::dirichlet(7.5), &p, &Perturbation::NONE, dt, Integrator::Euler).unwrap();
        assert!((next.profile.values()[0] - (p.tm() + 7.5)).abs() < 1e-12);
        assert_eq!(*next.profile.values().last().unwrap(), p.tm());
    }

    #[test]
    fn perfect_observer_tracks_plant() {
        let p = zinc();
        let n = 40;
        let mut plant = linear_initial_profile(1e4, 0.01, p.tm(), n).unwrap();
        let mut obs = linear_observer_init(1e4, 0.01, p.tm(), n).unwrap();
        for _ in 0..200 {
            let dt = 0.4 * cfl_max_dt(&plant, &p, &Perturbation::NONE, n);
            let act = Actuation::neumann(2e5);
            let input = ObserverInput {
                actuation: act,
                start: Measurement {
                    y: plant.s,
                    y_dot: interface_velocity(&plant, &p, &Perturbation::NONE).unwrap(),
                },
                stage: None,
            };
            obs = step_observer(&obs, &input, &p, 0.001, dt, Integrator::Euler).unwrap();
            plant = step_plant(&plant, act, &p, &Perturbation::NONE, dt, Integrator::Euler).unwrap();
        }
        for (a, b) in plant.profile.values().iter().zip(obs.profile_hat.values()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn zero_lambda_observer_is_open_loop_copy() {
        let p = zinc();
        let n = 20;
        let plant = linear_initial_profile(1e4, 0.01, p.tm(), n).unwrap();
        let obs = linear_observer_init(2e4, 0.01, p.tm(), n).unwrap();
        let dt = 0.4 * cfl_max_dt(&plant, &p, &Perturbation::NONE, n);
        let meas = Measurement {
            y: plant.s,
            y_dot: interface_velocity(&plant, &p, &Perturbation::NONE).unwrap(),
        };
        let input = ObserverInput {
            actuation: Actuation::neumann(1e5),
            start: meas,
            stage: None,
        };
        let with_zero = step_observer(&obs, &input, &p, 0.0, dt, Integrator::Euler).unwrap();
        let copy = PlantState {
            s: plant.s,
            profile: obs.profile_hat.clone(),
            t: 0.0,
        };
        let mut core = ObserverCore { u_hat: copy.superheat(&p) };
        core.advance(input.actuation, [meas, meas], &PlantCoefficients::nominal(&p), 0.0, dt, Integrator::Euler)
            .unwrap();
        assert_eq!(with_zero.profile_hat, to_profile(&core.u_hat, p.tm()));
    }

    #[test]
    fn finite_difference_velocity() {
        assert!((measured_velocity(0.1, 0.1002, 0.1) - 0.002).abs() < 1e-15);
    }

    #[test]
    fn config_invariants() {
        assert!(SimConfig::new(8, 10.0, 1.0).is_ok());
        assert!(SimConfig::new(7, 10.0, 1.0).is_err());
        let mut cfg = SimConfig::new(8, 10.0, 1.0).unwrap();
        cfg.dt_policy = DtPolicy::CflFraction(1.5);
        assert!(cfg.validate().is_err());
    }
}
