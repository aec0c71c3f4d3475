//! Energy bookkeeping, Lyapunov functionals, constraint flags and
//! exponential fits computed along a run.

use crate::domain::{PhysicalParams, PlantState, Perturbation, Setpoint};
use crate::error::{Result, StefanError};
use crate::grid::{derivative_norm_sq, l2_norm_sq, trapezoid, trapezoid_moment};
use crate::kernels::{direct_transform, error_transform};
use crate::sim::ActuationKind;
use serde::Serialize;

/// Pass/fail of every monitored constraint at one sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ConstraintFlags {
    pub q_pos: bool,
    pub temp_valid: bool,
    pub s_monotone: bool,
    pub s_below_sr: bool,
    pub err_nonpos: bool,
}

impl ConstraintFlags {
    pub fn all(&self) -> bool {
        self.q_pos && self.temp_valid && self.s_monotone && self.s_below_sr && self.err_nonpos
    }
}

/// One sampled row of a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub s: f64,
    /// Command applied over the step that starts at `t` (W/m² or K).
    pub input: f64,
    pub sdot: f64,
    pub l2_u: f64,
    pub h1_u: f64,
    /// `‖T - T̂‖_{H1}` when an observer runs.
    pub h1_err: Option<f64>,
    /// `NaN` when the law carries no gain.
    pub v: f64,
    pub w: f64,
    /// Robust functional with perturbed weights; `NaN` without a gain.
    pub v_eps: f64,
    pub energy: f64,
    /// `∫ input term dτ` accumulated exactly as applied.
    pub input_integral: f64,
    pub energy_residual: f64,
    pub flags: ConstraintFlags,
    /// Superheat at the fixed position `x = s_0`.
    pub superheat_at_s0: f64,
    /// Estimation error `ũ` at `x = 0, s/4, s/2`.
    pub err_probes: Option<[f64; 3]>,
}

/// Conserved energy of the plant with its actual coefficients.
///
/// Neumann: `(1/α')∫u + s/β'`, rate `q_c/k`.
/// Dirichlet: `(1/α')∫x u + s²/(2β')`, rate `T_c`.
pub fn plant_energy(u: &[f64], s: f64, alpha: f64, beta: f64, kind: ActuationKind) -> f64 {
    match kind {
        ActuationKind::Neumann => trapezoid(u, s) / alpha + s / beta,
        ActuationKind::Dirichlet => trapezoid_moment(u, s) / alpha + s * s / (2.0 * beta),
    }
}

/// Rate of the energy input for a held command.
pub fn energy_input_rate(input: f64, kind: ActuationKind, params: &PhysicalParams) -> f64 {
    match kind {
        ActuationKind::Neumann => input / params.k(),
        ActuationKind::Dirichlet => input,
    }
}

/// `[E(t) - E(0) - ∫input] / max(|E(t) - E(0)|, 1e-12 E(0))`.
pub fn relative_energy_residual(e0: f64, e: f64, input_integral: f64) -> f64 {
    let change = e - e0;
    let floor = 1e-12 * e0.abs();
    (change - input_integral) / change.abs().max(floor)
}

/// Energy residual series of a recorded run.
pub fn energy_residual(records: &[DiagnosticsRecord]) -> Vec<f64> {
    let Some(first) = records.first() else {
        return Vec::new();
    };
    records
        .iter()
        .map(|r| relative_energy_residual(first.energy, r.energy, r.input_integral - first.input_integral))
        .collect()
}

/// Weights and rates of the Lyapunov functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LyapunovConstants {
    pub p: f64,
    pub a: f64,
    pub b: f64,
    /// Weight of the estimation-error part (output feedback only).
    pub d: f64,
}

impl LyapunovConstants {
    /// `p = cα/(4β²s_r)`, `a = max{s_r², 8 s_r c/α}`, `b = min{α/(4s_r²), c}`.
    pub fn state_feedback(c: f64, setpoint: Setpoint, params: &PhysicalParams) -> Self {
        let (sr, alpha, beta) = (setpoint.value(), params.alpha(), params.beta());
        LyapunovConstants {
            p: c * alpha / (4.0 * beta * beta * sr),
            a: (sr * sr).max(8.0 * sr * c / alpha),
            b: (alpha / (4.0 * sr * sr)).min(c),
            d: 0.0,
        }
    }

    /// Same `p`; `a = max{s_r², 16 c s_r/α}`, `b = min{α/(8s_r²), c, 2λ}`.
    pub fn output_feedback(c: f64, lambda: f64, setpoint: Setpoint, params: &PhysicalParams) -> Self {
        let (sr, alpha) = (setpoint.value(), params.alpha());
        LyapunovConstants {
            a: (sr * sr).max(16.0 * c * sr / alpha),
            b: (alpha / (8.0 * sr * sr)).min(c).min(2.0 * lambda),
            d: 1.0,
            ..Self::state_feedback(c, setpoint, params)
        }
    }
}

fn h1_sq(w: &[f64], s: f64) -> f64 {
    l2_norm_sq(w, s) + derivative_norm_sq(w, s)
}

/// `V = ½‖w‖²_{H1} + (p/2)X²` with `w` the backstepping transform of `u`.
pub fn lyapunov_v_from(
    u: &[f64],
    s: f64,
    setpoint: Setpoint,
    c: f64,
    consts: &LyapunovConstants,
    params: &PhysicalParams,
) -> f64 {
    let x_err = s - setpoint.value();
    let w = direct_transform(u, s, x_err, c, params);
    0.5 * h1_sq(&w, s) + 0.5 * consts.p * x_err * x_err
}

/// State-feedback Lyapunov functional of a plant state.
pub fn lyapunov_v(state: &PlantState, setpoint: Setpoint, c: f64, params: &PhysicalParams) -> f64 {
    let consts = LyapunovConstants::state_feedback(c, setpoint, params);
    lyapunov_v_from(&state.superheat(params), state.s, setpoint, c, &consts, params)
}

/// `W = V e^{-a s}`.
pub fn lyapunov_w(v: f64, s: f64, consts: &LyapunovConstants) -> f64 {
    v * (-consts.a * s).exp()
}

/// Output-feedback functional: `V` of the estimate plus
/// `(d/2)‖w̃‖²_{H1}` of the transformed estimation error.
#[allow(clippy::too_many_arguments)]
pub fn lyapunov_v_output(
    u: &[f64],
    u_hat: &[f64],
    s: f64,
    setpoint: Setpoint,
    c: f64,
    lambda: f64,
    consts: &LyapunovConstants,
    params: &PhysicalParams,
) -> f64 {
    let v_hat = lyapunov_v_from(u_hat, s, setpoint, c, consts, params);
    let err: Vec<f64> = u.iter().zip(u_hat).map(|(a, b)| a - b).collect();
    let w_err = error_transform(&err, s, lambda, params.alpha());
    v_hat + 0.5 * consts.d * h1_sq(&w_err, s)
}

/// Robust weights `(d, p)` for a perturbed plant.
pub fn robust_weights(c: f64, setpoint: Setpoint, params: &PhysicalParams, pert: &Perturbation) -> (f64, f64) {
    let (sr, alpha, beta) = (setpoint.value(), params.alpha(), params.beta());
    let (e1, e2) = (pert.eps1, pert.eps2);
    let d = 160.0 * sr * sr * c * c * (e1 - e2).powi(2) / (alpha * alpha * (1.0 + e1).powi(2));
    let p = c * alpha * (1.0 + e1) / (8.0 * sr * (1.0 + e2) * beta * beta);
    (d, p)
}

/// `V_ε = (d/2)‖w‖² + ½‖w_x‖² + (p/2)X²`.
pub fn lyapunov_v_eps_from(
    u: &[f64],
    s: f64,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
    pert: &Perturbation,
) -> f64 {
    let (d, p) = robust_weights(c, setpoint, params, pert);
    let x_err = s - setpoint.value();
    let w = direct_transform(u, s, x_err, c, params);
    0.5 * d * l2_norm_sq(&w, s) + 0.5 * derivative_norm_sq(&w, s) + 0.5 * p * x_err * x_err
}

pub fn lyapunov_v_eps(
    state: &PlantState,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
    pert: &Perturbation,
) -> f64 {
    lyapunov_v_eps_from(&state.superheat(params), state.s, setpoint, c, params, pert)
}

/// Quantities the constraint flags are computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorInput {
    pub input: f64,
    pub min_superheat: f64,
    pub s: f64,
    /// Previous sample and the largest decrease attributable to rounding.
    pub s_prev: Option<(f64, f64)>,
    pub s_r: Option<f64>,
    /// `max ũ` when an observer runs.
    pub max_err: Option<f64>,
    /// Undershoot allowance for temperatures, K.
    pub tol_t: f64,
}

pub fn constraint_monitor(m: &MonitorInput) -> ConstraintFlags {
    ConstraintFlags {
        q_pos: m.input > 0.0,
        temp_valid: m.min_superheat >= -m.tol_t,
        s_monotone: m.s_prev.is_none_or(|(prev, slack)| m.s >= prev - slack),
        s_below_sr: m.s_r.is_none_or(|sr| m.s < sr),
        err_nonpos: m.max_err.is_none_or(|e| e <= m.tol_t),
    }
}

/// Temperature undershoot allowance for initial superheat `u0`.
pub fn temperature_tolerance(u0: &[f64]) -> f64 {
    let peak = u0.iter().cloned().fold(0.0, f64::max);
    1e-6 * peak + 1e-9
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpFit {
    /// Decay rate `-d ln y / dt`.
    pub rate: f64,
    pub r2: f64,
}

/// Least-squares line through `(t_i, ln y_i)`.
pub fn fit_exponential(t: &[f64], y: &[f64]) -> Result<ExpFit> {
    if t.len() != y.len() {
        return Err(StefanError::Fit(format!("length mismatch {} vs {}", t.len(), y.len())));
    }
    if t.len() < 2 {
        return Err(StefanError::Fit("need at least two samples".into()));
    }
    if let Some(v) = y.iter().find(|v| !(**v > 0.0)) {
        return Err(StefanError::Fit(format!("nonpositive sample {v}")));
    }
    let n = t.len() as f64;
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let tm = t.iter().sum::<f64>() / n;
    let lm = ly.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (ti, li) in t.iter().zip(&ly) {
        let (dx, dy) = (ti - tm, li - lm);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StefanError::Fit("all sample times coincide".into()));
    }
    let slope = sxy / sxx;
    // a flat series has no variance to explain; rounding in the mean must not
    // turn that into r² = 0
    let flat = syy.sqrt() <= 1e-14 * n * (1.0 + lm.abs());
    let r2 = if flat { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(ExpFit { rate: -slope, r2 })
}
