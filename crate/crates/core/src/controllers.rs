//! Control laws and the feasibility checks that must hold before they run.
//!
//! Dirichlet commands are superheats: the boundary is held at `T_m + T_c`.

use crate::domain::{ObserverState, PhysicalParams, PlantState, Setpoint};
use crate::error::{Result, StefanError};
use crate::grid::{trapezoid, trapezoid_moment};
use crate::sim::{Actuation, ActuationKind};
use std::f64::consts::SQRT_2;

/// Energy to add with a Neumann actuator to move the front from `s_0` to
/// `s_r`: `(s_r - s_0)/β - (1/α)∫u_0`.
pub fn delta_e_neumann(state0: &PlantState, setpoint: Setpoint, params: &PhysicalParams) -> f64 {
    let u0 = state0.superheat(params);
    (setpoint.value() - state0.s) / params.beta() - trapezoid(&u0, state0.s) / params.alpha()
}

/// Dirichlet analogue: `(s_r² - s_0²)/(2β) - (1/α)∫x u_0`.
pub fn delta_e_dirichlet(state0: &PlantState, setpoint: Setpoint, params: &PhysicalParams) -> f64 {
    let u0 = state0.superheat(params);
    let (sr, s0) = (setpoint.value(), state0.s);
    (sr * sr - s0 * s0) / (2.0 * params.beta()) - trapezoid_moment(&u0, s0) / params.alpha()
}

fn check_pulse(delta_e: f64, amplitude: f64, name: &'static str) -> Result<()> {
    if !(delta_e > 0.0) {
        return Err(StefanError::Infeasible(format!(
            "energy deficit {delta_e} is not positive; the setpoint is unreachable by heating"
        )));
    }
    if !(amplitude > 0.0) || !amplitude.is_finite() {
        return Err(StefanError::Parameter {
            name,
            value: amplitude,
            reason: "pulse amplitude must be positive",
        });
    }
    Ok(())
}

/// Length of the Neumann pulse, `kΔE/q̄`.
pub fn pulse_window_neumann(delta_e: f64, q_bar: f64, k: f64) -> f64 {
    k * delta_e / q_bar
}

/// Length of the Dirichlet pulse, `ΔE/T̄`.
pub fn pulse_window_dirichlet(delta_e: f64, t_bar: f64) -> f64 {
    delta_e / t_bar
}

/// `q̄` on `[0, kΔE/q̄]`, zero afterwards.
pub fn pulse_neumann(t: f64, delta_e: f64, q_bar: f64, k: f64) -> Result<Actuation> {
    check_pulse(delta_e, q_bar, "q_bar")?;
    let on = t <= pulse_window_neumann(delta_e, q_bar, k);
    Ok(Actuation::neumann(if on { q_bar } else { 0.0 }))
}

/// `T̄` on `[0, ΔE/T̄]`, zero afterwards.
pub fn pulse_dirichlet(t: f64, delta_e: f64, t_bar: f64) -> Result<Actuation> {
    check_pulse(delta_e, t_bar, "t_bar")?;
    let on = t <= pulse_window_dirichlet(delta_e, t_bar);
    Ok(Actuation::dirichlet(if on { t_bar } else { 0.0 }))
}

/// `q_c = -ck((1/α)∫u + (s - s_r)/β)` on superheat node values.
pub fn neumann_feedback(u: &[f64], s: f64, s_r: f64, c: f64, params: &PhysicalParams) -> f64 {
    -c * params.k() * (trapezoid(u, s) / params.alpha() + (s - s_r) / params.beta())
}

/// `T_c = -c((1/α)∫x u + s(s - s_r)/β)` on superheat node values.
pub fn dirichlet_feedback(u: &[f64], s: f64, s_r: f64, c: f64, params: &PhysicalParams) -> f64 {
    -c * (trapezoid_moment(u, s) / params.alpha() + s * (s - s_r) / params.beta())
}

pub fn state_feedback_neumann(
    state: &PlantState,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
) -> Actuation {
    Actuation::neumann(neumann_feedback(&state.superheat(params), state.s, setpoint.value(), c, params))
}

pub fn state_feedback_dirichlet(
    state: &PlantState,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
) -> Actuation {
    Actuation::dirichlet(dirichlet_feedback(&state.superheat(params), state.s, setpoint.value(), c, params))
}

/// State feedback evaluated on the estimate `T̂` and the measured `Y`.
pub fn output_feedback_neumann(
    obs: &ObserverState,
    y: f64,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
) -> Actuation {
    Actuation::neumann(neumann_feedback(&obs.superheat(params), y, setpoint.value(), c, params))
}

pub fn output_feedback_dirichlet(
    obs: &ObserverState,
    y: f64,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
) -> Actuation {
    Actuation::dirichlet(dirichlet_feedback(&obs.superheat(params), y, setpoint.value(), c, params))
}

/// Control law selected for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlLaw {
    Zero,
    Constant(f64),
    /// `amplitude` while `t < window`, then zero.
    Pulse { amplitude: f64, window: f64 },
    StateFeedback { c: f64, setpoint: Setpoint },
    OutputFeedback { c: f64, setpoint: Setpoint },
}

impl ControlLaw {
    /// Command held over the step that starts at `t`.
    ///
    /// `u` is the plant superheat, `u_hat` the estimate (required for output
    /// feedback).
    pub fn evaluate(
        &self,
        t: f64,
        s: f64,
        u: &[f64],
        u_hat: Option<&[f64]>,
        kind: ActuationKind,
        params: &PhysicalParams,
    ) -> Result<f64> {
        let feedback = |prof: &[f64], c: f64, sp: Setpoint| match kind {
            ActuationKind::Neumann => neumann_feedback(prof, s, sp.value(), c, params),
            ActuationKind::Dirichlet => dirichlet_feedback(prof, s, sp.value(), c, params),
        };
        Ok(match *self {
            ControlLaw::Zero => 0.0,
            ControlLaw::Constant(v) => v,
            // the hold interval [t, t + dt) lies inside the pulse iff t < window
            ControlLaw::Pulse { amplitude, window } => {
                if t < window {
                    amplitude
                } else {
                    0.0
                }
            }
            ControlLaw::StateFeedback { c, setpoint } => feedback(u, c, setpoint),
            ControlLaw::OutputFeedback { c, setpoint } => {
                let est = u_hat.ok_or_else(|| {
                    StefanError::Scenario("output feedback requires an enabled observer".into())
                })?;
                feedback(est, c, setpoint)
            }
        })
    }

    pub fn gain(&self) -> Option<f64> {
        match *self {
            ControlLaw::StateFeedback { c, .. } | ControlLaw::OutputFeedback { c, .. } => Some(c),
            _ => None,
        }
    }

    /// Time at which the pulse switches off, if any.
    pub fn switch_time(&self) -> Option<f64> {
        match *self {
            ControlLaw::Pulse { window, .. } => Some(window),
            _ => None,
        }
    }
}

/// A failed restriction with its signed margin (negative or zero means
/// violated).
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub rule: &'static str,
    pub margin: f64,
    pub detail: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {} (margin {:.6e})", self.rule, self.detail, self.margin)
    }
}

/// Outcome of a one-sided inequality `lhs > rhs` (or `>=`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bound {
    pub ok: bool,
    /// Right-hand side of the inequality.
    pub rhs: f64,
    pub margin: f64,
}

/// Setpoint compatibility for heating from `x = 0` with a flux:
/// `s_r > s_0 + (β/α)∫u_0`.
pub fn validate_setpoint_neumann(state0: &PlantState, setpoint: Setpoint, params: &PhysicalParams) -> Bound {
    let u0 = state0.superheat(params);
    let rhs = state0.s + params.beta() / params.alpha() * trapezoid(&u0, state0.s);
    let margin = setpoint.value() - rhs;
    Bound {
        ok: margin > 0.0,
        rhs,
        margin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirichletSetpointCheck {
    pub ok: bool,
    /// `sqrt(s_0² + (2β/α)∫x u_0)`.
    pub energy_rhs: f64,
    /// `s_0 + (β/α)∫(x/s_0) u_0`.
    pub restriction_rhs: f64,
    /// The larger of the two.
    pub binding: f64,
    pub margin: f64,
}

pub fn validate_setpoint_dirichlet(
    state0: &PlantState,
    setpoint: Setpoint,
    params: &PhysicalParams,
) -> DirichletSetpointCheck {
    let u0 = state0.superheat(params);
    let s0 = state0.s;
    let ratio = params.beta() / params.alpha();
    let moment = trapezoid_moment(&u0, s0);
    let energy_rhs = (s0 * s0 + 2.0 * ratio * moment).sqrt();
    let restriction_rhs = s0 + ratio * moment / s0;
    let binding = energy_rhs.max(restriction_rhs);
    let margin = setpoint.value() - binding;
    DirichletSetpointCheck {
        ok: margin > 0.0,
        energy_rhs,
        restriction_rhs,
        binding,
        margin,
    }
}

/// Gain restriction for boundary-temperature control: `c <= α/(2√2 s_r)`.
pub fn validate_gain_dirichlet(c: f64, setpoint: Setpoint, params: &PhysicalParams) -> Bound {
    let bound = params.alpha() / (2.0 * SQRT_2 * setpoint.value());
    Bound {
        ok: c <= bound,
        rhs: bound,
        margin: bound - c,
    }
}

/// Membership of `(ε₁, ε₂)` in the robustness set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobustnessCheck {
    pub inside: bool,
    pub g: f64,
    /// `(1 - G)ε₁ - G`.
    pub lower: f64,
    /// `ε₁`.
    pub upper: f64,
}

/// `G(c) = (3/10)^{1/4} α/(8 s_r² c)`.
pub fn robustness_g(c: f64, setpoint: Setpoint, params: &PhysicalParams) -> f64 {
    let sr = setpoint.value();
    0.3f64.powf(0.25) * params.alpha() / (8.0 * sr * sr * c)
}

/// Checks `(1 - G)ε₁ - G <= ε₂ <= ε₁`.
pub fn robustness_region_check(
    eps1: f64,
    eps2: f64,
    c: f64,
    setpoint: Setpoint,
    params: &PhysicalParams,
) -> RobustnessCheck {
    let g = robustness_g(c, setpoint, params);
    let lower = (1.0 - g) * eps1 - g;
    RobustnessCheck {
        inside: lower <= eps2 && eps2 <= eps1,
        g,
        lower,
        upper: eps1,
    }
}

/// Largest Dirichlet gain covered by the robustness result: the positive
/// root of `A c³ + B c = 1`.
pub fn dirichlet_robust_gain_bound(eps1: f64, eps2: f64, setpoint: Setpoint, params: &PhysicalParams) -> Result<f64> {
    if eps1 < eps2 {
        return Err(StefanError::Precondition(format!(
            "robust gain bound needs eps1 >= eps2, got eps1 = {eps1}, eps2 = {eps2}"
        )));
    }
    if eps1 <= -1.0 || eps2 <= -1.0 {
        return Err(StefanError::Parameter {
            name: "eps",
            value: eps1.min(eps2),
            reason: "perturbation must exceed -1",
        });
    }
    let (sr, alpha) = (setpoint.value(), params.alpha());
    let d = eps1 - eps2;
    let a = 512.0 * SQRT_2 * sr.powi(6) * (1.0 + sr) * d * d
        / (3.0 * alpha.powi(3) * (1.0 + eps1).powi(2) * (1.0 + eps2));
    let b = 16.0 * SQRT_2 * sr * sr / (alpha * (1.0 + eps2));
    if a == 0.0 {
        return Ok(1.0 / b);
    }
    let f = |c: f64| a * c * c * c + b * c - 1.0;
    // f is increasing and f(1/B) >= 0
    let (mut lo, mut hi) = (0.0, 1.0 / b);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 2.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Initial estimate slope and its admissible bracket, K/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverInit {
    pub h_hat: f64,
    pub h_l: f64,
    pub h_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObserverSetupReport {
    /// Upper bound on `λ` from the bracket, `(4α/s_0²)(Ĥ_l - H)/Ĥ_u`.
    pub lambda_bound: f64,
    /// Lower bound on `s_r` from the bracket.
    pub setpoint_bound: f64,
    pub violations: Vec<Violation>,
}

impl ObserverSetupReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Evaluates every restriction on the observer initialization, gain and
/// setpoint. Linear initial data `H(s_0 - x)` is assumed.
#[allow(clippy::too_many_arguments)]
pub fn validate_observer_setup(
    init: ObserverInit,
    h: f64,
    lambda: f64,
    s0: f64,
    setpoint: Setpoint,
    params: &PhysicalParams,
    kind: ActuationKind,
) -> ObserverSetupReport {
    let ObserverInit { h_hat, h_l, h_u } = init;
    let (alpha, beta) = (params.alpha(), params.beta());
    let mut violations = Vec::new();
    let mut check = |rule: &'static str, margin: f64, strict: bool, detail: String| {
        let ok = if strict { margin > 0.0 } else { margin >= 0.0 };
        if !ok {
            violations.push(Violation { rule, margin, detail });
        }
    };
    check("bracket", h_u - h_l, false, format!("need h_u >= h_l, got {h_u} < {h_l}"));
    check(
        "bracket",
        h_l - h,
        true,
        format!("need h_l > H, got h_l = {h_l}, H = {h}"),
    );
    check(
        "initial-estimate",
        (h_hat - h_l).min(h_u - h_hat),
        false,
        format!("need h_l <= h_hat <= h_u, got {h_hat} outside [{h_l}, {h_u}]"),
    );
    let lambda_bound = 4.0 * alpha / (s0 * s0) * (h_l - h) / h_u;
    check("observer-gain", lambda, true, format!("need lambda > 0, got {lambda}"));
    check(
        "observer-gain",
        lambda_bound - lambda,
        true,
        format!("need lambda < {lambda_bound:.6e}, got {lambda}"),
    );
    let divisor = match kind {
        ActuationKind::Neumann => 2.0,
        ActuationKind::Dirichlet => 6.0,
    };
    let setpoint_bound = s0 + beta * s0 * s0 * h_u / (divisor * alpha);
    check(
        "setpoint",
        setpoint.value() - setpoint_bound,
        true,
        format!("need s_r > {setpoint_bound:.6e}, got {}", setpoint.value()),
    );
    ObserverSetupReport {
        lambda_bound,
        setpoint_bound,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::linear_initial_profile;

    fn zinc() -> PhysicalParams {
        PhysicalParams::zinc()
    }

    fn nominal(n: usize) -> PlantState {
        linear_initial_profile(1e4, 0.01, zinc().tm(), n).unwrap()
    }

    fn sr() -> Setpoint {
        Setpoint::new(0.35).unwrap()
    }

    #[test]
    fn delta_e_values() {
        let p = zinc();
        let de = delta_e_neumann(&nominal(200), sr(), &p);
        let exact = 0.34 / p.beta() - 1e4 * 1e-4 / 2.0 / p.alpha();
        assert!((de - exact).abs() < 1e-9 * exact);
        assert!((de - 2.1450e6).abs() < 1e2);

        let de_d = delta_e_dirichlet(&nominal(400), sr(), &p);
        let exact_d = (0.35f64.powi(2) - 1e-4) / (2.0 * p.beta()) - 1e4 * 1e-6 / 6.0 / p.alpha();
        assert!((de_d - exact_d).abs() < 1e-6 * exact_d);

        let flat = linear_initial_profile(0.0, 0.2, p.tm(), 20).unwrap();
        assert_eq!(delta_e_neumann(&flat, Setpoint::new(0.2).unwrap(), &p), 0.0);
    }

    #[test]
    fn pulse_switches_at_window() {
        let (de, qbar, k) = (2.0e6, 8.0e4, 116.0);
        let window = pulse_window_neumann(de, qbar, k);
        assert_eq!(pulse_neumann(window * (1.0 - 1e-12), de, qbar, k).unwrap().value, qbar);
        assert_eq!(pulse_neumann(window * (1.0 + 1e-12), de, qbar, k).unwrap().value, 0.0);
        // rectangle area over k is the energy deficit
        assert!((qbar * window / k - de).abs() < 1e-9 * de);
        assert!(matches!(pulse_neumann(0.0, -1.0, qbar, k), Err(StefanError::Infeasible(_))));
        let w = pulse_window_dirichlet(de, 50.0);
        assert_eq!(pulse_dirichlet(w + 1.0, de, 50.0).unwrap().value, 0.0);
        assert_eq!(pulse_dirichlet(w - 1.0, de, 50.0).unwrap().value, 50.0);
    }

    #[test]
    fn fifty_minute_pulse_amplitude() {
        let p = zinc();
        let de = delta_e_neumann(&nominal(200), sr(), &p);
        let qbar = p.k() * de / 3000.0;
        assert!((pulse_window_neumann(de, qbar, p.k()) - 3000.0).abs() < 1e-9);
    }

    #[test]
    fn initial_feedback_values() {
        let p = zinc();
        let st = nominal(200);
        let q = state_feedback_neumann(&st, sr(), 0.001, &p).value;
        let exact = -0.001 * p.k() * (1e4 * 1e-4 / (2.0 * p.alpha()) + (0.01 - 0.35) / p.beta());
        assert!((q - exact).abs() < 1e-6 * exact);
        assert!((q - 2.488e5).abs() < 1e2);

        let tc = state_feedback_dirichlet(&nominal(400), sr(), 4e-5, &p).value;
        let exact_d = -4e-5 * (1e4 * 1e-6 / (6.0 * p.alpha()) + 0.01 * (0.01 - 0.35) / p.beta());
        assert!(tc > 0.0);
        assert!((tc - exact_d).abs() < 1e-5 * exact_d);
        let doubled = state_feedback_dirichlet(&nominal(400), sr(), 8e-5, &p).value;
        assert!((doubled - 2.0 * tc).abs() < 1e-12 * tc);
    }

    #[test]
    fn feedback_vanishes_at_equilibrium() {
        let p = zinc();
        let st = linear_initial_profile(0.0, 0.35, p.tm(), 20).unwrap();
        assert_eq!(state_feedback_neumann(&st, sr(), 0.001, &p).value, 0.0);
        assert_eq!(state_feedback_dirichlet(&st, sr(), 4e-5, &p).value, 0.0);
        let obs = ObserverState {
            profile_hat: st.profile.clone(),
            t: 0.0,
        };
        assert_eq!(output_feedback_neumann(&obs, 0.35, sr(), 0.001, &p).value, 0.0);
    }

    #[test]
    fn perfect_estimate_matches_state_feedback() {
        let p = zinc();
        let st = nominal(100);
        let obs = ObserverState {
            profile_hat: st.profile.clone(),
            t: 0.0,
        };
        assert_eq!(
            output_feedback_neumann(&obs, st.s, sr(), 0.001, &p),
            state_feedback_neumann(&st, sr(), 0.001, &p)
        );
        assert_eq!(
            output_feedback_dirichlet(&obs, st.s, sr(), 4e-5, &p),
            state_feedback_dirichlet(&st, sr(), 4e-5, &p)
        );
    }

    #[test]
    fn setpoint_checks() {
        let p = zinc();
        let st = nominal(400);
        let b = validate_setpoint_neumann(&st, sr(), &p);
        assert!(b.ok);
        assert!((b.rhs - 0.01174).abs() < 1e-5);
        assert!((b.margin - 0.3383).abs() < 1e-4);
        let at_rhs = validate_setpoint_neumann(&st, Setpoint::new(b.rhs).unwrap(), &p);
        assert!(!at_rhs.ok);

        let d = validate_setpoint_dirichlet(&st, sr(), &p);
        assert!(d.ok);
        assert!((d.energy_rhs - 0.010564).abs() < 1e-6);
        assert!((d.restriction_rhs - 0.010580).abs() < 1e-6);
        assert_eq!(d.binding, d.restriction_rhs);

        let flat = linear_initial_profile(0.0, 0.01, p.tm(), 20).unwrap();
        assert_eq!(validate_setpoint_neumann(&flat, sr(), &p).rhs, 0.01);
        let fd = validate_setpoint_dirichlet(&flat, sr(), &p);
        assert_eq!((fd.energy_rhs, fd.restriction_rhs), (0.01, 0.01));
    }

    #[test]
    fn dirichlet_gain_bound() {
        let p = zinc();
        let g = validate_gain_dirichlet(4e-5, sr(), &p);
        assert!(g.ok);
        assert!((g.rhs - 4.578e-5).abs() < 1e-8);
        assert!(!validate_gain_dirichlet(0.001, sr(), &p).ok);
        let half = validate_gain_dirichlet(4e-5, Setpoint::new(0.7).unwrap(), &p);
        assert!((half.rhs * 2.0 - g.rhs).abs() < 1e-18);
    }

    #[test]
    fn robustness_region() {
        let p = zinc();
        let r = robustness_region_check(0.3, -0.2, 0.001, sr(), &p);
        assert!((r.g - 0.0342).abs() < 1e-4);
        assert!((r.lower - 0.2555).abs() < 1e-4);
        assert!(!r.inside);
        assert!(robustness_region_check(0.0, 0.0, 0.001, sr(), &p).inside);
        assert!(robustness_region_check(0.3, 0.28, 0.001, sr(), &p).inside);
    }

    #[test]
    fn robust_gain_bound() {
        let p = zinc();
        let c = dirichlet_robust_gain_bound(0.3, 0.3, sr(), &p).unwrap();
        let want = p.alpha() * 1.3 / (16.0 * SQRT_2 * 0.1225);
        assert!((c - want).abs() < 1e-15 * want);
        let c1 = dirichlet_robust_gain_bound(0.3, 0.1, sr(), &p).unwrap();
        let c2 = dirichlet_robust_gain_bound(0.3, -0.2, sr(), &p).unwrap();
        assert!(c2 < c1 && c1 < dirichlet_robust_gain_bound(0.3, 0.3, sr(), &p).unwrap() * 1.3);
        assert!(matches!(
            dirichlet_robust_gain_bound(0.1, 0.3, sr(), &p),
            Err(StefanError::Precondition(_))
        ));
    }

    #[test]
    fn observer_setup() {
        let p = zinc();
        let good = ObserverInit {
            h_hat: 2e4,
            h_l: 2e4,
            h_u: 2e4,
        };
        let r = validate_observer_setup(good, 1e4, 0.001, 0.01, sr(), &p, ActuationKind::Neumann);
        assert!(r.ok(), "{:?}", r.violations);
        assert!((r.lambda_bound - 0.9065).abs() < 1e-4);

        let printed = ObserverInit {
            h_hat: 1000.0,
            h_l: 1000.0,
            h_u: 1000.0,
        };
        let r = validate_observer_setup(printed, 1e4, 0.001, 0.01, sr(), &p, ActuationKind::Neumann);
        assert!(r.violations.iter().any(|v| v.rule == "bracket"));

        let r = validate_observer_setup(good, 1e4, 0.0, 0.01, sr(), &p, ActuationKind::Neumann);
        assert!(r.violations.iter().any(|v| v.rule == "observer-gain"));

        let d = validate_observer_setup(good, 1e4, 0.001, 0.01, sr(), &p, ActuationKind::Dirichlet);
        let n = validate_observer_setup(good, 1e4, 0.001, 0.01, sr(), &p, ActuationKind::Neumann);
        assert!(d.setpoint_bound < n.setpoint_bound);
    }

    #[test]
    fn law_evaluation() {
        let p = zinc();
        let u = vec![0.0; 11];
        let pulse = ControlLaw::Pulse {
            amplitude: 5.0,
            window: 10.0,
        };
        assert_eq!(pulse.evaluate(9.9, 0.1, &u, None, ActuationKind::Neumann, &p).unwrap(), 5.0);
        assert_eq!(pulse.evaluate(10.0, 0.1, &u, None, ActuationKind::Neumann, &p).unwrap(), 0.0);
        let of = ControlLaw::OutputFeedback { c: 0.001, setpoint: sr() };
        assert!(of.evaluate(0.0, 0.1, &u, None, ActuationKind::Neumann, &p).is_err());
    }
}
