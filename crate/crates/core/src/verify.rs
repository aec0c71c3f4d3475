//! Self-checks behind `stefan verify`: kernel residuals, special functions
//! against quadrature oracles, transform round trips and the similarity
//! solution at three resolutions.

use crate::domain::{linear_initial_profile, PhysicalParams};
use crate::error::{Result, StefanError};
use crate::grid::{h1_norm, volterra_tail};
use crate::kernels::{
    direct_transform, error_inverse, error_transform, gain_phi, gain_psi, inverse_kernel_q1, inverse_transform,
    observer_kernel_p1,
};
use crate::scenario::presets;
use crate::sim::run_scenario;
use crate::special::{bessel_i1, bessel_j1, erf};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Kernels,
    SpecialFunctions,
    Transforms,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Kernels, Suite::SpecialFunctions, Suite::Transforms, Suite::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Kernels => "kernels",
            Suite::SpecialFunctions => "special-functions",
            Suite::Transforms => "transforms",
            Suite::Oracle => "oracle",
        }
    }

    pub fn run(self) -> Result<Vec<Check>> {
        match self {
            Suite::Kernels => Ok(kernel_checks()),
            Suite::SpecialFunctions => special_function_checks(),
            Suite::Transforms => Ok(transform_checks()),
            Suite::Oracle => oracle_checks(),
        }
    }
}

impl FromStr for Suite {
    type Err = StefanError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| StefanError::Scenario(format!("unknown verify target `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    AtMost,
    AtLeast,
}

/// One named property with its measured value and threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub limit: Limit,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            limit: Limit::AtMost,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            limit: Limit::AtLeast,
            pass: value >= threshold,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.limit {
            Limit::AtMost => "<=",
            Limit::AtLeast => ">=",
        };
        write!(
            f,
            "{:<4} {:<44} {:>14.6e} {} {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            op,
            self.threshold
        )
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

const CONTROL_GAIN: f64 = 0.001;
const OBSERVER_GAIN: f64 = 0.001;

// eighth-order central stencils, h = 1
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    D1.iter()
        .enumerate()
        .map(|(k, w)| {
            let k = (k + 1) as f64;
            w * (f(x + k * h) - f(x - k * h))
        })
        .sum::<f64>()
        / h
}

fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let mut acc = D2[0] * f(x);
    for (k, w) in D2.iter().enumerate().skip(1) {
        let k = k as f64;
        acc += w * (f(x + k * h) + f(x - k * h));
    }
    acc / (h * h)
}

/// Kernel PDE/ODE residuals and boundary conditions.
pub fn kernel_checks() -> Vec<Check> {
    let p = PhysicalParams::zinc();
    let (alpha, beta, c, lam) = (p.alpha(), p.beta(), CONTROL_GAIN, OBSERVER_GAIN);
    let s = 0.35;
    let mut out = Vec::new();

    // k(x, y) = (β/α) φ(x - y) on a 50x50 grid with y > x
    let k = |x: f64, y: f64| beta / alpha * gain_phi(x - y, c, beta);
    let h = 1e-2;
    let (mut wave, mut diag) = (0.0f64, 0.0f64);
    for i in 0..50 {
        for j in 0..50 {
            let x = s * i as f64 / 49.0;
            let y = s * j as f64 / 49.0;
            if y <= x {
                continue;
            }
            let kxx = (k(x + h, y) - 2.0 * k(x, y) + k(x - h, y)) / (h * h);
            let kyy = (k(x, y + h) - 2.0 * k(x, y) + k(x, y - h)) / (h * h);
            wave = wave.max((kxx - kyy).abs());
        }
        let x = s * i as f64 / 49.0;
        diag = diag.max(((k(x + h, x + h) - k(x - h, x - h)) / (2.0 * h)).abs());
    }
    out.push(Check::at_most("phi kernel k_xx - k_yy", wave, 1e-10));
    out.push(Check::at_most("phi kernel d/dx k(x,x)", diag, 1e-10));

    let psi = |x: f64| gain_psi(x, c, alpha, beta);
    let kappa2 = c / alpha;
    let scale = c / beta;
    let h = 1e-2;
    let ode = (0..=40)
        .map(|i| {
            let x = -s + 2.0 * s * i as f64 / 40.0;
            (d2(psi, x, h) + kappa2 * psi(x)).abs() / (scale * kappa2.sqrt())
        })
        .fold(0.0, f64::max);
    out.push(Check::at_most("psi'' + (c/alpha) psi (relative)", ode, 1e-10));
    out.push(Check::at_most("psi(0)", psi(0.0).abs(), 1e-10));
    out.push(Check::at_most(
        "psi'(0) - c/beta (relative)",
        (d1(psi, 0.0, h) / scale - 1.0).abs(),
        1e-10,
    ));

    // ψ'(x - s) = (c/β)(1 + ∫_x^s (β/α) ψ(x - y) dy) by grid quadrature
    let n = 200;
    let ones = vec![1.0; n + 1];
    let node = |i: usize| s * i as f64 / n as f64;
    let tail = volterra_tail(&ones, s, |i, j| beta / alpha * psi(node(i) - node(j)));
    let consistency = (0..=n)
        .map(|i| {
            let lhs = d1(psi, node(i) - s, 1e-2) / scale;
            (lhs - (1.0 + tail[i])).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::at_most("psi'(x-s) consistency, N=200", consistency, 1e-8));

    // P_yy - P_xx = (λ/α) P and Q_xx - Q_yy = (λ/α) Q away from the diagonal
    let h = 5e-3;
    let (mut p_res, mut q_res) = (0.0f64, 0.0f64);
    for i in 0..20 {
        for j in 0..20 {
            let x = 0.05 + 0.3 * i as f64 / 19.0;
            let y = x + 0.06 + 0.3 * j as f64 / 19.0;
            let pk = |a: f64, b: f64| observer_kernel_p1(a, b, lam, alpha).unwrap_or(f64::NAN);
            let qk = |a: f64, b: f64| inverse_kernel_q1(a, b, lam, alpha).unwrap_or(f64::NAN);
            let pxx = d2(|a| pk(a, y), x, h);
            let pyy = d2(|b| pk(x, b), y, h);
            let qxx = d2(|a| qk(a, y), x, h);
            let qyy = d2(|b| qk(x, b), y, h);
            let rate = lam / alpha;
            p_res = p_res.max((pyy - pxx - rate * pk(x, y)).abs() / (rate * pk(x, y).abs()));
            q_res = q_res.max((qxx - qyy - rate * qk(x, y)).abs() / (rate * qk(x, y).abs().max(1e-3)));
        }
    }
    out.push(Check::at_most("P1 kernel PDE residual (relative)", p_res, 1e-10));
    out.push(Check::at_most("Q1 kernel PDE residual (relative)", q_res, 1e-10));
    let diag_p = (0..=20)
        .map(|i| {
            let y = s * i as f64 / 20.0;
            let want = lam * y / (2.0 * alpha);
            (observer_kernel_p1(y, y, lam, alpha).unwrap_or(f64::NAN) - want).abs() / want.max(1.0)
        })
        .fold(0.0, f64::max);
    out.push(Check::at_most("P1(y,y) = lambda y / (2 alpha)", diag_p, 1e-14));
    out
}

/// `I₁(z) = (1/π)∫_0^π e^{z cos θ} cos θ dθ`, trapezoid on the periodic integrand.
pub fn i1_quadrature(z: f64) -> f64 {
    let m = 512;
    let h = PI / m as f64;
    let f = |th: f64| (z * th.cos()).exp() * th.cos();
    let inner: f64 = (1..m).map(|k| f(k as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) * h / PI
}

/// `J₁(z) = (1/π)∫_0^π cos(θ - z sin θ) dθ`, trapezoid on the periodic integrand.
pub fn j1_quadrature(z: f64) -> f64 {
    let m = 512;
    let h = PI / m as f64;
    let f = |th: f64| (th - z * th.sin()).cos();
    let inner: f64 = (1..m).map(|k| f(k as f64 * h)).sum();
    (inner + 0.5 * (f(0.0) + f(PI))) * h / PI
}

/// `erf(x) = (2/√π)∫_0^x e^{-t²} dt` by composite Simpson, `x >= 0`.
pub fn erf_quadrature(x: f64) -> f64 {
    // the integrand is below 1e-27 past t = 8
    let upper = x.min(8.0);
    let m = 2 * ((upper * 2000.0).ceil() as usize).max(1);
    let h = upper / m as f64;
    let f = |t: f64| (-t * t).exp();
    let mut acc = f(0.0) + f(upper);
    for k in 1..m {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
    }
    acc * h / 3.0 * 2.0 / PI.sqrt()
}

fn mixed_error(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(1.0)
}

/// Library special functions against the quadrature oracles on `[0, 30]`.
pub fn special_function_checks() -> Result<Vec<Check>> {
    let points: Vec<f64> = (0..=600).map(|k| k as f64 * 0.05).collect();
    let (mut ei, mut ej, mut ee) = (0.0f64, 0.0f64, 0.0f64);
    for &z in &points {
        ei = ei.max(mixed_error(bessel_i1(z)?, i1_quadrature(z)));
        ej = ej.max(mixed_error(bessel_j1(z)?, j1_quadrature(z)));
        ee = ee.max(mixed_error(erf(z), erf_quadrature(z)));
    }
    Ok(vec![
        Check::at_most("I1 vs integral oracle on [0,30]", ei, 1e-12),
        Check::at_most("J1 vs integral oracle on [0,30]", ej, 1e-12),
        Check::at_most("erf vs Simpson oracle on [0,30]", ee, 1e-12),
    ])
}

fn relative_h1(a: &[f64], b: &[f64], s: f64) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    h1_norm(&diff, s) / h1_norm(a, s)
}

/// Backstepping round trip `inverse(direct(u))` at `n` intervals.
pub fn backstepping_round_trip(u: &[f64], s: f64, x_err: f64, c: f64, params: &PhysicalParams) -> f64 {
    let w = direct_transform(u, s, x_err, c, params);
    let back = inverse_transform(&w, s, x_err, c, params);
    relative_h1(u, &back, s)
}

/// Observer-error round trip `error_inverse(error_transform(ũ))`.
pub fn error_round_trip(u_err: &[f64], s: f64, lambda: f64, alpha: f64) -> f64 {
    let w = error_transform(u_err, s, lambda, alpha);
    let back = error_inverse(&w, s, lambda, alpha);
    relative_h1(u_err, &back, s)
}

pub fn transform_checks() -> Vec<Check> {
    let p = PhysicalParams::zinc();
    let (s0, s_r) = (presets::S0, presets::S_R);
    let linear = |n: usize| -> Vec<f64> {
        linear_initial_profile(presets::H, s0, p.tm(), n)
            .expect("valid preset profile")
            .superheat(&p)
    };
    // a profile on the full setpoint length, quadratic in x
    let wide = |n: usize| -> Vec<f64> {
        (0..=n)
            .map(|i| 40.0 * (1.0 - (i as f64 / n as f64).powi(2)))
            .collect()
    };
    let err_profile = |n: usize| -> Vec<f64> { (0..=n).map(|i| -90.0 * (1.0 - i as f64 / n as f64)).collect() };

    let mut out = vec![
        Check::at_most(
            "backstepping round trip, s0, N=200",
            backstepping_round_trip(&linear(200), s0, s0 - s_r, CONTROL_GAIN, &p),
            1e-6,
        ),
        Check::at_most(
            "backstepping round trip, s_r, N=200",
            backstepping_round_trip(&wide(200), s_r, -0.01, CONTROL_GAIN, &p),
            1e-6,
        ),
        Check::at_most(
            "observer round trip, s0, N=200",
            error_round_trip(&err_profile(200), s0, OBSERVER_GAIN, p.alpha()),
            1e-6,
        ),
    ];
    let coarse = error_round_trip(&err_profile(100), s_r, OBSERVER_GAIN, p.alpha());
    let fine = error_round_trip(&err_profile(200), s_r, OBSERVER_GAIN, p.alpha());
    out.push(Check::at_most("observer round trip, s_r, N=200", fine, 1e-6));
    out.push(Check::at_least("observer round trip refinement ratio", coarse / fine, 4.0));
    out
}

/// Maximum relative front error after the first 5% of the horizon.
pub fn similarity_front_error(n: usize, superheat: f64, t_end: f64) -> Result<f64> {
    let scenario = presets::similarity(superheat, n, t_end, t_end / 170.0);
    let ex = scenario.build(false)?;
    let (sol, t0) = ex
        .similarity
        .ok_or_else(|| StefanError::Oracle("scenario carries no similarity solution".into()))?;
    let tr = run_scenario(&scenario)?;
    Ok(tr
        .records
        .iter()
        .filter(|r| r.t >= 0.05 * t_end)
        .map(|r| {
            let exact = sol.s(r.t + t0);
            (r.s - exact).abs() / exact
        })
        .fold(0.0, f64::max))
}

pub const ORACLE_SUPERHEAT: f64 = 100.0;
pub const ORACLE_HORIZON: f64 = 85.0;

pub fn oracle_checks() -> Result<Vec<Check>> {
    let errs = [50, 100, 200]
        .into_iter()
        .map(|n| similarity_front_error(n, ORACLE_SUPERHEAT, ORACLE_HORIZON))
        .collect::<Result<Vec<_>>>()?;
    let mut out: Vec<Check> = [50, 100, 200]
        .iter()
        .zip(&errs)
        .map(|(n, e)| Check::at_most(format!("similarity front error, N={n}"), *e, 0.01))
        .collect();
    out.push(Check::at_least("observed order, N=100 -> 200", (errs[1] / errs[2]).log2(), 1.8));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_oracles_match_known_values() {
        // independent reference digits
        assert!((i1_quadrature(1.0) - 0.565_159_103_992_485).abs() < 1e-14);
        assert!((j1_quadrature(1.0) - 0.440_050_585_744_933_5).abs() < 1e-14);
        assert!((erf_quadrature(1.0) - 0.842_700_792_949_714_9).abs() < 1e-14);
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn kernel_suite_passes() {
        let checks = kernel_checks();
        assert!(all_pass(&checks), "{checks:#?}");
    }

    #[test]
    fn special_function_suite_passes() {
        let checks = special_function_checks().unwrap();
        assert!(all_pass(&checks), "{checks:#?}");
    }

    #[test]
    fn transform_suite_passes() {
        let checks = transform_checks();
        assert!(all_pass(&checks), "{checks:#?}");
    }

    #[test]
    fn check_display_marks_failures() {
        let c = Check::at_most("x", 2.0, 1.0);
        assert!(c.to_string().starts_with("FAIL"));
        assert!(Check::at_least("y", 2.0, 1.0).pass);
    }
}
