//! Backstepping gain kernels and the Volterra transformations built from them.
//!
//! Transforms act on superheat node values `u_i = T(σ_i) - T_m` of the
//! immobilized grid; every tail integral `∫_{x_i}^{s}` runs over grid nodes,
//! so no interpolation is needed.

use crate::domain::{PhysicalParams, PlantState, Setpoint};
use crate::error::{Result, StefanError};
use crate::grid::volterra_tail;
use crate::special::{i1_ratio, j1_ratio};

/// Controller gain `c` and observer gain `λ`, both 1/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerGains {
    pub c: f64,
    pub lambda: f64,
}

impl ControllerGains {
    pub fn new(c: f64, lambda: f64) -> Result<Self> {
        for (name, value) in [("c", c), ("lambda", lambda)] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(StefanError::Parameter {
                    name,
                    value,
                    reason: "gain must be positive",
                });
            }
        }
        Ok(ControllerGains { c, lambda })
    }
}

/// `φ(x) = (c/β) x`.
#[inline]
pub fn gain_phi(x: f64, c: f64, beta: f64) -> f64 {
    c / beta * x
}

/// `ψ(x) = (c/β) sqrt(α/c) sin(sqrt(c/α) x)`.
#[inline]
pub fn gain_psi(x: f64, c: f64, alpha: f64, beta: f64) -> f64 {
    let kappa = (c / alpha).sqrt();
    c / beta / kappa * (kappa * x).sin()
}

fn check_order(func: &'static str, x: f64, y: f64) -> Result<()> {
    if x.is_nan() || y.is_nan() || x < 0.0 || x > y {
        return Err(StefanError::Domain {
            func,
            reason: format!("need 0 <= x <= y, got x = {x}, y = {y}"),
        });
    }
    Ok(())
}

#[inline]
fn bessel_argument(x: f64, y: f64, lambda: f64, alpha: f64) -> f64 {
    (lambda / alpha * (y * y - x * x)).max(0.0).sqrt()
}

// I₁(z)/z and J₁(z)/z are entire in z², so y slightly below x is well defined;
// the grid quadrature samples one node below the diagonal.
#[inline]
fn p1_kernel(x: f64, y: f64, lambda: f64, alpha: f64) -> f64 {
    let z2 = lambda / alpha * (y * y - x * x);
    let ratio = if z2 >= 0.0 { i1_ratio(z2.sqrt()) } else { j1_ratio((-z2).sqrt()) };
    lambda / alpha * y * ratio
}

#[inline]
fn q1_kernel(x: f64, y: f64, lambda: f64, alpha: f64) -> f64 {
    let z2 = lambda / alpha * (y * y - x * x);
    let ratio = if z2 >= 0.0 { j1_ratio(z2.sqrt()) } else { i1_ratio((-z2).sqrt()) };
    lambda / alpha * y * ratio
}

/// Observer transformation kernel
/// `P₁(x, y) = (λ/α) y I₁(z)/z`, `z = sqrt((λ/α)(y² - x²))`.
pub fn observer_kernel_p1(x: f64, y: f64, lambda: f64, alpha: f64) -> Result<f64> {
    check_order("observer_kernel_p1", x, y)?;
    Ok(p1_kernel(x, y, lambda, alpha))
}

/// Inverse observer kernel, `P₁` with `J₁` in place of `I₁`.
pub fn inverse_kernel_q1(x: f64, y: f64, lambda: f64, alpha: f64) -> Result<f64> {
    check_order("inverse_kernel_q1", x, y)?;
    Ok(q1_kernel(x, y, lambda, alpha))
}

/// Neumann observer output gain `p₁(x, s) = -α P₁(x, s)`.
pub fn observer_gain_p1(x: f64, s: f64, lambda: f64, alpha: f64) -> Result<f64> {
    check_order("observer_gain_p1", x, s)?;
    Ok(-alpha * p1_kernel(x, s, lambda, alpha))
}

/// Dirichlet observer output gain: `p₁` with leading factor `x` instead of `s`.
pub fn observer_gain_p2(x: f64, s: f64, lambda: f64, alpha: f64) -> Result<f64> {
    check_order("observer_gain_p2", x, s)?;
    Ok(-lambda * x * i1_ratio(bessel_argument(x, s, lambda, alpha)))
}

/// Nodewise observer gain on the grid, `p₁` (Neumann) or `p₂` (Dirichlet).
pub fn observer_gain_profile(n: usize, s: f64, lambda: f64, alpha: f64, dirichlet: bool) -> Vec<f64> {
    (0..=n)
        .map(|i| {
            let x = s * i as f64 / n as f64;
            let lead = if dirichlet { x } else { s };
            -lambda * lead * i1_ratio(bessel_argument(x, s, lambda, alpha))
        })
        .collect()
}

#[inline]
fn node(i: usize, n: usize, s: f64) -> f64 {
    s * i as f64 / n as f64
}

/// `w = u - (β/α)∫_x^s φ(x-y) u(y) dy - φ(x-s) X` on the grid.
pub fn direct_transform(u: &[f64], s: f64, x_err: f64, c: f64, params: &PhysicalParams) -> Vec<f64> {
    let n = u.len() - 1;
    let alpha = params.alpha();
    // (β/α) φ(x - y) = (c/α)(x - y)
    let tail = volterra_tail(u, s, |i, j| c / alpha * (node(i, n, s) - node(j, n, s)));
    (0..=n)
        .map(|i| u[i] - tail[i] - gain_phi(node(i, n, s) - s, c, params.beta()) * x_err)
        .collect()
}

/// `u = w + (β/α)∫_x^s ψ(x-y) w(y) dy + ψ(x-s) X` on the grid.
pub fn inverse_transform(w: &[f64], s: f64, x_err: f64, c: f64, params: &PhysicalParams) -> Vec<f64> {
    let n = w.len() - 1;
    let (alpha, beta) = (params.alpha(), params.beta());
    let tail = volterra_tail(w, s, |i, j| {
        beta / alpha * gain_psi(node(i, n, s) - node(j, n, s), c, alpha, beta)
    });
    (0..=n)
        .map(|i| w[i] + tail[i] + gain_psi(node(i, n, s) - s, c, alpha, beta) * x_err)
        .collect()
}

/// Direct transform of a plant state against its setpoint.
pub fn direct_transform_state(
    state: &PlantState,
    setpoint: Setpoint,
    c: f64,
    params: &PhysicalParams,
) -> Vec<f64> {
    direct_transform(
        &state.superheat(params),
        state.s,
        state.interface_error(setpoint),
        c,
        params,
    )
}

/// `w̃ = ũ - ∫_x^s Q₁(x, y) ũ(y) dy`.
pub fn error_transform(u_err: &[f64], s: f64, lambda: f64, alpha: f64) -> Vec<f64> {
    let n = u_err.len() - 1;
    let tail = volterra_tail(u_err, s, |i, j| q1_kernel(node(i, n, s), node(j, n, s), lambda, alpha));
    u_err.iter().zip(&tail).map(|(u, t)| u - t).collect()
}

/// `ũ = w̃ + ∫_x^s P₁(x, y) w̃(y) dy`.
pub fn error_inverse(w_err: &[f64], s: f64, lambda: f64, alpha: f64) -> Vec<f64> {
    let n = w_err.len() - 1;
    let tail = volterra_tail(w_err, s, |i, j| p1_kernel(node(i, n, s), node(j, n, s), lambda, alpha));
    w_err.iter().zip(&tail).map(|(w, t)| w + t).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::linear_initial_profile;
    use crate::grid::h1_norm;
    use proptest::prelude::*;

    const ALPHA: f64 = 4.532_194_751_929_537e-5;

    fn rel_h1(a: &[f64], b: &[f64], s: f64) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        h1_norm(&diff, s) / h1_norm(a, s)
    }

    #[test]
    fn phi_values() {
        assert_eq!(gain_phi(0.0, 0.001, 1.577e-7), 0.0);
        assert!((gain_phi(0.35, 0.001, 1.577e-7) - 2219.4).abs() < 0.1);
        assert_eq!(gain_phi(-0.2, 0.001, 1.577e-7), -gain_phi(0.2, 0.001, 1.577e-7));
    }

    #[test]
    fn psi_small_argument_matches_phi() {
        let (c, beta) = (0.001, 1.577e-7);
        assert_eq!(gain_psi(0.0, c, ALPHA, beta), 0.0);
        let x = 1e-6;
        assert!((gain_psi(x, c, ALPHA, beta) / gain_phi(x, c, beta) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn p1_diagonal_and_domain() {
        let (lambda, y) = (0.001, 0.35);
        let diag = observer_kernel_p1(y, y, lambda, ALPHA).unwrap();
        assert!((diag - lambda * y / (2.0 * ALPHA)).abs() < 1e-12 * diag);
        assert!(observer_kernel_p1(0.4, 0.35, lambda, ALPHA).is_err());
        assert!(inverse_kernel_q1(0.4, 0.35, lambda, ALPHA).is_err());
        assert!(observer_gain_p1(-0.1, 0.35, lambda, ALPHA).is_err());
    }

    #[test]
    fn p1_corner_value() {
        // z = sqrt((λ/α) y²) at x = 0
        let (lambda, y) = (0.001, 0.35);
        let z = (lambda / ALPHA).sqrt() * y;
        assert!((z - 1.6441).abs() < 1e-3);
        let want = lambda / ALPHA * y * i1_ratio(z);
        assert_eq!(observer_kernel_p1(0.0, y, lambda, ALPHA).unwrap(), want);
    }

    #[test]
    fn observer_gains() {
        let (lambda, s) = (0.001, 0.35);
        let p1 = observer_gain_p1(s, s, lambda, ALPHA).unwrap();
        assert!((p1 + 1.75e-4).abs() < 1e-15);
        assert_eq!(observer_gain_p2(0.0, s, lambda, ALPHA).unwrap(), 0.0);
        for k in 0..100 {
            let x = s * k as f64 / 99.0;
            let big = observer_kernel_p1(x, s, lambda, ALPHA).unwrap();
            assert_eq!(observer_gain_p1(x, s, lambda, ALPHA).unwrap(), -ALPHA * big);
        }
        let prof = observer_gain_profile(10, s, lambda, ALPHA, false);
        assert_eq!(prof[10], observer_gain_p1(s, s, lambda, ALPHA).unwrap());
    }

    #[test]
    fn q1_changes_sign_past_first_zero() {
        // pick λ so z(0, y) spans beyond 3.8317
        let (lambda, y) = (1.0, 0.05);
        let z_max = (lambda / ALPHA).sqrt() * y;
        assert!(z_max > 3.8317);
        let at_zero = inverse_kernel_q1(0.0, y, lambda, ALPHA).unwrap();
        let at_diag = inverse_kernel_q1(y, y, lambda, ALPHA).unwrap();
        assert!(at_diag > 0.0);
        assert_eq!(at_zero.signum() != at_diag.signum(), z_max > 3.831_705_97 && z_max < 7.0155);
        // small λ: nearly constant λy/(2α)
        let tiny = inverse_kernel_q1(0.0, 0.35, 1e-9, ALPHA).unwrap();
        assert!((tiny / (1e-9 * 0.35 / (2.0 * ALPHA)) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn zero_state_maps_to_zero() {
        let p = PhysicalParams::zinc();
        let zero = vec![0.0; 21];
        assert!(direct_transform(&zero, 0.2, 0.0, 0.001, &p).iter().all(|&w| w == 0.0));
        assert!(error_transform(&zero, 0.2, 0.001, ALPHA).iter().all(|&w| w == 0.0));
    }

    #[test]
    fn w_vanishes_at_interface() {
        let p = PhysicalParams::zinc();
        let st = linear_initial_profile(1e4, 0.01, p.tm(), 50).unwrap();
        let w = direct_transform_state(&st, Setpoint::new(0.35).unwrap(), 0.001, &p);
        assert_eq!(w[50], 0.0);
    }

    #[test]
    fn kernels_continue_below_diagonal() {
        let (lambda, x) = (0.01, 0.2);
        let below = |k: fn(f64, f64, f64, f64) -> f64, h: f64| k(x, x - h, lambda, ALPHA);
        for k in [p1_kernel as fn(f64, f64, f64, f64) -> f64, q1_kernel] {
            // smooth through the diagonal: second difference is O(h²)
            let h = 1e-3;
            let d2 = below(k, -h) - 2.0 * below(k, 0.0) + below(k, h);
            assert!(d2.abs() < 1e-3 * below(k, 0.0), "{d2}");
        }
    }

    #[test]
    fn backstepping_round_trip_at_setpoint_length() {
        let p = PhysicalParams::zinc();
        let s = 0.35;
        let u: Vec<f64> = (0..=200).map(|i| 40.0 * (1.0 - (i as f64 / 200.0).powi(2))).collect();
        let w = direct_transform(&u, s, -0.01, 0.001, &p);
        let back = inverse_transform(&w, s, -0.01, 0.001, &p);
        assert!(rel_h1(&u, &back, s) < 1e-6, "{}", rel_h1(&u, &back, s));
    }

    #[test]
    fn backstepping_round_trip() {
        let p = PhysicalParams::zinc();
        let st = linear_initial_profile(1e4, 0.01, p.tm(), 200).unwrap();
        let u = st.superheat(&p);
        let x_err = st.s - 0.35;
        let w = direct_transform(&u, st.s, x_err, 0.001, &p);
        let back = inverse_transform(&w, st.s, x_err, 0.001, &p);
        assert!(rel_h1(&u, &back, st.s) < 1e-6);
    }

    #[test]
    fn error_round_trip_converges() {
        let s = 0.35;
        let err = |n: usize| {
            let u: Vec<f64> = (0..=n).map(|i| -(1.0 - i as f64 / n as f64) * 90.0).collect();
            let w = error_transform(&u, s, 0.001, ALPHA);
            let back = error_inverse(&w, s, 0.001, ALPHA);
            rel_h1(&u, &back, s)
        };
        let (e1, e2) = (err(100), err(200));
        assert!(e2 < 1e-6, "{e2}");
        // better than second order under refinement
        assert!(e1 / e2 > 6.0, "errors {e1} {e2}");
    }

    proptest! {
        #[test]
        fn p1_nonnegative(x in 0.0f64..1.0, frac in 0.0f64..1.0, lambda in 1e-6f64..1.0) {
            let y = x + frac;
            prop_assert!(observer_kernel_p1(x, y, lambda, ALPHA).unwrap() >= 0.0);
        }

        #[test]
        fn nonpositive_w_err_gives_nonpositive_u_err(vals in proptest::collection::vec(-50.0f64..0.0, 9..40)) {
            let u = error_inverse(&vals, 0.2, 0.01, ALPHA);
            prop_assert!(u.iter().all(|&v| v <= 0.0));
        }
    }
}
