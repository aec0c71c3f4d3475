//! Quadrature, differentiation and norms on the immobilized grid.
//!
//! Every function takes node values on `σ_i = i/N` together with the physical
//! length `s`, so `dx = s dσ` and `∂/∂x = (1/s) ∂/∂σ`.

/// Grid spacing `1/N` for a slice with `N + 1` nodes.
#[inline]
pub fn spacing(nodes: usize) -> f64 {
    1.0 / (nodes - 1) as f64
}

/// Composite trapezoid rule for `∫_0^s f dx`.
pub fn trapezoid(f: &[f64], s: f64) -> f64 {
    let n = f.len() - 1;
    let inner: f64 = f[1..n].iter().sum();
    s * spacing(f.len()) * (inner + 0.5 * (f[0] + f[n]))
}

/// Composite trapezoid rule for the first moment `∫_0^s x f dx`.
pub fn trapezoid_moment(f: &[f64], s: f64) -> f64 {
    let n = f.len() - 1;
    let h = spacing(f.len());
    let inner: f64 = (1..n).map(|i| i as f64 * h * f[i]).sum();
    s * s * h * (inner + 0.5 * f[n])
}

/// Weight of node `k` in a closed rule over `m` equal intervals, in units of the spacing.
///
/// Fourth order for `m >= 5` (end-corrected extended Simpson), Newton-Cotes
/// below that, trapezoid for a single interval.
#[inline]
pub fn tail_weight(k: usize, m: usize) -> f64 {
    debug_assert!(k <= m && m >= 1);
    let from_end = k.min(m - k);
    match m {
        1 => 0.5,
        3 => {
            if from_end == 0 {
                0.375
            } else {
                1.125
            }
        }
        2 | 4 => match (from_end, k % 2) {
            (0, _) => 1.0 / 3.0,
            (_, 1) => 4.0 / 3.0,
            _ => 2.0 / 3.0,
        },
        _ => match from_end {
            0 => 0.375,
            1 => 7.0 / 6.0,
            2 => 23.0 / 24.0,
            _ => 1.0,
        },
    }
}

/// Tail integrals `∫_{x_i}^{s} g(x_i, y_j) f(y_j) dy` at every node.
///
/// `kernel(i, j)` must return `g(x_i, y_j)` for `j >= i`, and also for
/// `(i, j) = (N-1, N-2)`: the single-interval tail integrates the quadratic
/// through nodes `N-2..=N`. That rule has a negative weight, so when the
/// kernel samples and the data samples each keep one sign, its result is
/// clamped to the sign of their product; smooth data never triggers the clamp. Longer tails use
/// [`tail_weight`], whose weights are all positive. Cost is `O(N²)`.
pub fn volterra_tail<K>(f: &[f64], s: f64, mut kernel: K) -> Vec<f64>
where
    K: FnMut(usize, usize) -> f64,
{
    let n = f.len() - 1;
    let dx = s * spacing(f.len());
    (0..=n)
        .map(|i| {
            if i == n {
                return 0.0;
            }
            let m = n - i;
            if m == 1 && i >= 1 {
                let k = [kernel(i, i - 1), kernel(i, i), kernel(i, n)];
                let v = [f[i - 1], f[i], f[n]];
                let mut acc = (-k[0] * v[0] + 8.0 * k[1] * v[1] + 5.0 * k[2] * v[2]) / 12.0;
                match (common_sign(&k), common_sign(&v)) {
                    (Some(a), Some(b)) if a == b => acc = acc.max(0.0),
                    (Some(_), Some(_)) => acc = acc.min(0.0),
                    _ => {}
                }
                return acc * dx;
            }
            let acc: f64 = (i..=n).map(|j| tail_weight(j - i, m) * kernel(i, j) * f[j]).sum();
            acc * dx
        })
        .collect()
}

/// `Some(true)` if all values are nonnegative, `Some(false)` if all are
/// nonpositive and some negative, `None` for mixed signs.
fn common_sign(v: &[f64]) -> Option<bool> {
    if v.iter().all(|&x| x >= 0.0) {
        Some(true)
    } else if v.iter().all(|&x| x <= 0.0) {
        Some(false)
    } else {
        None
    }
}

/// Second-order one-sided `∂f/∂σ` at `σ = 1`.
#[inline]
pub fn slope_at_end(f: &[f64]) -> f64 {
    let n = f.len() - 1;
    (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * spacing(f.len()))
}

/// Second-order one-sided `∂f/∂σ` at `σ = 0`.
#[inline]
pub fn slope_at_start(f: &[f64]) -> f64 {
    (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * spacing(f.len()))
}

/// `∂f/∂x` at every node: central differences inside, one-sided three-point
/// stencils at both ends.
pub fn gradient(f: &[f64], s: f64) -> Vec<f64> {
    let n = f.len() - 1;
    let h = spacing(f.len());
    let mut g = Vec::with_capacity(n + 1);
    g.push(slope_at_start(f) / s);
    for i in 1..n {
        g.push((f[i + 1] - f[i - 1]) / (2.0 * h * s));
    }
    g.push(slope_at_end(f) / s);
    g
}

/// Squared L² norm on `[0, s]`.
pub fn l2_norm_sq(u: &[f64], s: f64) -> f64 {
    let sq: Vec<f64> = u.iter().map(|v| v * v).collect();
    trapezoid(&sq, s)
}

/// `‖u‖_{L2} = sqrt(∫_0^s u² dx)`.
pub fn l2_norm(u: &[f64], s: f64) -> f64 {
    l2_norm_sq(u, s).sqrt()
}

/// Squared L² norm of the spatial derivative, `‖u_x‖²`.
pub fn derivative_norm_sq(u: &[f64], s: f64) -> f64 {
    l2_norm_sq(&gradient(u, s), s)
}

/// `‖u‖_{H1} = sqrt(‖u‖² + ‖u_x‖²)`.
pub fn h1_norm(u: &[f64], s: f64) -> f64 {
    (l2_norm_sq(u, s) + derivative_norm_sq(u, s)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn linear(h: f64, s0: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|i| h * s0 * (1.0 - i as f64 / n as f64)).collect()
    }

    #[test]
    fn zero_superheat_has_zero_norms() {
        let u = vec![0.0; 11];
        assert_eq!(l2_norm(&u, 0.3), 0.0);
        assert_eq!(h1_norm(&u, 0.3), 0.0);
    }

    #[test]
    fn constant_one_has_l2_sqrt_s() {
        let u = vec![1.0; 21];
        assert!((l2_norm(&u, 0.35) - 0.35f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn linear_profile_norms_converge_at_second_order() {
        // u = H(s0 - x): ‖u‖² = H² s0³/3, ‖u_x‖² = H² s0
        let (h, s0): (f64, f64) = (10_000.0, 0.01);
        let exact_l2 = h * h * s0.powi(3) / 3.0;
        let exact_dx = h * h * s0;
        let err = |n: usize| {
            let u = linear(h, s0, n);
            let dx = derivative_norm_sq(&u, s0);
            assert!((dx - exact_dx).abs() / exact_dx < 1e-12);
            (l2_norm_sq(&u, s0) - exact_l2).abs() / exact_l2
        };
        let (e1, e2) = (err(50), err(100));
        assert!(e1 < 1e-3);
        let ratio = e1 / e2;
        assert!((3.9..4.1).contains(&ratio), "ratio {ratio}");
        let u = linear(h, s0, 200);
        let h1 = h1_norm(&u, s0);
        let exact = (h * h * s0 * (1.0 + s0 * s0 / 3.0)).sqrt();
        assert!((h1 - exact).abs() / exact < 1e-5);
    }

    #[test]
    fn moment_of_linear_profile() {
        // ∫_0^{s0} x H (s0 - x) dx = H s0³/6
        let (h, s0): (f64, f64) = (10_000.0, 0.01);
        let u = linear(h, s0, 400);
        let exact = h * s0.powi(3) / 6.0;
        assert!((trapezoid_moment(&u, s0) - exact).abs() / exact < 1e-5);
    }

    #[test]
    fn one_sided_slopes_exact_on_quadratics() {
        let n = 16;
        let f: Vec<f64> = (0..=n)
            .map(|i| {
                let x = i as f64 / n as f64;
                2.0 + 3.0 * x - 5.0 * x * x
            })
            .collect();
        assert!((slope_at_start(&f) - 3.0).abs() < 1e-12);
        assert!((slope_at_end(&f) - (3.0 - 10.0)).abs() < 1e-12);
    }

    #[test]
    fn volterra_tail_with_unit_kernel_is_tail_length() {
        let f = vec![1.0; 11];
        let tail = volterra_tail(&f, 2.0, |_, _| 1.0);
        for (i, v) in tail.iter().enumerate() {
            let expect = 2.0 * (1.0 - i as f64 / 10.0);
            assert!((v - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn tail_rule_is_exact_for_quadratics() {
        // every tail length from one interval up
        let n = 12;
        let f: Vec<f64> = (0..=n).map(|i| (i as f64 / n as f64).powi(2)).collect();
        let tail = volterra_tail(&f, 1.0, |_, _| 1.0);
        for (i, v) in tail.iter().enumerate() {
            let x = i as f64 / n as f64;
            assert!((v - (1.0 - x.powi(3)) / 3.0).abs() < 1e-14, "node {i}: {v}");
        }
    }

    #[test]
    fn long_tails_are_exact_for_cubics() {
        let n = 12;
        let f: Vec<f64> = (0..=n).map(|i| (i as f64 / n as f64).powi(3)).collect();
        let tail = volterra_tail(&f, 1.0, |_, _| 1.0);
        for (i, v) in tail.iter().enumerate().take(n - 1) {
            let x = i as f64 / n as f64;
            assert!((v - (1.0 - x.powi(4)) / 4.0).abs() < 1e-14, "node {i}: {v}");
        }
    }

    #[test]
    fn tail_weights_sum_to_interval_count() {
        for m in 1..20 {
            let sum: f64 = (0..=m).map(|k| tail_weight(k, m)).sum();
            assert!((sum - m as f64).abs() < 1e-13, "m = {m}");
        }
    }

    #[test]
    fn single_interval_clamp_keeps_sign() {
        // spike two nodes from the end: the quadratic rule alone would give +1/12
        let mut f = vec![0.0; 11];
        f[8] = -1.0;
        let tail = volterra_tail(&f, 1.0, |_, _| 1.0);
        assert_eq!(tail[9], 0.0);
        assert!(tail.iter().all(|&t| t <= 0.0));
        // a sign-changing kernel leaves the rule alone
        let tail = volterra_tail(&f, 1.0, |i, j| i as f64 - j as f64);
        assert!((tail[9] - 1.0 / 120.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn nonneg_kernel_keeps_data_sign(vals in proptest::collection::vec(-10.0f64..0.0, 3..30), s in 0.01f64..1.0) {
            let tail = volterra_tail(&vals, s, |i, j| 1.0 + (i + j) as f64);
            prop_assert!(tail.iter().all(|&t| t <= 0.0));
        }

        #[test]
        fn norms_are_homogeneous(scale in -50.0f64..50.0, s in 0.01f64..1.0) {
            let u: Vec<f64> = (0..=40).map(|i| ((i as f64) * 0.3).sin() + 0.1 * i as f64).collect();
            let v: Vec<f64> = u.iter().map(|x| scale * x).collect();
            let (l2u, l2v) = (l2_norm(&u, s), l2_norm(&v, s));
            prop_assert!((l2v - scale.abs() * l2u).abs() <= 1e-12 * (1.0 + l2v));
            let (h1u, h1v) = (h1_norm(&u, s), h1_norm(&v, s));
            prop_assert!((h1v - scale.abs() * h1u).abs() <= 1e-12 * (1.0 + h1v));
            // the H1 norm is assembled from exactly these two pieces
            let parts = l2_norm_sq(&v, s) + derivative_norm_sq(&v, s);
            prop_assert!((h1v * h1v - parts).abs() <= 1e-12 * parts.max(1.0));
        }
    }
}
