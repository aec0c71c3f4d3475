//! Modified Bessel `I₁`, Bessel `J₁`, their ratio-to-argument forms, and the
//! error function, all for real arguments.
//!
//! Branches:
//! - `I₁`: ascending series for `z <= 30`, Hankel asymptotic expansion above.
//! - `J₁`: alternating series with compensated summation for `z <= 8`;
//!   Miller backward recurrence (normalized by `J₀ + 2 Σ J₂ₖ = 1`) above,
//!   where the series loses digits to cancellation.
//! - `erf`: positive-term series for `|x| <= 3`, continued fraction for `erfc`
//!   above.

use crate::error::{Result, StefanError};
use std::f64::consts::PI;

/// Argument above which `I₁` switches to the asymptotic expansion.
pub const I1_ASYMPTOTIC_THRESHOLD: f64 = 30.0;
/// Argument above which `J₁` switches to backward recurrence.
pub const J1_RECURRENCE_THRESHOLD: f64 = 8.0;
/// `|x|` above which `erf` is computed from the `erfc` continued fraction.
pub const ERF_CONTINUED_FRACTION_THRESHOLD: f64 = 3.0;
/// Below this argument the ratio forms use their Taylor polynomial.
pub const RATIO_SERIES_THRESHOLD: f64 = 1e-4;

/// Stopping rule for the power series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        SeriesTolerance {
            rel_tol: 1e-14,
            max_terms: 200,
        }
    }
}

impl SeriesTolerance {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 1.0) {
            return Err(StefanError::Parameter {
                name: "rel_tol",
                value: rel_tol,
                reason: "must lie in (0, 1)",
            });
        }
        if max_terms < 10 {
            return Err(StefanError::Parameter {
                name: "max_terms",
                value: max_terms as f64,
                reason: "need at least 10 terms",
            });
        }
        Ok(SeriesTolerance { rel_tol, max_terms })
    }
}

fn check_argument(func: &'static str, z: f64) -> Result<()> {
    if z.is_nan() {
        return Err(StefanError::Domain {
            func,
            reason: "NaN argument".into(),
        });
    }
    if z < 0.0 {
        return Err(StefanError::Domain {
            func,
            reason: format!("negative argument {z}"),
        });
    }
    Ok(())
}

/// Modified Bessel function of the first kind, order one, for `z >= 0`.
pub fn bessel_i1(z: f64) -> Result<f64> {
    check_argument("bessel_i1", z)?;
    Ok(i1_unchecked(z))
}

/// Bessel function of the first kind, order one, for `z >= 0`.
pub fn bessel_j1(z: f64) -> Result<f64> {
    check_argument("bessel_j1", z)?;
    Ok(j1_unchecked(z))
}

fn i1_unchecked(z: f64) -> f64 {
    if z > I1_ASYMPTOTIC_THRESHOLD {
        i1_asymptotic(z)
    } else {
        i1_series(z, SeriesTolerance::default())
    }
}

fn j1_unchecked(z: f64) -> f64 {
    if z > J1_RECURRENCE_THRESHOLD {
        j1_recurrence(z)
    } else {
        j1_series(z, SeriesTolerance::default())
    }
}

/// `Σ_{m>=0} (z/2)^{2m+1} / (m! (m+1)!)`.
pub fn i1_series(z: f64, tol: SeriesTolerance) -> f64 {
    let q = 0.25 * z * z;
    let mut term = 0.5 * z;
    let mut sum = term;
    for m in 0..tol.max_terms {
        term *= q / ((m + 1) * (m + 2)) as f64;
        sum += term;
        if term <= tol.rel_tol * 0.01 * sum {
            break;
        }
    }
    sum
}

/// Hankel expansion `e^z / sqrt(2πz) Σ (-1)^k a_k(1) / z^k`, truncated at
/// the smallest term.
pub fn i1_asymptotic(z: f64) -> f64 {
    e_scaled_i1_asymptotic(z) * z.exp()
}

fn e_scaled_i1_asymptotic(z: f64) -> f64 {
    let mu = 4.0;
    let mut term = 1.0f64;
    let mut sum = 1.0;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (k as f64 * 8.0 * z);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * z).sqrt()
}

/// Alternating series for `J₁` with Neumaier-compensated summation.
pub fn j1_series(z: f64, tol: SeriesTolerance) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 0.5 * z;
    let mut sum = term;
    let mut comp = 0.0;
    for m in 0..tol.max_terms {
        term *= q / ((m + 1) * (m + 2)) as f64;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        if term.abs() <= tol.rel_tol * 0.01 * (sum + comp).abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    sum + comp
}

/// Miller's backward recurrence `J_{k-1} = (2k/z) J_k - J_{k+1}`, normalized
/// with `J₀ + 2 Σ_{k>=1} J_{2k} = 1`.
pub fn j1_recurrence(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    // start well above z so the seeded tail is negligible
    let start = 2 * (((1.5 * z + 40.0) / 2.0).ceil() as usize);
    let mut next = 0.0f64;
    let mut cur = 1e-30f64;
    let mut norm = 0.0f64;
    let mut j1 = 0.0f64;
    for k in (1..=start).rev() {
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        if k == 1 {
            j1 = cur;
        }
        let prev = 2.0 * k as f64 / z * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += cur;
    j1 / norm
}

/// `I₁(z)/z` with the removable singularity at zero filled in.
pub fn i1_ratio(z: f64) -> f64 {
    let z = z.abs();
    if z < RATIO_SERIES_THRESHOLD {
        let z2 = z * z;
        0.5 + z2 / 16.0 + z2 * z2 / 384.0
    } else {
        i1_unchecked(z) / z
    }
}

/// `J₁(z)/z` with the removable singularity at zero filled in.
pub fn j1_ratio(z: f64) -> f64 {
    let z = z.abs();
    if z < RATIO_SERIES_THRESHOLD {
        let z2 = z * z;
        0.5 - z2 / 16.0 + z2 * z2 / 384.0
    } else {
        j1_unchecked(z) / z
    }
}

/// Error function, accurate to about `1e-15` absolute.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= ERF_CONTINUED_FRACTION_THRESHOLD {
        erf_series(x)
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

/// Complementary error function `1 - erf(x)`.
pub fn erfc(x: f64) -> f64 {
    if x > ERF_CONTINUED_FRACTION_THRESHOLD {
        erfc_continued_fraction(x)
    } else {
        1.0 - erf(x)
    }
}

/// `erf(x) = (2/sqrt(π)) e^{-x²} Σ 2ⁿ x^{2n+1} / (1·3···(2n+1))`; all terms
/// positive for `x >= 0`.
fn erf_series(x: f64) -> f64 {
    let two_x2 = 2.0 * x * x;
    let mut term = x;
    let mut sum = x;
    for n in 1..500 {
        term *= two_x2 / (2 * n + 1) as f64;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    2.0 / PI.sqrt() * (-x * x).exp() * sum
}

/// `erfc(x) = e^{-x²}/sqrt(π) · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz algorithm.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = 0.5 * k as f64;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}
