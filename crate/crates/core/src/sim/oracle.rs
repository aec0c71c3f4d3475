//! Classical self-similar solution of the one-phase melting problem with a
//! constant boundary temperature, used to check the simulator.

use crate::domain::{PhysicalParams, TemperatureProfile};
use crate::error::{Result, StefanError};
use crate::special::erf;
use std::f64::consts::PI;

/// Closed-form solution `s(t) = 2λ* sqrt(αt)` for boundary temperature `tc`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimilaritySolution {
    pub lambda: f64,
    pub stefan_number: f64,
    pub alpha: f64,
    /// Absolute boundary temperature, K.
    pub tc: f64,
    pub tm: f64,
}

impl SimilaritySolution {
    pub fn new(params: &PhysicalParams, tc: f64) -> Result<Self> {
        if !(tc > params.tm()) || !tc.is_finite() {
            return Err(StefanError::Oracle(format!(
                "boundary temperature {tc} must exceed the melting point {}",
                params.tm()
            )));
        }
        let st = params.cp() * (tc - params.tm()) / params.dh();
        Ok(SimilaritySolution {
            lambda: similarity_lambda(st)?,
            stefan_number: st,
            alpha: params.alpha(),
            tc,
            tm: params.tm(),
        })
    }

    pub fn s(&self, t: f64) -> f64 {
        2.0 * self.lambda * (self.alpha * t).sqrt()
    }

    /// Time at which the front reaches `s`.
    pub fn time_at(&self, s: f64) -> f64 {
        let r = s / (2.0 * self.lambda);
        r * r / self.alpha
    }

    pub fn temperature(&self, x: f64, t: f64) -> f64 {
        let eta = x / (2.0 * (self.alpha * t).sqrt());
        self.tc - (self.tc - self.tm) * erf(eta) / erf(self.lambda)
    }

    /// Exact profile at time `t` on `n` intervals of the immobilized grid.
    pub fn profile(&self, t: f64, n: usize) -> TemperatureProfile {
        let s = self.s(t);
        let mut values: Vec<f64> = (0..=n)
            .map(|i| self.temperature(s * i as f64 / n as f64, t))
            .collect();
        values[n] = self.tm;
        TemperatureProfile::new(values).expect("finite profile")
    }
}

/// Root of `λ e^{λ²} erf(λ) = St/sqrt(π)` on `(0, 10)` by bisection.
pub fn similarity_lambda(stefan_number: f64) -> Result<f64> {
    if !(stefan_number > 0.0) || !stefan_number.is_finite() {
        return Err(StefanError::Oracle(format!(
            "Stefan number must be positive, got {stefan_number}"
        )));
    }
    let target = stefan_number / PI.sqrt();
    let g = |l: f64| l * (l * l).exp() * erf(l) - target;
    let (mut lo, mut hi) = (0.0f64, 10.0f64);
    if g(hi) <= 0.0 {
        return Err(StefanError::Oracle(format!(
            "no root in (0, 10) for Stefan number {stefan_number}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Front position and profile of the similarity solution at time `t`.
pub fn run_similarity_oracle(
    params: &PhysicalParams,
    tc: f64,
    t: f64,
    n: usize,
) -> Result<(f64, TemperatureProfile)> {
    if !(t > 0.0) {
        return Err(StefanError::Oracle(format!("time must be positive, got {t}")));
    }
    let sol = SimilaritySolution::new(params, tc)?;
    Ok((sol.s(t), sol.profile(t, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zinc_root() {
        let p = PhysicalParams::zinc();
        let sol = SimilaritySolution::new(&p, p.tm() + 100.0).unwrap();
        assert!((sol.stefan_number - 0.347_950_357_713_846_8).abs() < 1e-15);
        // reference root from a 50-digit solve
        assert!((sol.lambda - 0.395_680_496_705_375).abs() < 1e-13);
    }

    #[test]
    fn small_stefan_number_gives_small_root() {
        let l = similarity_lambda(1e-8).unwrap();
        // λ² ≈ St/2 for small St
        assert!((l - (0.5e-8f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn sqrt_scaling() {
        let p = PhysicalParams::zinc();
        let sol = SimilaritySolution::new(&p, p.tm() + 50.0).unwrap();
        assert!((sol.s(40.0) / sol.s(10.0) - 2.0).abs() < 1e-14);
        assert!((sol.time_at(sol.s(7.0)) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn profile_boundary_values() {
        let p = PhysicalParams::zinc();
        let (s, prof) = run_similarity_oracle(&p, p.tm() + 100.0, 30.0, 50).unwrap();
        assert!(s > 0.0);
        assert!((prof.values()[0] - (p.tm() + 100.0)).abs() < 1e-12);
        assert_eq!(prof.values()[50], p.tm());
        let sol = SimilaritySolution::new(&p, p.tm() + 100.0).unwrap();
        assert!((sol.temperature(s, 30.0) - p.tm()).abs() < 1e-10);
    }

    #[test]
    fn bad_inputs() {
        let p = PhysicalParams::zinc();
        assert!(matches!(
            run_similarity_oracle(&p, p.tm() - 1.0, 1.0, 10),
            Err(StefanError::Oracle(_))
        ));
        assert!(similarity_lambda(0.0).is_err());
        assert!(similarity_lambda(1e300).is_err());
    }
}
