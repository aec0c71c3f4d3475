//! Shared domain types: material constants, plant/observer states and the
//! immobilized grid on which every temperature profile lives.
//!
//! Profiles are sampled on the uniform grid `σ_i = i/N`, `i = 0..=N`, where
//! `σ = x / s(t)` maps the liquid region `[0, s(t)]` onto `[0, 1]`.

use crate::error::{Result, StefanError};

/// Material constants of the melting substance.
///
/// `alpha` (thermal diffusivity) and `beta` (Stefan coefficient) are derived
/// once from the primary constants and never set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    rho: f64,
    cp: f64,
    k: f64,
    dh: f64,
    tm: f64,
    alpha: f64,
    beta: f64,
}

impl PhysicalParams {
    /// Density, kg/m³.
    pub fn rho(&self) -> f64 {
        self.rho
    }
    /// Heat capacity, J/(kg·K).
    pub fn cp(&self) -> f64 {
        self.cp
    }
    /// Thermal conductivity, W/(m·K).
    pub fn k(&self) -> f64 {
        self.k
    }
    /// Latent heat of fusion, J/kg.
    pub fn dh(&self) -> f64 {
        self.dh
    }
    /// Melting temperature, K.
    pub fn tm(&self) -> f64 {
        self.tm
    }
    /// Thermal diffusivity `k/(ρ C_p)`, m²/s.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Stefan coefficient `k/(ρ ΔH*)`, m²/(s·K).
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Zinc strip used throughout the reference experiments.
    pub fn zinc() -> Self {
        derive_params(6570.0, 389.5687, 116.0, 111_961.0, ZINC_MELTING_POINT)
            .expect("zinc constants are positive")
    }
}

/// Melting point of zinc, K.
pub const ZINC_MELTING_POINT: f64 = 692.68;

/// Builds [`PhysicalParams`] from the primary material constants.
pub fn derive_params(rho: f64, cp: f64, k: f64, dh: f64, tm: f64) -> Result<PhysicalParams> {
    for (name, value) in [("rho", rho), ("cp", cp), ("k", k), ("dh", dh), ("tm", tm)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(StefanError::Parameter {
                name,
                value,
                reason: "must be finite and positive",
            });
        }
    }
    Ok(PhysicalParams {
        rho,
        cp,
        k,
        dh,
        tm,
        alpha: k / (rho * cp),
        beta: k / (rho * dh),
    })
}

/// Relative mismatch of the plant's diffusivity and latent heat.
///
/// The perturbed plant diffuses with `α(1+eps1)` and its interface moves with
/// `β(1+eps2)`; the controller keeps using the nominal values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    pub eps1: f64,
    pub eps2: f64,
}

impl Perturbation {
    pub const NONE: Perturbation = Perturbation { eps1: 0.0, eps2: 0.0 };

    pub fn new(eps1: f64, eps2: f64) -> Result<Self> {
        let p = Perturbation { eps1, eps2 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [("eps1", self.eps1), ("eps2", self.eps2)] {
            if !(value > -1.0) || !value.is_finite() {
                return Err(StefanError::Parameter {
                    name,
                    value,
                    reason: "perturbation must exceed -1",
                });
            }
        }
        Ok(())
    }

    pub fn is_nominal(&self) -> bool {
        self.eps1 == 0.0 && self.eps2 == 0.0
    }

    /// Diffusivity seen by the plant.
    pub fn alpha(&self, params: &PhysicalParams) -> f64 {
        params.alpha() * (1.0 + self.eps1)
    }

    /// Stefan coefficient seen by the plant.
    pub fn beta(&self, params: &PhysicalParams) -> f64 {
        params.beta() * (1.0 + self.eps2)
    }
}

/// Desired interface position, m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Setpoint(f64);

impl Setpoint {
    pub fn new(s_r: f64) -> Result<Self> {
        if !(s_r > 0.0) || !s_r.is_finite() {
            return Err(StefanError::Parameter {
                name: "s_r",
                value: s_r,
                reason: "setpoint must be positive",
            });
        }
        Ok(Setpoint(s_r))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Absolute temperatures (K) on the uniform immobilized grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TemperatureProfile {
    values: Vec<f64>,
}

impl TemperatureProfile {
    /// Wraps node values `T(σ_0) .. T(σ_N)`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(StefanError::State(format!(
                "profile needs at least 3 nodes, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(StefanError::State(format!("non-finite temperature at node {i}")));
        }
        Ok(TemperatureProfile { values })
    }

    /// Uniform profile at `t` with `n` intervals.
    pub fn uniform(t: f64, n: usize) -> Self {
        TemperatureProfile {
            values: vec![t; n + 1],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Number of grid intervals `N`.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    /// Superheat `T - tm` at every node.
    pub fn superheat(&self, tm: f64) -> Vec<f64> {
        self.values.iter().map(|t| t - tm).collect()
    }

    /// Linear interpolation at `σ ∈ [0, 1]`.
    pub fn interpolate(&self, sigma: f64) -> f64 {
        let n = self.n();
        let pos = sigma.clamp(0.0, 1.0) * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
    }
}

/// Interface position, liquid temperature profile and time.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantState {
    pub s: f64,
    pub profile: TemperatureProfile,
    pub t: f64,
}

impl PlantState {
    /// Interface reference error `X = s - s_r`.
    pub fn interface_error(&self, setpoint: Setpoint) -> f64 {
        self.s - setpoint.value()
    }

    /// Superheat `u = T - T_m` on the grid.
    pub fn superheat(&self, params: &PhysicalParams) -> Vec<f64> {
        self.profile.superheat(params.tm())
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }

    /// Checks `s > 0` and the isothermal interface condition.
    pub fn validate(&self, params: &PhysicalParams) -> Result<()> {
        if !(self.s > 0.0) || !self.s.is_finite() {
            return Err(StefanError::State(format!(
                "interface position must be positive, got {}",
                self.s
            )));
        }
        let last = *self.profile.values().last().expect("nonempty");
        if last != params.tm() {
            return Err(StefanError::State(format!(
                "interface temperature {last} differs from melting point {}",
                params.tm()
            )));
        }
        Ok(())
    }
}

/// Estimated temperature profile. Shares the measured `s(t)` of the plant.
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverState {
    pub profile_hat: TemperatureProfile,
    pub t: f64,
}

impl ObserverState {
    /// Estimated superheat `û = T̂ - T_m`.
    pub fn superheat(&self, params: &PhysicalParams) -> Vec<f64> {
        self.profile_hat.superheat(params.tm())
    }
}

/// Initial profile `T_0(x) = T_m + H (s_0 - x)` on `n` intervals.
pub fn linear_initial_profile(h: f64, s0: f64, tm: f64, n: usize) -> Result<PlantState> {
    if !(h >= 0.0) || !h.is_finite() {
        return Err(StefanError::Parameter {
            name: "H",
            value: h,
            reason: "initial slope must be nonnegative",
        });
    }
    if !(s0 > 0.0) || !s0.is_finite() {
        return Err(StefanError::Parameter {
            name: "s0",
            value: s0,
            reason: "initial interface position must be positive",
        });
    }
    if n < 2 {
        return Err(StefanError::Parameter {
            name: "n",
            value: n as f64,
            reason: "need at least two grid intervals",
        });
    }
    let values = (0..=n)
        .map(|i| {
            let sigma = i as f64 / n as f64;
            tm + h * s0 * (1.0 - sigma)
        })
        .collect::<Vec<_>>();
    let mut profile = TemperatureProfile::new(values)?;
    // exact pin, independent of rounding in the formula
    profile.values_mut()[n] = tm;
    Ok(PlantState { s: s0, profile, t: 0.0 })
}

/// Initial estimate `T̂_0(x) = T_m + Ĥ (s_0 - x)` on the plant grid.
pub fn linear_observer_init(h_hat: f64, s0: f64, tm: f64, n: usize) -> Result<ObserverState> {
    let state = linear_initial_profile(h_hat, s0, tm, n)?;
    Ok(ObserverState {
        profile_hat: state.profile,
        t: 0.0,
    })
}
