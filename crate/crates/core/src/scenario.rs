//! JSON scenario description and its validated, ready-to-run form.

use crate::controllers::{
    delta_e_dirichlet, delta_e_neumann, dirichlet_robust_gain_bound, pulse_window_dirichlet,
    pulse_window_neumann, robustness_region_check, validate_gain_dirichlet, validate_observer_setup,
    validate_setpoint_dirichlet, validate_setpoint_neumann, ControlLaw, ObserverInit, Violation,
};
use crate::domain::{derive_params, linear_initial_profile, PhysicalParams, PlantState, Perturbation, Setpoint};
use crate::error::{Result, StefanError};
use crate::sim::{ActuationKind, DtPolicy, Integrator, SimConfig, SimilaritySolution};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MaterialSpec {
    /// Named preset; only `"zinc"` is known.
    Preset(String),
    Custom(MaterialConstants),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConstants {
    pub rho: f64,
    pub cp: f64,
    pub k: f64,
    pub dh: f64,
    pub tm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationSpec {
    #[serde(default)]
    pub eps1: f64,
    #[serde(default)]
    pub eps2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialKind {
    /// `T_0 = T_m + H(s_0 - x)`.
    #[default]
    Linear,
    /// Exact similarity profile for boundary superheat `superheat`, taken at
    /// the instant its front sits at `s_0`.
    Similarity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    #[serde(default)]
    pub profile: InitialKind,
    pub s0: f64,
    /// Initial slope, K/m (linear profile).
    pub h: Option<f64>,
    /// Boundary superheat, K (similarity profile).
    pub superheat: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControllerKind {
    Zero,
    Constant,
    Pulse,
    StateFeedback,
    OutputFeedback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControllerSpec {
    pub kind: ControllerKind,
    pub actuation: ActuationKind,
    /// Control gain, 1/s (feedback laws).
    pub c: Option<f64>,
    /// Setpoint, m (required by pulse and feedback laws).
    pub s_r: Option<f64>,
    /// Pulse length, s; the amplitude then follows from the energy deficit.
    pub window: Option<f64>,
    /// Pulse amplitude, W/m² or K; the length then follows.
    pub amplitude: Option<f64>,
    /// Command of the constant law.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObserverSpec {
    #[serde(default = "default_true")]
    pub enabled: bool,
    pub lambda: f64,
    pub h_hat: f64,
    pub h_l: Option<f64>,
    pub h_u: Option<f64>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSpec {
    pub n: usize,
    pub cfl_fraction: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub convergence_tol: Option<f64>,
    #[serde(default)]
    pub integrator: Integrator,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub csv: Option<String>,
    #[serde(default)]
    pub svg: bool,
    pub sample_every: f64,
}

/// A complete experiment as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub material: MaterialSpec,
    #[serde(default)]
    pub perturbation: PerturbationSpec,
    pub initial: InitialSpec,
    pub controller: ControllerSpec,
    #[serde(default)]
    pub observer: Option<ObserverSpec>,
    pub sim: SimSpec,
    pub output: OutputSpec,
}

/// Observer gain and initial estimate of a validated experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObserverSetup {
    pub lambda: f64,
    pub init: ObserverInit,
}

/// Validated scenario, ready for the simulator.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub params: PhysicalParams,
    pub perturbation: Perturbation,
    pub initial: PlantState,
    /// Initial slope of a linear profile.
    pub h: Option<f64>,
    pub kind: ActuationKind,
    pub law: ControlLaw,
    pub setpoint: Option<Setpoint>,
    pub observer: Option<ObserverSetup>,
    pub config: SimConfig,
    /// Restriction violations found at setup; fatal only in strict mode.
    pub warnings: Vec<Violation>,
    /// Similarity-solution time that corresponds to `t = 0`.
    pub similarity: Option<(SimilaritySolution, f64)>,
}

fn missing(field: &str, why: &str) -> StefanError {
    StefanError::Scenario(format!("missing field `{field}`: {why}"))
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| StefanError::Scenario(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| StefanError::Scenario(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            StefanError::Scenario(msg) => StefanError::Scenario(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn params(&self) -> Result<PhysicalParams> {
        match &self.material {
            MaterialSpec::Preset(name) if name == "zinc" => Ok(PhysicalParams::zinc()),
            MaterialSpec::Preset(name) => Err(StefanError::Scenario(format!(
                "unknown material preset `{name}` (known: zinc)"
            ))),
            MaterialSpec::Custom(m) => derive_params(m.rho, m.cp, m.k, m.dh, m.tm),
        }
    }

    /// Checks every field and restriction. Violated restrictions become
    /// warnings, or errors when `strict`.
    pub fn build(&self, strict: bool) -> Result<Experiment> {
        let params = self.params()?;
        let perturbation = Perturbation::new(self.perturbation.eps1, self.perturbation.eps2)?;
        let n = self.sim.n;

        let dt_policy = match (self.sim.dt, self.sim.cfl_fraction) {
            (Some(_), Some(_)) => {
                return Err(StefanError::Scenario(
                    "`sim.dt` and `sim.cfl_fraction` are mutually exclusive".into(),
                ))
            }
            (Some(dt), None) => DtPolicy::Fixed(dt),
            (None, theta) => DtPolicy::CflFraction(theta.unwrap_or(0.4)),
        };
        let config = SimConfig {
            n,
            dt_policy,
            t_end: self.sim.t_end,
            sample_every: self.output.sample_every,
            integrator: self.sim.integrator,
            convergence_tol: self.sim.convergence_tol,
        };
        config.validate()?;

        let init = &self.initial;
        let (initial, h, similarity) = match init.profile {
            InitialKind::Linear => {
                let h = init
                    .h
                    .ok_or_else(|| missing("initial.h", "the linear profile needs its slope"))?;
                (linear_initial_profile(h, init.s0, params.tm(), n)?, Some(h), None)
            }
            InitialKind::Similarity => {
                let superheat = init
                    .superheat
                    .ok_or_else(|| missing("initial.superheat", "the similarity profile needs it"))?;
                if !(init.s0 > 0.0) {
                    return Err(StefanError::Parameter {
                        name: "s0",
                        value: init.s0,
                        reason: "initial interface position must be positive",
                    });
                }
                let sol = SimilaritySolution::new(&params, params.tm() + superheat)?;
                let t0 = sol.time_at(init.s0);
                let state = PlantState {
                    s: init.s0,
                    profile: sol.profile(t0, n),
                    t: 0.0,
                };
                (state, None, Some((sol, t0)))
            }
        };

        let ctl = &self.controller;
        let kind = ctl.actuation;
        let setpoint = ctl.s_r.map(Setpoint::new).transpose()?;
        let need_setpoint = || setpoint.ok_or_else(|| missing("controller.s_r", "required by this controller"));
        let need_gain = || {
            let c = ctl.c.ok_or_else(|| missing("controller.c", "required by feedback laws"))?;
            if !(c > 0.0) || !c.is_finite() {
                return Err(StefanError::Parameter {
                    name: "c",
                    value: c,
                    reason: "gain must be positive",
                });
            }
            Ok(c)
        };

        let mut warnings = Vec::new();
        let law = match ctl.kind {
            ControllerKind::Zero => ControlLaw::Zero,
            ControllerKind::Constant => ControlLaw::Constant(
                ctl.value
                    .ok_or_else(|| missing("controller.value", "the constant law needs its command"))?,
            ),
            ControllerKind::Pulse => {
                let sp = need_setpoint()?;
                let delta_e = match kind {
                    ActuationKind::Neumann => delta_e_neumann(&initial, sp, &params),
                    ActuationKind::Dirichlet => delta_e_dirichlet(&initial, sp, &params),
                };
                if !(delta_e > 0.0) {
                    return Err(StefanError::Infeasible(format!(
                        "energy deficit {delta_e:.6e} is not positive for s_r = {}",
                        sp.value()
                    )));
                }
                // amplitude and window are tied through the energy deficit
                let energy = match kind {
                    ActuationKind::Neumann => params.k() * delta_e,
                    ActuationKind::Dirichlet => delta_e,
                };
                let (amplitude, window) = match (ctl.amplitude, ctl.window) {
                    (Some(_), Some(_)) => {
                        return Err(StefanError::Scenario(
                            "give either `controller.amplitude` or `controller.window`, not both".into(),
                        ))
                    }
                    (Some(a), None) if a > 0.0 => {
                        let w = match kind {
                            ActuationKind::Neumann => pulse_window_neumann(delta_e, a, params.k()),
                            ActuationKind::Dirichlet => pulse_window_dirichlet(delta_e, a),
                        };
                        (a, w)
                    }
                    (None, Some(w)) if w > 0.0 => (energy / w, w),
                    _ => {
                        return Err(missing(
                            "controller.window",
                            "the pulse needs a positive window or amplitude",
                        ))
                    }
                };
                ControlLaw::Pulse { amplitude, window }
            }
            ControllerKind::StateFeedback => ControlLaw::StateFeedback {
                c: need_gain()?,
                setpoint: need_setpoint()?,
            },
            ControllerKind::OutputFeedback => ControlLaw::OutputFeedback {
                c: need_gain()?,
                setpoint: need_setpoint()?,
            },
        };

        if let Some(sp) = setpoint {
            match kind {
                ActuationKind::Neumann => {
                    let b = validate_setpoint_neumann(&initial, sp, &params);
                    if !b.ok {
                        warnings.push(Violation {
                            rule: "setpoint",
                            margin: b.margin,
                            detail: format!("need s_r > {:.6e}", b.rhs),
                        });
                    }
                }
                ActuationKind::Dirichlet => {
                    let d = validate_setpoint_dirichlet(&initial, sp, &params);
                    if !d.ok {
                        warnings.push(Violation {
                            rule: "setpoint",
                            margin: d.margin,
                            detail: format!("need s_r > {:.6e}", d.binding),
                        });
                    }
                }
            }
            if let Some(c) = law.gain() {
                if kind == ActuationKind::Dirichlet {
                    let g = validate_gain_dirichlet(c, sp, &params);
                    if !g.ok {
                        warnings.push(Violation {
                            rule: "gain",
                            margin: g.margin,
                            detail: format!("need c <= {:.6e}", g.rhs),
                        });
                    }
                }
                if !perturbation.is_nominal() {
                    let (e1, e2) = (perturbation.eps1, perturbation.eps2);
                    match kind {
                        ActuationKind::Neumann => {
                            let r = robustness_region_check(e1, e2, c, sp, &params);
                            if !r.inside {
                                warnings.push(Violation {
                                    rule: "robustness",
                                    margin: (e2 - r.lower).min(r.upper - e2),
                                    detail: format!(
                                        "({e1}, {e2}) outside [{:.4}, {:.4}] for G = {:.4}",
                                        r.lower, r.upper, r.g
                                    ),
                                });
                            }
                        }
                        ActuationKind::Dirichlet => match dirichlet_robust_gain_bound(e1, e2, sp, &params) {
                            Ok(bound) if c >= bound => warnings.push(Violation {
                                rule: "robustness",
                                margin: bound - c,
                                detail: format!("need c < {bound:.6e} for ({e1}, {e2})"),
                            }),
                            Ok(_) => {}
                            Err(e) => warnings.push(Violation {
                                rule: "robustness",
                                margin: e2 - e1,
                                detail: e.to_string(),
                            }),
                        },
                    }
                }
            }
        }

        let observer = match self.observer {
            Some(o) if o.enabled => {
                let h = h.ok_or_else(|| {
                    StefanError::Scenario("the observer needs a linear initial profile".into())
                })?;
                if !(o.lambda >= 0.0) || !o.lambda.is_finite() {
                    return Err(StefanError::Parameter {
                        name: "lambda",
                        value: o.lambda,
                        reason: "observer gain must be nonnegative",
                    });
                }
                let init = ObserverInit {
                    h_hat: o.h_hat,
                    h_l: o.h_l.unwrap_or(o.h_hat),
                    h_u: o.h_u.unwrap_or(o.h_hat),
                };
                if let Some(sp) = setpoint {
                    let report = validate_observer_setup(init, h, o.lambda, initial.s, sp, &params, kind);
                    warnings.extend(report.violations);
                }
                Some(ObserverSetup {
                    lambda: o.lambda,
                    init,
                })
            }
            _ => None,
        };
        if matches!(law, ControlLaw::OutputFeedback { .. }) && observer.is_none() {
            return Err(StefanError::Scenario(
                "output feedback needs an enabled `observer` section".into(),
            ));
        }

        if strict && !warnings.is_empty() {
            let list: Vec<String> = warnings.iter().map(|w| w.to_string()).collect();
            return Err(StefanError::Scenario(format!(
                "strict mode: {} restriction(s) violated: {}",
                list.len(),
                list.join("; ")
            )));
        }

        Ok(Experiment {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            params,
            perturbation,
            initial,
            h,
            kind,
            law,
            setpoint,
            observer,
            config,
            warnings,
            similarity,
        })
    }
}

/// Built-in scenarios for the reference zinc experiments.
pub mod presets {
    use super::*;

    pub const S0: f64 = 0.01;
    pub const S_R: f64 = 0.35;
    pub const H: f64 = 1e4;
    pub const C: f64 = 0.001;
    /// Dirichlet gain inside the gain restriction for `s_r = 0.35`.
    pub const C_DIRICHLET: f64 = 4e-5;
    pub const PULSE_WINDOW: f64 = 3000.0;
    pub const LAMBDA: f64 = 0.001;

    fn base(name: &str, controller: ControllerSpec, n: usize, t_end: f64, sample_every: f64) -> Scenario {
        Scenario {
            name: Some(name.into()),
            material: MaterialSpec::Preset("zinc".into()),
            perturbation: PerturbationSpec::default(),
            initial: InitialSpec {
                profile: InitialKind::Linear,
                s0: S0,
                h: Some(H),
                superheat: None,
            },
            controller,
            observer: None,
            sim: SimSpec {
                n,
                cfl_fraction: Some(0.4),
                dt: None,
                t_end,
                convergence_tol: None,
                integrator: Integrator::Euler,
            },
            output: OutputSpec {
                csv: Some(format!("{name}.csv")),
                svg: false,
                sample_every,
            },
        }
    }

    fn feedback(kind: ControllerKind, actuation: ActuationKind, c: f64) -> ControllerSpec {
        ControllerSpec {
            kind,
            actuation,
            c: Some(c),
            s_r: Some(S_R),
            window: None,
            amplitude: None,
            value: None,
        }
    }

    /// Neumann state feedback, `c = 0.001`.
    pub fn state_feedback(n: usize, t_end: f64, sample_every: f64) -> Scenario {
        base(
            "state_feedback",
            feedback(ControllerKind::StateFeedback, ActuationKind::Neumann, C),
            n,
            t_end,
            sample_every,
        )
    }

    /// Neumann state feedback on the perturbed plant.
    pub fn state_feedback_perturbed(eps1: f64, eps2: f64, n: usize, t_end: f64, sample_every: f64) -> Scenario {
        let mut s = state_feedback(n, t_end, sample_every);
        s.name = Some("state_feedback_perturbed".into());
        s.output.csv = Some("state_feedback_perturbed.csv".into());
        s.perturbation = PerturbationSpec { eps1, eps2 };
        s
    }

    /// Fifty-minute open-loop heat pulse carrying the energy deficit.
    pub fn pulse(n: usize, t_end: f64, sample_every: f64) -> Scenario {
        let ctl = ControllerSpec {
            kind: ControllerKind::Pulse,
            actuation: ActuationKind::Neumann,
            c: None,
            s_r: Some(S_R),
            window: Some(PULSE_WINDOW),
            amplitude: None,
            value: None,
        };
        base("pulse", ctl, n, t_end, sample_every)
    }

    pub fn pulse_perturbed(eps1: f64, eps2: f64, n: usize, t_end: f64, sample_every: f64) -> Scenario {
        let mut s = pulse(n, t_end, sample_every);
        s.name = Some("pulse_perturbed".into());
        s.output.csv = Some("pulse_perturbed.csv".into());
        s.perturbation = PerturbationSpec { eps1, eps2 };
        s
    }

    /// Boundary-temperature state feedback with a gain inside its restriction.
    pub fn dirichlet_state_feedback(n: usize, t_end: f64, sample_every: f64) -> Scenario {
        base(
            "dirichlet_state_feedback",
            feedback(ControllerKind::StateFeedback, ActuationKind::Dirichlet, C_DIRICHLET),
            n,
            t_end,
            sample_every,
        )
    }

    /// Output feedback with the estimate initialized at slope `h_hat`.
    pub fn output_feedback(h_hat: f64, lambda: f64, n: usize, t_end: f64, sample_every: f64) -> Scenario {
        let mut s = base(
            "output_feedback",
            feedback(ControllerKind::OutputFeedback, ActuationKind::Neumann, C),
            n,
            t_end,
            sample_every,
        );
        s.observer = Some(ObserverSpec {
            enabled: true,
            lambda,
            h_hat,
            h_l: None,
            h_u: None,
        });
        s
    }

    /// Constant boundary superheat starting from the exact similarity profile.
    pub fn similarity(superheat: f64, n: usize, t_end: f64, sample_every: f64) -> Scenario {
        let ctl = ControllerSpec {
            kind: ControllerKind::Constant,
            actuation: ActuationKind::Dirichlet,
            c: None,
            s_r: None,
            window: None,
            amplitude: None,
            value: Some(superheat),
        };
        let mut s = base("similarity", ctl, n, t_end, sample_every);
        s.initial = InitialSpec {
            profile: InitialKind::Similarity,
            s0: S0,
            h: None,
            superheat: Some(superheat),
        };
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SF: &str = r#"{
        "material": "zinc",
        "initial": {"s0": 0.01, "h": 10000},
        "controller": {"kind": "state-feedback", "actuation": "neumann", "c": 0.001, "s_r": 0.35},
        "sim": {"n": 100, "t_end": 100},
        "output": {"sample_every": 10}
    }"#;

    #[test]
    fn parses_minimal_state_feedback() {
        let sc = Scenario::from_json(SF).unwrap();
        let ex = sc.build(true).unwrap();
        assert!((ex.params.alpha() - 4.5322e-5).abs() < 1e-9);
        assert_eq!(ex.config.dt_policy, DtPolicy::CflFraction(0.4));
        assert!(ex.warnings.is_empty());
    }

    #[test]
    fn missing_setpoint_names_the_field() {
        let text = SF.replace(r#", "s_r": 0.35"#, "");
        let err = Scenario::from_json(&text).unwrap().build(false).unwrap_err();
        assert!(err.to_string().contains("controller.s_r"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = SF.replace(r#""n": 100"#, r#""n": 100, "nn": 3"#);
        let err = Scenario::from_json(&text).unwrap_err();
        assert!(err.to_string().contains("nn"), "{err}");
    }

    #[test]
    fn eps2_minus_one_rejected() {
        let text = SF.replace(r#""material": "zinc","#, r#""material": "zinc", "perturbation": {"eps1": 0, "eps2": -1.0},"#);
        let err = Scenario::from_json(&text).unwrap().build(false).unwrap_err();
        assert!(matches!(err, StefanError::Parameter { name: "eps2", .. }));
    }

    #[test]
    fn presets_round_trip_through_json() {
        let sc = presets::output_feedback(1000.0, 0.001, 50, 10.0, 1.0);
        let back = Scenario::from_json(&sc.to_json()).unwrap();
        assert_eq!(sc, back);
        // printed observer values violate the bracket and warn
        let ex = back.build(false).unwrap();
        assert!(ex.warnings.iter().any(|w| w.rule == "bracket"));
        assert!(back.build(true).is_err());
    }

    #[test]
    fn perturbed_pair_warns_outside_region() {
        let ex = presets::state_feedback_perturbed(0.3, -0.2, 50, 10.0, 1.0).build(false).unwrap();
        assert!(ex.warnings.iter().any(|w| w.rule == "robustness"));
    }

    #[test]
    fn pulse_amplitude_from_window() {
        let ex = presets::pulse(100, 10.0, 1.0).build(true).unwrap();
        match ex.law {
            ControlLaw::Pulse { amplitude, window } => {
                assert_eq!(window, 3000.0);
                assert!((amplitude - 8.294e4).abs() < 50.0, "{amplitude}");
            }
            other => panic!("unexpected law {other:?}"),
        }
    }

    #[test]
    fn similarity_initial_state() {
        let ex = presets::similarity(100.0, 50, 10.0, 1.0).build(true).unwrap();
        let (sol, t0) = ex.similarity.unwrap();
        assert!((sol.s(t0) - 0.01).abs() < 1e-15);
        assert!((t0 - 3.52).abs() < 0.01, "{t0}");
    }
}
