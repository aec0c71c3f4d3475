//! Closed-loop co-simulation of plant, observer and control law.

use super::{
    cfl_limit, to_profile, Actuation, ActuationKind, DtPolicy, Measurement, ObserverCore, PlantCoefficients,
    PlantCore,
};
use crate::controllers::{ControlLaw, Violation};
use crate::diagnostics::{
    constraint_monitor, energy_input_rate, lyapunov_v_eps_from, lyapunov_v_from, lyapunov_v_output, lyapunov_w,
    plant_energy, relative_energy_residual, temperature_tolerance, ConstraintFlags, DiagnosticsRecord,
    LyapunovConstants, MonitorInput,
};
use crate::domain::{linear_observer_init, ObserverState, PlantState, TemperatureProfile};
use crate::error::Result;
use crate::grid::{h1_norm, l2_norm, slope_at_end};
use crate::scenario::{Experiment, Scenario};

/// Sampled history of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub name: String,
    pub kind: ActuationKind,
    pub records: Vec<DiagnosticsRecord>,
    /// First sample time with `|s - s_r| < tol · s_r`, when a tolerance was set.
    pub converged_at: Option<f64>,
    pub steps: usize,
    pub final_state: PlantState,
    pub final_observer: Option<ObserverState>,
    pub warnings: Vec<Violation>,
    /// Temperature undershoot allowance used by the monitor, K.
    pub tol_t: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.t).collect()
    }

    pub fn column(&self, f: impl Fn(&DiagnosticsRecord) -> f64) -> Vec<f64> {
        self.records.iter().map(f).collect()
    }

    /// Number of samples at which each flag failed, in CSV column order.
    pub fn violation_counts(&self) -> [usize; 5] {
        let mut c = [0; 5];
        for r in &self.records {
            let f = r.flags;
            for (slot, ok) in c.iter_mut().zip([f.q_pos, f.temp_valid, f.s_monotone, f.s_below_sr, f.err_nonpos]) {
                if !ok {
                    *slot += 1;
                }
            }
        }
        c
    }

    /// First sample time at which `s >= level`.
    pub fn time_to_reach(&self, level: f64) -> Option<f64> {
        self.records.iter().find(|r| r.s >= level).map(|r| r.t)
    }

    /// First sample time after which `|s - s_r| < tol · s_r` holds for good.
    pub fn settling_time(&self, s_r: f64, tol: f64) -> Option<f64> {
        let mut settled = None;
        for r in &self.records {
            if (r.s - s_r).abs() < tol * s_r {
                settled.get_or_insert(r.t);
            } else {
                settled = None;
            }
        }
        settled
    }

    pub fn last(&self) -> &DiagnosticsRecord {
        self.records.last().expect("a run records at least one sample")
    }
}

/// Parses-validated scenario to trajectory, warnings kept.
pub fn run_scenario(scenario: &Scenario) -> Result<Trajectory> {
    run_experiment(&scenario.build(false)?)
}

struct Lyapunov {
    c: f64,
    lambda: Option<f64>,
    consts: LyapunovConstants,
}

pub fn run_experiment(ex: &Experiment) -> Result<Trajectory> {
    let params = &ex.params;
    let cfg = &ex.config;
    let n = cfg.n;
    let kind = ex.kind;
    let coef = PlantCoefficients::new(params, &ex.perturbation);
    let nominal = PlantCoefficients::nominal(params);

    let mut plant = PlantCore {
        u: ex.initial.superheat(params),
        s: ex.initial.s,
    };
    let mut observer = match ex.observer {
        Some(o) => Some(ObserverCore {
            u_hat: linear_observer_init(o.init.h_hat, ex.initial.s, params.tm(), n)?.superheat(params),
        }),
        None => None,
    };
    let lambda = ex.observer.map(|o| o.lambda).unwrap_or(0.0);

    let s0 = ex.initial.s;
    let tol_t = temperature_tolerance(&plant.u);
    let s_r = ex.setpoint.map(|sp| sp.value());
    let lyap = match (ex.law, ex.setpoint) {
        (ControlLaw::StateFeedback { c, setpoint }, _) => Some(Lyapunov {
            c,
            lambda: None,
            consts: LyapunovConstants::state_feedback(c, setpoint, params),
        }),
        (ControlLaw::OutputFeedback { c, setpoint }, _) => Some(Lyapunov {
            c,
            lambda: Some(lambda),
            consts: LyapunovConstants::output_feedback(c, lambda, setpoint, params),
        }),
        _ => None,
    };

    let e0 = plant_energy(&plant.u, plant.s, coef.alpha, coef.beta, kind);
    let mut input_integral = 0.0;
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut sample_index = 0usize;
    let mut records: Vec<DiagnosticsRecord> = Vec::new();
    let mut converged_at = None;
    let mut last_slack = 0.0;
    let mut scratch = Vec::new();
    let switch = ex.law.switch_time();

    loop {
        let input = ex
            .law
            .evaluate(t, plant.s, &plant.u, observer.as_ref().map(|o| o.u_hat.as_slice()), kind, params)?;
        let next_sample = sample_index as f64 * cfg.sample_every;
        let at_end = t >= cfg.t_end;
        let converged = match (cfg.convergence_tol, s_r) {
            (Some(tol), Some(sr)) => (plant.s - sr).abs() < tol * sr,
            _ => false,
        };
        if t >= next_sample || at_end || converged {
            let sdot = -coef.beta * slope_at_end(&plant.u) / plant.s;
            let energy = plant_energy(&plant.u, plant.s, coef.alpha, coef.beta, kind);
            let err: Option<Vec<f64>> = observer
                .as_ref()
                .map(|o| plant.u.iter().zip(&o.u_hat).map(|(a, b)| a - b).collect());
            let (v, v_eps) = match (&lyap, ex.setpoint) {
                (Some(l), Some(sp)) => {
                    let v = match (&observer, l.lambda) {
                        (Some(o), Some(lam)) => {
                            lyapunov_v_output(&plant.u, &o.u_hat, plant.s, sp, l.c, lam, &l.consts, params)
                        }
                        _ => lyapunov_v_from(&plant.u, plant.s, sp, l.c, &l.consts, params),
                    };
                    let v_eps = if ex.perturbation.is_nominal() {
                        f64::NAN
                    } else {
                        lyapunov_v_eps_from(&plant.u, plant.s, sp, l.c, params, &ex.perturbation)
                    };
                    (v, v_eps)
                }
                _ => (f64::NAN, f64::NAN),
            };
            let w = match &lyap {
                Some(l) => lyapunov_w(v, plant.s, &l.consts),
                None => f64::NAN,
            };
            let flags: ConstraintFlags = constraint_monitor(&MonitorInput {
                input,
                min_superheat: plant.u.iter().cloned().fold(f64::INFINITY, f64::min),
                s: plant.s,
                s_prev: records.last().map(|r| (r.s, last_slack + 1e-15 * plant.s)),
                s_r,
                max_err: err.as_ref().map(|e| e.iter().cloned().fold(f64::NEG_INFINITY, f64::max)),
                tol_t,
            });
            let probe = |u: &[f64], sigma: f64| {
                TemperatureProfile::new(u.to_vec()).expect("finite").interpolate(sigma)
            };
            records.push(DiagnosticsRecord {
                t,
                s: plant.s,
                input,
                sdot,
                l2_u: l2_norm(&plant.u, plant.s),
                h1_u: h1_norm(&plant.u, plant.s),
                h1_err: err.as_ref().map(|e| h1_norm(e, plant.s)),
                v,
                w,
                v_eps,
                energy,
                input_integral,
                energy_residual: relative_energy_residual(e0, energy, input_integral),
                flags,
                superheat_at_s0: probe(&plant.u, s0 / plant.s),
                err_probes: err.as_ref().map(|e| [probe(e, 0.0), probe(e, 0.25), probe(e, 0.5)]),
            });
            while sample_index as f64 * cfg.sample_every <= t {
                sample_index += 1;
            }
            if converged && converged_at.is_none() {
                converged_at = Some(t);
            }
            if at_end || converged {
                break;
            }
        }

        let sdot = -coef.beta * slope_at_end(&plant.u) / plant.s;
        let mut dt = match cfg.dt_policy {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::CflFraction(theta) => {
                let mut limit = cfl_limit(plant.s, sdot, coef.alpha, n);
                if observer.is_some() {
                    limit = limit.min(cfl_limit(plant.s, sdot, nominal.alpha, n));
                }
                theta * limit
            }
        };
        // land exactly on samples, the pulse switch and the horizon
        let mut target = (sample_index as f64 * cfg.sample_every).min(cfg.t_end);
        if let Some(ts) = switch {
            if t < ts {
                target = target.min(ts);
            }
        }
        let clamped = t + dt >= target;
        if clamped {
            dt = target - t;
        }
        if !(dt > 0.0) {
            // rounding left t a hair below the target
            t = target;
            continue;
        }

        let act = Actuation { kind, value: input };
        let stages: [Measurement; 2] = plant.advance(act, &coef, dt, cfg.integrator, &mut scratch)?;
        if let Some(o) = observer.as_mut() {
            o.advance(act, stages, &nominal, lambda, dt, cfg.integrator)?;
        }
        input_integral += energy_input_rate(input, kind, params) * dt;
        last_slack = dt * sdot.abs();
        t = if clamped { target } else { t + dt };
        steps += 1;
    }

    Ok(Trajectory {
        name: ex.name.clone(),
        kind,
        records,
        converged_at,
        steps,
        final_state: PlantState {
            s: plant.s,
            profile: to_profile(&plant.u, params.tm()),
            t,
        },
        final_observer: observer.map(|o| ObserverState {
            profile_hat: to_profile(&o.u_hat, params.tm()),
            t,
        }),
        warnings: ex.warnings.clone(),
        tol_t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::presets;

    #[test]
    fn samples_land_on_grid() {
        let tr = run_scenario(&presets::state_feedback(20, 5.0, 1.0)).unwrap();
        let times = tr.times();
        assert_eq!(times, vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn deterministic() {
        let a = run_scenario(&presets::output_feedback(2e4, 0.001, 20, 3.0, 0.5)).unwrap();
        let b = run_scenario(&presets::output_feedback(2e4, 0.001, 20, 3.0, 0.5)).unwrap();
        assert_eq!(a.records.len(), b.records.len());
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.s.to_bits(), y.s.to_bits());
            assert_eq!(x.input.to_bits(), y.input.to_bits());
        }
    }

    #[test]
    fn zero_input_run_without_superheat_stays_put() {
        let mut sc = presets::state_feedback(16, 2.0, 1.0);
        sc.controller.kind = crate::scenario::ControllerKind::Zero;
        sc.initial.h = Some(0.0);
        let tr = run_scenario(&sc).unwrap();
        assert!(tr.records.iter().all(|r| r.s == 0.01 && r.input == 0.0));
    }
}
