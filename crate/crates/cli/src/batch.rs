//! Built-in experiment suites.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, Context};
use rayon::prelude::*;
use stefan_core::scenario::presets;
use stefan_core::{run_scenario, Scenario, Trajectory};

use crate::csv_out::number;
use crate::{runtime, write_csv, CmdResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BatchSuite {
    /// Pulse against backstepping, nominal and perturbed.
    Fig3,
    /// Constraint traces of the backstepping loop, nominal and perturbed.
    Fig4,
    /// Output feedback with a validated observer setup.
    Fig5,
}

impl FromStr for BatchSuite {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        match s {
            "fig3" => Ok(BatchSuite::Fig3),
            "fig4" => Ok(BatchSuite::Fig4),
            "fig5" => Ok(BatchSuite::Fig5),
            _ => Err(anyhow!("unknown suite `{s}` (expected fig3, fig4 or fig5)")),
        }
    }
}

const N: usize = 100;
const EPS: (f64, f64) = (0.3, -0.2);

fn named(mut sc: Scenario, name: &str) -> Scenario {
    sc.name = Some(name.into());
    sc.output.csv = Some(format!("{name}.csv"));
    sc
}

impl BatchSuite {
    pub fn scenarios(self) -> Vec<Scenario> {
        let (t_end, every) = (12000.0, 10.0);
        match self {
            BatchSuite::Fig3 => vec![
                named(presets::pulse(N, t_end, every), "pulse_nominal"),
                named(presets::state_feedback(N, t_end, every), "backstepping_nominal"),
                named(presets::pulse_perturbed(EPS.0, EPS.1, N, t_end, every), "pulse_perturbed"),
                named(
                    presets::state_feedback_perturbed(EPS.0, EPS.1, N, t_end, every),
                    "backstepping_perturbed",
                ),
            ],
            BatchSuite::Fig4 => vec![
                named(presets::state_feedback(N, t_end, every), "backstepping_nominal"),
                named(
                    presets::state_feedback_perturbed(EPS.0, EPS.1, N, t_end, every),
                    "backstepping_perturbed",
                ),
            ],
            BatchSuite::Fig5 => vec![named(
                presets::output_feedback(2.0 * presets::H, presets::LAMBDA, N, 20000.0, every),
                "output_feedback",
            )],
        }
    }
}

/// One line of the suite summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub name: String,
    pub final_s: f64,
    pub t95: Option<f64>,
    pub settling_1pct: Option<f64>,
    pub min_input: f64,
    pub violations: [usize; 5],
    pub max_energy_residual: f64,
}

impl SummaryRow {
    pub fn from_trajectory(tr: &Trajectory) -> Self {
        let s_r = presets::S_R;
        SummaryRow {
            name: tr.name.clone(),
            final_s: tr.last().s,
            t95: tr.time_to_reach(0.95 * s_r),
            settling_1pct: tr.settling_time(s_r, 0.01),
            min_input: tr.records.iter().map(|r| r.input).fold(f64::INFINITY, f64::min),
            violations: tr.violation_counts(),
            max_energy_residual: tr.records.iter().map(|r| r.energy_residual.abs()).fold(0.0, f64::max),
        }
    }

    pub fn err_nonpos_all(&self) -> bool {
        self.violations[4] == 0
    }
}

pub const SUMMARY_HEADER: [&str; 13] = [
    "name",
    "final_s",
    "t95",
    "settling_1pct",
    "min_input",
    "q_pos_violations",
    "temp_valid_violations",
    "s_monotone_violations",
    "s_below_sr_violations",
    "err_nonpos_violations",
    "err_nonpos_all",
    "max_energy_residual",
    "converged",
];

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NaN".into(), number)
}

fn summary_record(r: &SummaryRow) -> Vec<String> {
    let mut rec = vec![r.name.clone(), number(r.final_s), opt(r.t95), opt(r.settling_1pct), number(r.min_input)];
    rec.extend(r.violations.iter().map(|v| v.to_string()));
    rec.push(if r.err_nonpos_all() { "1" } else { "0" }.into());
    rec.push(number(r.max_energy_residual));
    rec.push(if r.settling_1pct.is_some() { "1" } else { "0" }.into());
    rec
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .with_context(|| format!("creating {}", path.display()))?;
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record(summary_record(r))?;
    }
    w.flush()?;
    Ok(())
}

/// Thread cap from `STEFAN_THREADS`; unset means rayon's default.
pub fn thread_cap(value: Option<&str>) -> anyhow::Result<Option<usize>> {
    match value {
        None => Ok(None),
        Some(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(anyhow!("STEFAN_THREADS must be a positive integer, got `{v}`")),
        },
    }
}

/// `stefan batch`.
pub fn cmd_batch(suite: BatchSuite, out: &Path, threads: Option<usize>, mut log: impl Write) -> CmdResult {
    fs::create_dir_all(out)
        .with_context(|| format!("creating {}", out.display()))
        .map_err(runtime)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(runtime)?;
    let scenarios = suite.scenarios();
    let results: Vec<anyhow::Result<SummaryRow>> = pool.install(|| {
        scenarios
            .par_iter()
            .map(|sc| {
                let tr = run_scenario(sc)?;
                write_csv(&out.join(sc.output.csv.as_deref().unwrap_or("run.csv")), &tr)?;
                Ok(SummaryRow::from_trajectory(&tr))
            })
            .collect()
    });
    let rows = results.into_iter().collect::<anyhow::Result<Vec<_>>>().map_err(runtime)?;
    let summary = out.join("summary.csv");
    write_summary(&summary, &rows).map_err(runtime)?;

    let io = |e: std::io::Error| Failure::Runtime(e.into());
    writeln!(
        log,
        "{:<24} {:>10} {:>10} {:>10} {:>12}  violations q/T/mono/below/err",
        "run", "final s", "t95", "settle 1%", "min input"
    )
    .map_err(io)?;
    for r in &rows {
        let t = |x: Option<f64>| x.map_or_else(|| "-".into(), |v| format!("{v:.0}"));
        writeln!(
            log,
            "{:<24} {:>10.6} {:>10} {:>10} {:>12.4e}  {:?}",
            r.name,
            r.final_s,
            t(r.t95),
            t(r.settling_1pct),
            r.min_input,
            r.violations
        )
        .map_err(io)?;
    }
    writeln!(log, "wrote {}", summary.display()).map_err(io)?;
    Ok(())
}
