//! Commands behind the `stefan` binary.

// `!(x > 0.0)` rejects NaN along with nonpositive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod csv_out;
pub mod svg;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use stefan_core::sim::{run_experiment, SimilaritySolution};
use stefan_core::verify::{all_pass, Suite};
use stefan_core::{PhysicalParams, Scenario, Trajectory};

use svg::{Plot, Series};

/// Command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Unreadable or invalid scenario, rejected arguments.
    Input(anyhow::Error),
    /// The simulation or output writing failed.
    Runtime(anyhow::Error),
    /// A run finished but a check did not hold.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
            Failure::Verification(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(e) => write!(f, "invalid input: {e:#}"),
            Failure::Runtime(e) => write!(f, "run failed: {e:#}"),
            Failure::Verification(msg) => write!(f, "verification failed: {msg}"),
        }
    }
}

pub type CmdResult<T = ()> = std::result::Result<T, Failure>;

fn runtime(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Runtime(e.into())
}

pub fn scenario_stem(sc: &Scenario) -> String {
    sc.output
        .csv
        .as_deref()
        .and_then(|p| Path::new(p).file_stem())
        .and_then(|s| s.to_str())
        .map(str::to_owned)
        .or_else(|| sc.name.clone())
        .unwrap_or_else(|| "run".into())
}

pub fn write_csv(path: &Path, tr: &Trajectory) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    csv_out::write_trajectory(BufWriter::new(file), tr).with_context(|| format!("writing {}", path.display()))
}

/// The four standard panels: front, input, temperature at `s_0`, estimation errors.
pub fn panels(tr: &Trajectory, tm: f64) -> Vec<(&'static str, Plot)> {
    let t = tr.times();
    let input_label = match tr.kind {
        stefan_core::sim::ActuationKind::Neumann => "q_c [W/m^2]",
        stefan_core::sim::ActuationKind::Dirichlet => "T_c - T_m [K]",
    };
    let mut out = vec![
        (
            "s",
            Plot::new("interface position", "t [s]", "s [m]").with(Series::new("s(t)", &t, &tr.column(|r| r.s))),
        ),
        (
            "input",
            Plot::new("boundary input", "t [s]", input_label).with(Series::new("input", &t, &tr.column(|r| r.input))),
        ),
        (
            "ts0",
            Plot::new("temperature at the initial interface", "t [s]", "T(s0,t) [K]")
                .with(Series::new("T(s0,t)", &t, &tr.column(|r| r.superheat_at_s0 + tm))),
        ),
    ];
    if tr.records.iter().any(|r| r.err_probes.is_some()) {
        let mut plot = Plot::new("estimation error", "t [s]", "T - T_hat [K]");
        for (k, label) in ["x = 0", "x = s/4", "x = s/2"].into_iter().enumerate() {
            let y = tr.column(|r| r.err_probes.map_or(f64::NAN, |p| p[k]));
            plot = plot.with(Series::new(label, &t, &y));
        }
        out.push(("err", plot));
    }
    out
}

pub fn write_svgs(dir: &Path, stem: &str, tr: &Trajectory, tm: f64) -> anyhow::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    for (suffix, plot) in panels(tr, tm) {
        let path = dir.join(format!("{stem}_{suffix}.svg"));
        fs::write(&path, plot.render()).with_context(|| format!("writing {}", path.display()))?;
        written.push(path);
    }
    Ok(written)
}

fn count_summary(counts: [usize; 5]) -> String {
    let names = ["q_pos", "temp_valid", "s_monotone", "s_below_sr", "err_nonpos"];
    let failed: Vec<String> = names
        .iter()
        .zip(counts)
        .filter(|(_, c)| *c > 0)
        .map(|(n, c)| format!("{n} x{c}"))
        .collect();
    if failed.is_empty() {
        "none".into()
    } else {
        failed.join(", ")
    }
}

/// `stefan run`.
pub fn cmd_run(scenario: &Path, out: &Path, strict: bool, svg: bool) -> CmdResult {
    let sc = Scenario::from_path(scenario).map_err(|e| Failure::Input(e.into()))?;
    let ex = sc.build(strict).map_err(|e| Failure::Input(e.into()))?;
    for w in &ex.warnings {
        eprintln!("warning: {w}");
    }
    let tr = run_experiment(&ex).map_err(runtime)?;
    let stem = scenario_stem(&sc);
    let csv_name = sc.output.csv.clone().unwrap_or_else(|| format!("{stem}.csv"));
    let csv_path = out.join(csv_name);
    write_csv(&csv_path, &tr).map_err(runtime)?;
    println!("wrote {}", csv_path.display());
    if svg || sc.output.svg {
        for p in write_svgs(out, &stem, &tr, ex.params.tm()).map_err(runtime)? {
            println!("wrote {}", p.display());
        }
    }
    let last = tr.last();
    let counts = tr.violation_counts();
    println!(
        "{}: {} steps, t = {:.3} s, s = {:.6} m, constraint violations: {}",
        tr.name,
        tr.steps,
        last.t,
        last.s,
        count_summary(counts)
    );
    if strict && counts.iter().any(|&c| c > 0) {
        return Err(Failure::Verification(format!(
            "constraint violations in strict mode: {}",
            count_summary(counts)
        )));
    }
    Ok(())
}

/// `stefan verify`.
pub fn cmd_verify(suite: Suite, mut out: impl Write) -> CmdResult {
    let checks = suite.run().map_err(runtime)?;
    writeln!(out, "verify {}", suite.name()).map_err(runtime)?;
    for c in &checks {
        writeln!(out, "{c}").map_err(runtime)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(out, "{} checks, {failed} failed", checks.len()).map_err(runtime)?;
    if all_pass(&checks) {
        Ok(())
    } else {
        Err(Failure::Verification(format!("{failed} of {} {} checks", checks.len(), suite.name())))
    }
}

/// `stefan oracle`: similarity solution summary followed by the profile as CSV.
pub fn cmd_oracle(preset: &str, tc: f64, t_end: f64, n: usize, mut out: impl Write) -> CmdResult {
    let params = match preset {
        "zinc" => PhysicalParams::zinc(),
        other => return Err(Failure::Input(anyhow!("unknown material preset `{other}`"))),
    };
    if !(t_end > 0.0) {
        return Err(Failure::Input(anyhow!("--t-end must be positive, got {t_end}")));
    }
    if n < 1 {
        return Err(Failure::Input(anyhow!("--n must be at least 1")));
    }
    let sol = SimilaritySolution::new(&params, tc).map_err(|e| Failure::Input(e.into()))?;
    let s = sol.s(t_end);
    let profile = sol.profile(t_end, n);
    let io = |e: io::Error| runtime(e);
    writeln!(out, "# stefan_number = {}", csv_out::number(sol.stefan_number)).map_err(io)?;
    writeln!(out, "# lambda = {}", csv_out::number(sol.lambda)).map_err(io)?;
    writeln!(out, "# s(t_end) = {}", csv_out::number(s)).map_err(io)?;
    writeln!(out, "x,T").map_err(io)?;
    for (i, v) in profile.values().iter().enumerate() {
        let x = s * i as f64 / n as f64;
        writeln!(out, "{},{}", csv_out::number(x), csv_out::number(*v)).map_err(io)?;
    }
    Ok(())
}
