//! Per-sample CSV output.

use std::io::Write;

use stefan_core::{DiagnosticsRecord, Trajectory};

pub const HEADER: [&str; 15] = [
    "t",
    "s",
    "input",
    "sdot",
    "l2_u",
    "h1_u",
    "h1_err",
    "V",
    "W",
    "energy_residual",
    "q_pos",
    "temp_valid",
    "s_monotone",
    "s_below_sr",
    "err_nonpos",
];

/// Nine significant digits.
pub fn number(x: f64) -> String {
    format!("{x:.8e}")
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "1"
    } else {
        "0"
    }
}

pub fn row(r: &DiagnosticsRecord) -> [String; 15] {
    let f = r.flags;
    [
        number(r.t),
        number(r.s),
        number(r.input),
        number(r.sdot),
        number(r.l2_u),
        number(r.h1_u),
        number(r.h1_err.unwrap_or(f64::NAN)),
        number(r.v),
        number(r.w),
        number(r.energy_residual),
        flag(f.q_pos).into(),
        flag(f.temp_valid).into(),
        flag(f.s_monotone).into(),
        flag(f.s_below_sr).into(),
        flag(f.err_nonpos).into(),
    ]
}

pub fn write_trajectory<W: Write>(out: W, tr: &Trajectory) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in &tr.records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(number(0.35), "3.50000000e-1");
        assert_eq!(number(-1234.5678912), "-1.23456789e3");
        assert_eq!(number(f64::NAN), "NaN");
    }
}
