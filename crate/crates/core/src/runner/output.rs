//! CSV and text outputs. Numbers carry 12 significant digits, files use LF
//! line endings and start with a header row.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::sweep::SweepRow;
use crate::engine::FidelityTrace;
use crate::error::{Error, Result};
use crate::register::BasisIndex;
use crate::state::StateVector;

/// Formats like C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..DIGITS).contains(&exp) {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Removes the global phase of `ideal` and `state` by making the amplitude
/// at the largest-magnitude ideal entry real and positive in each.
pub fn gauge_fix(state: &StateVector, ideal: &StateVector) -> Result<(StateVector, StateVector)> {
    if state.dim() != ideal.dim() {
        return Err(Error::DimensionMismatch {
            left: state.dim(),
            right: ideal.dim(),
        });
    }
    let amps = ideal.amplitudes();
    let max = amps.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let Some(m) = amps.iter().position(|c| c.norm() >= max - 1e-12) else {
        return Ok((state.clone(), ideal.clone()));
    };
    let unphase = |c: Complex64| {
        if c.norm() > 0.0 {
            c.conj() / c.norm()
        } else {
            Complex64::new(1.0, 0.0)
        }
    };
    Ok((
        state.clone().scaled(unphase(state[m])),
        ideal.clone().scaled(unphase(ideal[m])),
    ))
}

pub fn amplitudes_csv(state: &StateVector, ideal: &StateVector) -> Result<String> {
    let (s, i) = gauge_fix(state, ideal)?;
    let mut out = String::from("alpha,bitstring,re,im,re_ideal,im_ideal,re_diff,im_diff\n");
    for (alpha, (a, b)) in s.amplitudes().iter().zip(i.amplitudes()).enumerate() {
        let d = a - b;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            alpha,
            BasisIndex(alpha).label(state.n()),
            fmt_sig(a.re),
            fmt_sig(a.im),
            fmt_sig(b.re),
            fmt_sig(b.im),
            fmt_sig(d.re),
            fmt_sig(d.im)
        ));
    }
    Ok(out)
}

pub fn trace_csv(trace: &FidelityTrace) -> String {
    let mut out = String::from("t,F,pulse_index\n");
    for s in &trace.samples {
        out.push_str(&format!("{},{},{}\n", fmt_sig(s.t), fmt_sig(s.fidelity), s.pulse_index));
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("omega,F_fi\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", fmt_sig(r.omega), fmt_sig(r.fidelity)));
    }
    out
}

/// Everything a run may write; absent parts are skipped.
#[derive(Debug, Clone, Default)]
pub struct RunArtifacts {
    /// Final state and its ideal counterpart, for `amplitudes.csv`.
    pub amplitudes: Option<(StateVector, StateVector)>,
    pub trace: Option<FidelityTrace>,
    pub sweep: Option<Vec<SweepRow>>,
    pub report: Option<String>,
}

/// Writes the present artifacts into `dir` (created if needed) and returns
/// the paths written.
pub fn emit_outputs(dir: &Path, artifacts: &RunArtifacts) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut write = |name: &str, body: String| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    if let Some((state, ideal)) = &artifacts.amplitudes {
        write("amplitudes.csv", amplitudes_csv(state, ideal)?)?;
    }
    if let Some(trace) = &artifacts.trace {
        write("fidelity_trace.csv", trace_csv(trace))?;
    }
    if let Some(rows) = &artifacts.sweep {
        write("sweep.csv", sweep_csv(rows))?;
    }
    if let Some(report) = &artifacts.report {
        let mut body = report.replace("\r\n", "\n");
        if !body.ends_with('\n') {
            body.push('\n');
        }
        write("report.txt", body)?;
    }
    Ok(written)
}
