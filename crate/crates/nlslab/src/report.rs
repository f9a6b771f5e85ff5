//! Deterministic emission of run artifacts: the observables CSV, the run
//! manifest, and verification reports in text and CSV form.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::functionals::Observables;
use crate::verifier::SuiteReport;

/// Fixed column order of the observables CSV.
pub const CSV_HEADER: &str = "t,mass,energy,h,m1,grad_sq,linf,lalpha2,xnorm_sq,pc_norm,\
                              boundary_frac,hi_spec_frac,forward_dist,pulled_dist";

fn num(x: f64) -> String {
    // 17 significant digits: enough to reproduce any binary64 exactly
    format!("{x:.16e}")
}

/// One CSV row; the distance cells stay empty until an extraction exists.
pub fn csv_row(o: &Observables, distances: Option<(f64, f64)>) -> String {
    let tail = match distances {
        Some((forward, pulled)) => format!("{},{}", num(forward), num(pulled)),
        None => ",".to_string(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        num(o.t),
        num(o.mass),
        num(o.energy),
        num(o.h),
        num(o.m1),
        num(o.grad_sq),
        num(o.linf),
        num(o.lalpha2),
        num(o.xnorm_sq),
        num(o.pc_norm),
        num(o.boundary_frac),
        num(o.hi_spec_frac),
        tail,
    )
}

/// Write the observables series. `distances` holds (t, forward, pulled)
/// rows at whatever cadence they were computed; rows whose time matches a
/// series record fill that record's distance cells. A run that aborted
/// keeps every record produced so far plus a trailing marker row.
pub fn write_observables_csv(
    path: &Path,
    series: &[Observables],
    distances: &[(f64, f64, f64)],
    abort: Option<&str>,
) -> Result<()> {
    let mut out = String::with_capacity(64 * (series.len() + 2));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for o in series {
        let dist = distances
            .iter()
            .find(|&&(t, _, _)| (t - o.t).abs() <= 1e-9 * t.abs().max(1.0))
            .map(|&(_, f, p)| (f, p));
        out.push_str(&csv_row(o, dist));
        out.push('\n');
    }
    if let Some(reason) = abort {
        out.push_str(&format!("# aborted: {reason}\n"));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())?;
    Ok(())
}

/// Run manifest: tool version, wall time, outcome, and a config echo in
/// the config syntax itself, so the manifest alone reproduces the run.
pub fn write_manifest(
    path: &Path,
    cfg: &ExperimentConfig,
    wall_seconds: f64,
    outcome: &str,
) -> Result<()> {
    let text = format!(
        "# nlslab {} run manifest\n# wall_time_seconds = {:.3}\n# outcome = {}\n{}",
        env!("CARGO_PKG_VERSION"),
        wall_seconds,
        outcome,
        cfg.to_text(),
    );
    fs::write(path, text)?;
    Ok(())
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Machine-readable check table: one row per check, diagnostics flattened
/// into a single quoted cell of `key=value` pairs.
pub fn write_suite_csv(path: &Path, suite: &SuiteReport) -> Result<()> {
    let mut out = String::from("name,status,measured,predicted,tolerance,diagnostics\n");
    for r in &suite.reports {
        let diags = r
            .diagnostics
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join("; ");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.name,
            r.status,
            num(r.measured),
            num(r.predicted),
            num(r.tolerance),
            csv_quote(&diags),
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Human-readable check table.
pub fn write_suite_text(path: &Path, suite: &SuiteReport) -> Result<()> {
    fs::write(path, suite.to_text())?;
    Ok(())
}
