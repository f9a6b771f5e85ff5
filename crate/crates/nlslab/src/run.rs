//! Experiment orchestration: execute a configured run, collect the
//! observable series and evenly spaced state keeps, emit artifacts, and
//! drive the verification and sweep commands.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::Instant;

use crate::config::{self, ExperimentConfig};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::functionals::{self, Observables};
use crate::grid::Field;
use crate::report;
use crate::scattering::{self, Direction, ScatteringEstimate};
use crate::snapshot;
use crate::verifier::{self, SuiteReport};

/// Number of evenly spaced state keeps across a run (plus the initial
/// state), enough for distance fits and half-horizon extraction.
const KEEP_SEGMENTS: usize = 32;

/// Everything a finished (or aborted) run produced in memory.
#[derive(Debug)]
pub struct RunOutcome {
    /// Observables at every record the run reached.
    pub series: Vec<Observables>,
    /// Fields kept at up to [`KEEP_SEGMENTS`]+1 evenly spaced times.
    pub kept: Vec<Field>,
    /// Final state, absent if the run aborted.
    pub final_field: Option<Field>,
    /// The guard or diagnostic error that stopped the run early.
    pub abort: Option<Error>,
}

impl RunOutcome {
    pub fn aborted(&self) -> bool {
        self.abort.is_some()
    }
}

/// Run the configured experiment. Setup problems (bad config, bad
/// geometry) surface as errors; runtime aborts (guard violation,
/// resolution loss, non-finite values) come back inside the outcome with
/// the partial series retained.
pub fn execute_run(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let p = cfg.physics()?;
    let phi = cfg.initial_field()?;
    let sp = cfg.solver();

    if sp.t_end == 0.0 {
        // nothing to integrate: a single record of the initial state
        return match functionals::observables_with_margin(&phi, &p, sp.boundary_margin) {
            Ok(obs) => Ok(RunOutcome {
                series: vec![obs],
                kept: vec![phi.clone()],
                final_field: Some(phi),
                abort: None,
            }),
            Err(e) => Ok(RunOutcome {
                series: Vec::new(),
                kept: Vec::new(),
                final_field: None,
                abort: Some(e),
            }),
        };
    }

    let span = sp.t_end;
    let targets: Vec<f64> = (0..=KEEP_SEGMENTS)
        .map(|k| span * k as f64 / KEEP_SEGMENTS as f64)
        .collect();
    let forward = if span >= 0.0 { 1.0 } else { -1.0 };
    let mut kept: Vec<Field> = Vec::with_capacity(targets.len());
    let mut seen: Vec<Observables> = Vec::new();
    let mut next_target = 0usize;
    let observer = |f: &Field, o: &Observables| {
        seen.push(*o);
        let mut keep = false;
        while next_target < targets.len()
            && (f.time() - targets[next_target]) * forward >= -1e-9
        {
            keep = true;
            next_target += 1;
        }
        if keep {
            kept.push(f.clone());
        }
    };

    match dynamics::evolve(&phi, &sp, &p, observer) {
        Ok((final_field, series)) => Ok(RunOutcome {
            series,
            kept,
            final_field: Some(final_field),
            abort: None,
        }),
        Err(e @ (Error::Config(_) | Error::Domain(_))) => Err(e),
        // runtime aborts keep the partial history: every record already
        // reached the observer, including the violating one
        Err(e) => Ok(RunOutcome {
            series: seen,
            kept,
            final_field: None,
            abort: Some(e),
        }),
    }
}

/// A run plus the derived scattering quantities used for CSV distance
/// columns and the equivalence checks.
#[derive(Debug)]
pub struct RunProducts {
    pub outcome: RunOutcome,
    pub estimate: Option<ScatteringEstimate>,
    /// (t, forward, pulled) at kept times.
    pub distances: Vec<(f64, f64, f64)>,
}

/// Execute and post-process: extraction at the full horizon and distance
/// evaluation at the kept times, when the run completed forward in time.
pub fn produce(cfg: &ExperimentConfig) -> Result<RunProducts> {
    let outcome = execute_run(cfg)?;
    let p = cfg.physics()?;
    let mut estimate = None;
    let mut distances = Vec::new();
    if !outcome.aborted() && cfg.t_end > 0.0 && outcome.kept.len() >= 2 {
        if let Ok(est) = scattering::extract_scattering_state(&outcome.kept, Direction::Plus, &p)
        {
            for f in outcome.kept.iter().filter(|f| f.time() > 1e-12) {
                if let Ok((fw, pu, _)) = scattering::distances(f, &est) {
                    distances.push((f.time(), fw, pu));
                }
            }
            estimate = Some(est);
        }
    }
    Ok(RunProducts {
        outcome,
        estimate,
        distances,
    })
}

fn write_artifacts(cfg: &ExperimentConfig, products: &RunProducts, wall: f64) -> Result<()> {
    let dir = Path::new(&cfg.output.directory);
    fs::create_dir_all(dir)?;
    let abort_text = products.outcome.abort.as_ref().map(|e| e.to_string());
    if cfg.output.emit_csv {
        report::write_observables_csv(
            &dir.join("observables.csv"),
            &products.outcome.series,
            &products.distances,
            abort_text.as_deref(),
        )?;
    }
    if cfg.output.emit_snapshots {
        let snap_dir = dir.join("snapshots");
        fs::create_dir_all(&snap_dir)?;
        for (i, f) in products.outcome.kept.iter().enumerate() {
            snapshot::save_snapshot(f, &snap_dir.join(format!("state_{i:04}.nlss")))?;
        }
    }
    let outcome_line = match &abort_text {
        Some(reason) => format!("aborted: {reason}"),
        None => "completed".to_string(),
    };
    report::write_manifest(&dir.join("manifest.txt"), cfg, wall, &outcome_line)?;
    Ok(())
}

/// `nlslab run <config> [--out DIR]`: execute and write artifacts.
/// Returns the abort error (after retaining partial artifacts) so the
/// caller can exit nonzero.
pub fn cmd_run(config_path: &Path, out_override: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(config_path)?;
    let mut cfg = config::parse_config(&text)?;
    if let Some(dir) = out_override {
        cfg.output.directory = dir.display().to_string();
    }
    let start = Instant::now();
    let products = produce(&cfg)?;
    write_artifacts(&cfg, &products, start.elapsed().as_secs_f64())?;
    match products.outcome.abort {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

/// `nlslab verify <config>`: run the suite and emit report files.
pub fn cmd_verify(config_path: &Path) -> Result<SuiteReport> {
    let text = fs::read_to_string(config_path)?;
    let cfg = config::parse_config(&text)?;
    let suite = verifier::run_suite(&cfg)?;
    let dir = Path::new(&cfg.output.directory);
    fs::create_dir_all(dir)?;
    report::write_suite_text(&dir.join("report.txt"), &suite)?;
    report::write_suite_csv(&dir.join("checks.csv"), &suite)?;
    Ok(suite)
}

/// Spectral-headroom threshold above which a sweep run is marked
/// reduced-accuracy: within two decades of the resolution-guard abort.
pub const REDUCED_ACCURACY_SPECTRAL_FRACTION: f64 = 1e-10;

/// One row of the sweep summary.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub label: String,
    pub status: String,
    pub passed: usize,
    pub failed: usize,
    pub inconclusive: usize,
    pub reduced_accuracy: bool,
    pub note: String,
}

fn sweep_one(base: &ExperimentConfig, combo: &[(String, String)], dir: PathBuf) -> SweepRow {
    let label = combo
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    let mut row = SweepRow {
        label: label.clone(),
        status: "failed".into(),
        passed: 0,
        failed: 0,
        inconclusive: 0,
        reduced_accuracy: false,
        note: String::new(),
    };
    let mut cfg = base.clone();
    for (k, v) in combo {
        if let Err(e) = config::apply_override(&mut cfg, k, v) {
            row.note = e.to_string();
            return row;
        }
    }
    cfg.output.directory = dir.display().to_string();
    let start = Instant::now();
    let products = match produce(&cfg) {
        Ok(p) => p,
        Err(e) => {
            row.note = e.to_string();
            return row;
        }
    };
    if let Err(e) = write_artifacts(&cfg, &products, start.elapsed().as_secs_f64()) {
        row.note = format!("artifact write failed: {e}");
        return row;
    }
    row.reduced_accuracy = products
        .outcome
        .series
        .iter()
        .any(|o| o.hi_spec_frac > REDUCED_ACCURACY_SPECTRAL_FRACTION);
    if let Some(abort) = &products.outcome.abort {
        row.note = format!("run aborted: {abort}");
        return row;
    }
    match verifier::evaluate_suite(&cfg, &products.outcome) {
        Ok(suite) => {
            let (pass, fail, inconclusive) = suite.counts();
            row.passed = pass;
            row.failed = fail;
            row.inconclusive = inconclusive;
            if fail == 0 {
                row.status = "ok".into();
            } else {
                row.note = suite
                    .reports
                    .iter()
                    .find(|r| r.status == verifier::CheckStatus::Fail)
                    .map(|r| format!("first failing check: {}", r.name))
                    .unwrap_or_default();
            }
            let report_dir = Path::new(&cfg.output.directory);
            let _ = report::write_suite_text(&report_dir.join("report.txt"), &suite);
            let _ = report::write_suite_csv(&report_dir.join("checks.csv"), &suite);
        }
        Err(e) => {
            row.note = format!("verification failed: {e}");
        }
    }
    row
}

fn parse_set(raw: &str) -> Result<(String, Vec<String>)> {
    let (key, values) = raw.split_once('=').ok_or_else(|| {
        Error::Config(format!(
            "--set expects key=v1,v2,..., got {raw:?}"
        ))
    })?;
    let values: Vec<String> = values
        .split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect();
    if values.is_empty() {
        return Err(Error::Config(format!("--set {raw:?} lists no values")));
    }
    Ok((key.trim().to_string(), values))
}

fn sanitize(part: &str) -> String {
    part.chars()
        .map(|c| if c == '/' || c.is_whitespace() { '-' } else { c })
        .collect()
}

/// `nlslab sweep <config> --set key=v1,v2 [--jobs N]`: run the Cartesian
/// product of the overrides, each in its own subdirectory, and write a
/// summary. Returns whether every run succeeded with no failing check.
pub fn cmd_sweep(config_path: &Path, sets: &[String], jobs: Option<usize>) -> Result<bool> {
    let text = fs::read_to_string(config_path)?;
    let cfg = config::parse_config(&text)?;
    if sets.is_empty() {
        // no overrides: identical to a plain run
        return cmd_run(config_path, None).map(|_| true);
    }
    let parsed: Vec<(String, Vec<String>)> =
        sets.iter().map(|s| parse_set(s)).collect::<Result<_>>()?;
    let mut combos: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (key, values) in &parsed {
        let mut grown = Vec::with_capacity(combos.len() * values.len());
        for combo in &combos {
            for v in values {
                let mut c = combo.clone();
                c.push((key.clone(), v.clone()));
                grown.push(c);
            }
        }
        combos = grown;
    }

    let jobs = jobs
        .or_else(|| {
            std::env::var("NLSLAB_JOBS")
                .ok()
                .and_then(|s| s.parse::<usize>().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .clamp(1, combos.len());

    let base_dir = PathBuf::from(&cfg.output.directory);
    fs::create_dir_all(&base_dir)?;
    let rows: Mutex<Vec<Option<SweepRow>>> = Mutex::new(vec![None; combos.len()]);
    let next: Mutex<usize> = Mutex::new(0);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let idx = {
                    let mut guard = next.lock().unwrap();
                    if *guard >= combos.len() {
                        return;
                    }
                    let i = *guard;
                    *guard += 1;
                    i
                };
                let combo = &combos[idx];
                let sub = combo
                    .iter()
                    .map(|(k, v)| sanitize(&format!("{k}={v}")))
                    .collect::<Vec<_>>()
                    .join("_");
                let row = sweep_one(&cfg, combo, base_dir.join(sub));
                rows.lock().unwrap()[idx] = Some(row);
            });
        }
    });
    let rows: Vec<SweepRow> = rows
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|r| r.expect("every sweep job completed"))
        .collect();

    let mut summary =
        String::from("label,status,passed,failed,inconclusive,reduced_accuracy,note\n");
    for row in &rows {
        summary.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.label,
            row.status,
            row.passed,
            row.failed,
            row.inconclusive,
            row.reduced_accuracy,
            row.note.replace(',', ";"),
        ));
    }
    fs::write(base_dir.join("summary.csv"), &summary)?;
    print!("{summary}");
    Ok(rows.iter().all(|r| r.status == "ok"))
}
