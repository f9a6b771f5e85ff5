//! Line-based experiment configuration: `section.key = value` with `#`
//! comments, exhaustive key validation, and a round-trippable dump used
//! by `print-defaults` and run manifests.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::{PhysicsParams, SolverParams};
use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::oracles::GaussianSpec;
use crate::verifier;

/// Spatial discretization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Box half length L; the domain is [−L, L) per axis.
    pub half_length: f64,
    /// Points per axis, a power of two.
    pub points: usize,
    /// Dimension, 1 or 2.
    pub dim: usize,
}

/// Gaussian initial data exp(ivx − a(x−c)²) scaled by a complex amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct InitConfig {
    pub kind: String,
    pub a_re: f64,
    pub a_im: f64,
    pub amp_re: f64,
    pub amp_im: f64,
    pub center: f64,
    pub boost: f64,
}

/// Which checks the verification suite runs and any tolerance overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Enabled check groups; subset of [`CHECK_GROUPS`].
    pub checks: Vec<String>,
    /// (check name, tolerance) pairs applied after evaluation.
    pub tolerance_overrides: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: String,
    pub emit_csv: bool,
    pub emit_snapshots: bool,
}

/// The check groups `verify.checks` may name.
pub const CHECK_GROUPS: [&str; 4] = ["dynamics", "decay", "limits", "equivalence"];

/// A full experiment description with defaults for every key.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub lambda: f64,
    pub alpha: f64,
    pub init: InitConfig,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_stride: usize,
    pub guard_margin: f64,
    pub guard_tol: f64,
    pub verify: VerifyConfig,
    pub output: OutputConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            grid: GridConfig {
                half_length: 200.0 * PI,
                points: 32768,
                dim: 1,
            },
            lambda: -1.0,
            alpha: 4.0,
            init: InitConfig {
                kind: "gaussian".into(),
                a_re: 1.0,
                a_im: 0.0,
                amp_re: 1.0,
                amp_im: 0.0,
                center: 0.0,
                boost: 0.0,
            },
            dt: 0.005,
            t_end: 40.0,
            snapshot_stride: 20,
            guard_margin: 0.1,
            guard_tol: 1e-8,
            verify: VerifyConfig {
                checks: CHECK_GROUPS.iter().map(|s| s.to_string()).collect(),
                tolerance_overrides: Vec::new(),
            },
            output: OutputConfig {
                directory: "out".into(),
                emit_csv: true,
                emit_snapshots: false,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn physics(&self) -> Result<PhysicsParams> {
        PhysicsParams::new(self.lambda, self.alpha, self.grid.dim)
    }

    pub fn solver(&self) -> SolverParams {
        SolverParams {
            dt: self.dt,
            t_end: self.t_end,
            snapshot_stride: self.snapshot_stride,
            boundary_margin: self.guard_margin,
            boundary_tol: self.guard_tol,
        }
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        Grid::new(self.grid.half_length, self.grid.points, self.grid.dim)
    }

    pub fn initial_spec(&self) -> Result<GaussianSpec> {
        if self.init.kind != "gaussian" {
            return Err(Error::Config(format!(
                "init.kind: unknown initial data kind {:?}, expected \"gaussian\"",
                self.init.kind
            )));
        }
        GaussianSpec::new(
            Complex64::new(self.init.a_re, self.init.a_im),
            Complex64::new(self.init.amp_re, self.init.amp_im),
            self.init.center,
            self.init.boost,
        )
    }

    pub fn initial_field(&self) -> Result<Field> {
        let grid = self.build_grid()?;
        Ok(self.initial_spec()?.sample(&grid, 0.0))
    }

    /// Check every section against the module preconditions it feeds.
    pub fn validate(&self) -> Result<()> {
        self.build_grid()?;
        self.physics()?;
        self.initial_spec()?;
        self.solver().validate()?;
        for name in &self.verify.checks {
            if !CHECK_GROUPS.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "verify.checks: unknown check group {name:?}, expected a subset of {CHECK_GROUPS:?}"
                )));
            }
        }
        for (name, tol) in &self.verify.tolerance_overrides {
            if !verifier::KNOWN_CHECKS.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "verify.tol.{name}: no such check; known checks: {}",
                    verifier::KNOWN_CHECKS.join(", ")
                )));
            }
            if !(*tol >= 0.0) {
                return Err(Error::Config(format!(
                    "verify.tol.{name}: tolerance must be nonnegative, got {tol}"
                )));
            }
        }
        Ok(())
    }

    /// Dump in the config syntax itself; parsing the output reproduces
    /// the config exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let checks = if self.verify.checks.is_empty() {
            "none".to_string()
        } else {
            self.verify.checks.join(",")
        };
        s.push_str(&format!(
            "# experiment configuration (all keys shown with their current values)\n\
             grid.L = {:e}\n\
             grid.M = {}\n\
             grid.d = {}\n\
             physics.lambda = {:e}\n\
             physics.alpha = {:e}\n\
             init.kind = {}\n\
             init.a_re = {:e}\n\
             init.a_im = {:e}\n\
             init.amp_re = {:e}\n\
             init.amp_im = {:e}\n\
             init.center = {:e}\n\
             init.boost = {:e}\n\
             time.dt = {:e}\n\
             time.t_end = {:e}\n\
             time.snapshot_stride = {}\n\
             guard.margin = {:e}\n\
             guard.tol = {:e}\n\
             verify.checks = {}\n",
            self.grid.half_length,
            self.grid.points,
            self.grid.dim,
            self.lambda,
            self.alpha,
            self.init.kind,
            self.init.a_re,
            self.init.a_im,
            self.init.amp_re,
            self.init.amp_im,
            self.init.center,
            self.init.boost,
            self.dt,
            self.t_end,
            self.snapshot_stride,
            self.guard_margin,
            self.guard_tol,
            checks,
        ));
        for (name, tol) in &self.verify.tolerance_overrides {
            s.push_str(&format!("verify.tol.{name} = {tol:e}\n"));
        }
        s.push_str(&format!(
            "output.directory = {}\n\
             output.emit_csv = {}\n\
             output.emit_snapshots = {}\n",
            self.output.directory, self.output.emit_csv, self.output.emit_snapshots,
        ));
        s
    }
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value.trim().parse::<f64>().map_err(|_| {
        Error::Config(format!("{key}: expected a real number, got {value:?}"))
    })
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value.trim().parse::<usize>().map_err(|_| {
        Error::Config(format!(
            "{key}: expected a nonnegative integer, got {value:?}"
        ))
    })
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(Error::Config(format!(
            "{key}: expected true or false, got {other:?}"
        ))),
    }
}

/// Apply one `section.key = value` assignment. Shared by the parser and
/// the sweep command's `--set` overrides.
pub fn apply_override(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    match key {
        "grid.L" => cfg.grid.half_length = parse_f64(key, value)?,
        "grid.M" => cfg.grid.points = parse_usize(key, value)?,
        "grid.d" => cfg.grid.dim = parse_usize(key, value)?,
        "physics.lambda" => cfg.lambda = parse_f64(key, value)?,
        "physics.alpha" => cfg.alpha = parse_f64(key, value)?,
        "init.kind" => cfg.init.kind = value.to_string(),
        "init.a_re" => cfg.init.a_re = parse_f64(key, value)?,
        "init.a_im" => cfg.init.a_im = parse_f64(key, value)?,
        "init.amp_re" => cfg.init.amp_re = parse_f64(key, value)?,
        "init.amp_im" => cfg.init.amp_im = parse_f64(key, value)?,
        "init.center" => cfg.init.center = parse_f64(key, value)?,
        "init.boost" => cfg.init.boost = parse_f64(key, value)?,
        "time.dt" => cfg.dt = parse_f64(key, value)?,
        "time.t_end" => cfg.t_end = parse_f64(key, value)?,
        "time.snapshot_stride" => cfg.snapshot_stride = parse_usize(key, value)?,
        "guard.margin" => cfg.guard_margin = parse_f64(key, value)?,
        "guard.tol" => cfg.guard_tol = parse_f64(key, value)?,
        "verify.checks" => {
            cfg.verify.checks = match value {
                "all" => CHECK_GROUPS.iter().map(|s| s.to_string()).collect(),
                "none" | "" => Vec::new(),
                list => list.split(',').map(|s| s.trim().to_string()).collect(),
            };
        }
        "output.directory" => cfg.output.directory = value.to_string(),
        "output.emit_csv" => cfg.output.emit_csv = parse_bool(key, value)?,
        "output.emit_snapshots" => cfg.output.emit_snapshots = parse_bool(key, value)?,
        _ => {
            if let Some(check) = key.strip_prefix("verify.tol.") {
                let tol = parse_f64(key, value)?;
                // last assignment wins
                cfg.verify
                    .tolerance_overrides
                    .retain(|(n, _)| n != check);
                cfg.verify
                    .tolerance_overrides
                    .push((check.to_string(), tol));
            } else {
                return Err(Error::Config(format!(
                    "unknown key {key:?}; expected section.key with section in \
                     grid/physics/init/time/guard/verify/output"
                )));
            }
        }
    }
    Ok(())
}

/// Parse config text, overlaying assignments on the documented defaults,
/// then validate the result against all module preconditions.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {}: expected `section.key = value`, got {raw:?}",
                idx + 1
            ))
        })?;
        apply_override(&mut cfg, key.trim(), value)
            .map_err(|e| Error::Config(format!("line {}: {e}", idx + 1)))?;
    }
    cfg.validate()?;
    Ok(cfg)
}
