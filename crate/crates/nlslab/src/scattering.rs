//! Free-frame pullback, extraction of the large-time free profile with an
//! honest residual, the deviation functional comparing variance growth
//! against the free wave, frame distances, and power-law rate fitting.

use crate::dynamics::{self, PhysicsParams, SolverParams};
use crate::error::{Error, Result};
use crate::functionals::{self, Observables};
use crate::grid::{spectral_gradient, Field};
use crate::oracles;

/// Which end of the time axis an extraction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Large positive times.
    Plus,
    /// Large negative times, reached through the conjugate-data reduction:
    /// the caller evolves conjugated initial data forward and the
    /// extracted profile is conjugated back.
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

/// A free profile extracted at a finite horizon, with the Cauchy-tail
/// residual that bounds how much it can still move.
#[derive(Debug, Clone)]
pub struct ScatteringEstimate {
    /// The extracted profile at frame time 0. For [`Direction::Minus`]
    /// this is the backward profile (conjugate of the forward extraction
    /// on the conjugated trajectory).
    pub u_plus: Field,
    /// Largest trajectory time used.
    pub horizon: f64,
    /// ‖pullback(T) − pullback(T/2)‖ in the weighted norm.
    pub residual: f64,
    /// Observables of the extracted profile.
    pub observables: Observables,
    pub direction: Direction,
}

impl ScatteringEstimate {
    /// An estimate counts as converged while the Cauchy residual stays
    /// within 10% of the profile's weighted norm.
    pub fn converged(&self) -> bool {
        self.residual <= 0.1 * self.observables.xnorm_sq.sqrt()
    }
}

/// A least-squares power law fitted on log-log axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    /// Fitted exponent.
    pub slope: f64,
    /// Natural-log offset: fitted value = e^intercept · t^slope.
    pub intercept: f64,
    pub r_squared: f64,
    /// Time window the fit used.
    pub window: (f64, f64),
}

/// Undo the free flow: `T(−t)u(t)`, keeping the trajectory time as the
/// field's tag so callers know which instant the pullback came from.
pub fn pullback(f: &Field) -> Field {
    let t = f.time();
    dynamics::free_propagate(f, -t).with_time(t)
}

/// Extract the free profile from trajectory snapshots.
///
/// The snapshots must contain the largest time `T` and one near `T/2`
/// (within `[0.35T, 0.65T]`); the profile is the pullback at `T` and the
/// residual is the weighted-norm gap to the pullback at the half horizon.
/// No extrapolation is applied: the estimate is the finite-horizon
/// pullback itself, and `residual` is what finite time cannot resolve.
pub fn extract_scattering_state(
    snapshots: &[Field],
    direction: Direction,
    p: &PhysicsParams,
) -> Result<ScatteringEstimate> {
    let sp = SolverParams::default();
    let far = snapshots
        .iter()
        .max_by(|a, b| a.time().total_cmp(&b.time()))
        .ok_or_else(|| Error::Extraction("no snapshots supplied".into()))?;
    let horizon = far.time();
    if !(horizon > 0.0) {
        return Err(Error::Extraction(format!(
            "extraction needs a positive horizon, largest snapshot time is {horizon}"
        )));
    }
    let target = 0.5 * horizon;
    let near = snapshots
        .iter()
        .filter(|f| f.time() < horizon && (f.time() - target).abs() <= 0.15 * horizon)
        .min_by(|a, b| {
            (a.time() - target)
                .abs()
                .total_cmp(&(b.time() - target).abs())
        })
        .ok_or_else(|| {
            Error::Extraction(format!(
                "no snapshot near the half horizon {target} (need one in [{:.3}, {:.3}])",
                0.35 * horizon,
                0.65 * horizon
            ))
        })?;
    for f in [far, near] {
        let frac = dynamics::boundary_mass(f, sp.boundary_margin);
        if frac > sp.boundary_tol {
            return Err(Error::Extraction(format!(
                "snapshot at t={} violates the boundary guard ({frac:.3e} > {:.1e}); \
                 its pullback is not trustworthy",
                f.time(),
                sp.boundary_tol
            )));
        }
    }

    let pb_far = pullback(far).with_time(0.0);
    let pb_near = pullback(near).with_time(0.0);
    let residual = functionals::x_norm_sq(&pb_far.sub(&pb_near)).sqrt();
    let profile = match direction {
        Direction::Plus => pb_far,
        Direction::Minus => pb_far.conj(),
    };
    let observables = functionals::observables(&profile, p)?;
    Ok(ScatteringEstimate {
        u_plus: profile,
        horizon,
        residual,
        observables,
        direction,
    })
}

/// Deviation of the trajectory's variance from the free wave it scatters
/// to: `A(t) = ‖xu(t)‖ − ‖xT(t)u₊‖`, the second term evaluated through
/// the exact variance polynomial of the profile (never by long-time grid
/// evolution, whose support would overflow any affordable box).
pub fn deviation_a(u_t: &Field, est: &ScatteringEstimate) -> Result<f64> {
    if !est.converged() {
        return Err(Error::Extraction(format!(
            "deviation against an unconverged profile is meaningless \
             (residual {:.3e} vs norm {:.3e})",
            est.residual,
            est.observables.xnorm_sq.sqrt()
        )));
    }
    let sp = SolverParams::default();
    let frac = dynamics::boundary_mass(u_t, sp.boundary_margin);
    if frac > sp.boundary_tol {
        return Err(Error::GuardViolation {
            time: u_t.time(),
            fraction: frac,
            tolerance: sp.boundary_tol,
        });
    }
    let t = u_t.time();
    let (c0, c1, c2) = oracles::variance_polynomial(&est.observables);
    let free_variance = c0 + c1 * t + c2 * t * t;
    Ok(functionals::variance(u_t).sqrt() - free_variance.max(0.0).sqrt())
}

/// Weighted-space distances between the trajectory point and the free wave
/// launched from the extracted profile:
/// (`‖u(t) − T(t)u₊‖_X`, `‖T(−t)u(t) − u₊‖_X`, the latter in H¹).
///
/// Everything is evaluated in the free frame on `g = T(−t)u(t) − u₊`: the
/// H¹ part of the forward distance is frame-invariant and its x-weighted
/// part is `‖(x − 2it∇)g‖`, so the free wave itself never has to live on
/// the grid at large times.
pub fn distances(u_t: &Field, est: &ScatteringEstimate) -> Result<(f64, f64, f64)> {
    let sp = SolverParams::default();
    let t = u_t.time();
    let pb = dynamics::free_propagate(u_t, -t).with_time(0.0);
    for (name, f) in [("trajectory point", u_t), ("pullback", &pb)] {
        let frac = dynamics::boundary_mass(f, sp.boundary_margin);
        if frac > sp.boundary_tol {
            return Err(Error::Diagnostic(format!(
                "{name} at t={t} violates the boundary guard ({frac:.3e}); \
                 x-weighted distances would be corrupted"
            )));
        }
    }
    let g = pb.sub(&est.u_plus);
    let grad = spectral_gradient(&g);
    let grad_sq: f64 = grad.iter().map(functionals::l2_norm_sq).sum();
    let h1_sq = functionals::l2_norm_sq(&g) + grad_sq;
    let pulled_sq = h1_sq + functionals::variance(&g);
    let forward_x_sq = functionals::pseudoconformal_norm_sq(&g, &grad, -t);
    let forward_sq = h1_sq + forward_x_sq;
    Ok((forward_sq.sqrt(), pulled_sq.sqrt(), h1_sq.sqrt()))
}

/// Least-squares power law through `(log t, log value)` over the window.
pub fn fit_power_law(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::Config(format!(
            "fit window must satisfy lo < hi, got [{lo}, {hi}]"
        )));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in series {
        if t < lo || t > hi {
            continue;
        }
        if !(t > 0.0) || !(v > 0.0) {
            return Err(Error::Domain(format!(
                "power-law fit needs positive times and values, got ({t}, {v}) in window"
            )));
        }
        xs.push(t.ln());
        ys.push(v.ln());
    }
    let n = xs.len();
    if n < 8 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 8 points in the window, found {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(Error::Domain(
            "power-law fit needs at least two distinct times".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r_squared = if syy <= f64::EPSILON * my.abs().max(1.0) {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept,
        r_squared,
        window,
    })
}
