//! Time evolution: the free Schrödinger group applied exactly in transform
//! space, the exact nonlinear phase substep, second-order Strang
//! composition, and an observer-instrumented driver with boundary and
//! resolution guards.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::functionals::{self, Observables};
use crate::grid::{forward_transform, inverse_transform, Field};

/// Spectral mass fraction in the top third of wavenumbers above which a
/// run is considered under-resolved and aborted.
pub const RESOLUTION_TOL: f64 = 1e-8;

/// Coupling and power of the equation `i u_t + Δu + λ|u|^α u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    pub lambda: f64,
    pub alpha: f64,
    /// Spatial dimension; must match the grid the fields live on.
    pub d: usize,
}

impl PhysicsParams {
    /// Basic validity: finite coupling, positive finite power. The
    /// scattering-range restriction is a separate, opt-in check.
    pub fn new(lambda: f64, alpha: f64, d: usize) -> Result<PhysicsParams> {
        if !lambda.is_finite() {
            return Err(Error::Config(format!("coupling must be finite, got {lambda}")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Config(format!(
                "nonlinearity power must be positive and finite, got {alpha}"
            )));
        }
        if d == 0 || d > 2 {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {d}")));
        }
        Ok(PhysicsParams { lambda, alpha, d })
    }

    /// Enforce the standing hypothesis for scattering runs: λ ≠ 0 and
    /// `2/d < α < 4/(d−2)` (the upper bound is vacuous for d ≤ 2).
    pub fn check_scattering_range(&self) -> Result<()> {
        if self.lambda == 0.0 {
            return Err(Error::Domain(
                "scattering checks need a nonlinear run (λ ≠ 0)".into(),
            ));
        }
        let lo = 2.0 / self.d as f64;
        if self.alpha <= lo {
            return Err(Error::Domain(format!(
                "power α={} is at or below the short-range threshold {lo} in dimension {}",
                self.alpha, self.d
            )));
        }
        if self.d > 2 {
            let hi = 4.0 / (self.d as f64 - 2.0);
            if self.alpha >= hi {
                return Err(Error::Domain(format!(
                    "power α={} reaches the energy-critical threshold {hi} in dimension {}",
                    self.alpha, self.d
                )));
            }
        }
        Ok(())
    }

    pub fn is_linear(&self) -> bool {
        self.lambda == 0.0
    }

    /// True when α equals the mass-critical power 4/d.
    pub fn is_mass_critical(&self) -> bool {
        (self.alpha - 4.0 / self.d as f64).abs() < 1e-12
    }
}

/// Stepping and guard configuration for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Time step; negative steps run the flow backwards.
    pub dt: f64,
    /// Target time (absolute, not a duration).
    pub t_end: f64,
    /// Steps between observable records.
    pub snapshot_stride: usize,
    /// Fraction of the half-length treated as boundary guard zone.
    pub boundary_margin: f64,
    /// Maximum tolerated relative mass in the guard zone.
    pub boundary_tol: f64,
}

impl Default for SolverParams {
    fn default() -> SolverParams {
        SolverParams {
            dt: 0.005,
            t_end: 40.0,
            snapshot_stride: 20,
            boundary_margin: 0.1,
            boundary_tol: 1e-8,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if self.dt == 0.0 || !self.dt.is_finite() {
            return Err(Error::Config(format!(
                "time step must be nonzero and finite, got {}",
                self.dt
            )));
        }
        if !self.t_end.is_finite() {
            return Err(Error::Config("target time must be finite".into()));
        }
        if self.snapshot_stride == 0 {
            return Err(Error::Config("snapshot stride must be at least 1".into()));
        }
        if !(self.boundary_margin > 0.0 && self.boundary_margin < 0.5) {
            return Err(Error::Config(format!(
                "boundary margin must lie in (0, 0.5), got {}",
                self.boundary_margin
            )));
        }
        if !(self.boundary_tol > 0.0) {
            return Err(Error::Config(format!(
                "boundary tolerance must be positive, got {}",
                self.boundary_tol
            )));
        }
        Ok(())
    }
}

/// Apply the free group `e^{iτΔ}`: multiplication by `e^{−i|k|²τ}` on
/// every transform bin. Exact for band-limited data; unitary; advances the
/// field's time tag by `τ`.
pub fn free_propagate(f: &Field, tau: f64) -> Field {
    let grid = f.grid().clone();
    let mut s = forward_transform(f);
    for (idx, v) in s.values_mut().iter_mut().enumerate() {
        let phase = -grid.wavenumber_sq(idx) * tau;
        *v *= Complex64::from_polar(1.0, phase);
    }
    inverse_transform(&s).with_time(f.time() + tau)
}

/// Exact solution of the phase substep `i u_t + λ|u|^α u = 0` over
/// duration `τ`: each sample rotates by `λ|u|^α τ` and keeps its modulus.
/// The time tag is left unchanged; composition bookkeeping belongs to
/// [`strang_step`].
pub fn nonlinear_phase_step(f: &Field, tau: f64, p: &PhysicsParams) -> Field {
    if p.lambda == 0.0 || tau == 0.0 {
        return f.clone();
    }
    let rate = p.lambda * tau;
    let values = f
        .values()
        .iter()
        .map(|&u| {
            let a = u.norm();
            if a == 0.0 {
                // |u|^α → 0 as |u| → 0 for α > 0, so vacuum points are fixed
                u
            } else {
                u * Complex64::from_polar(1.0, rate * (p.alpha * a.ln()).exp())
            }
        })
        .collect();
    Field::from_values(f.grid(), f.time(), values).expect("same grid")
}

/// One second-order step: half a free flight, a full nonlinear phase
/// rotation, half a free flight. Unitary; advances time by `dt`.
pub fn strang_step(f: &Field, dt: f64, p: &PhysicsParams) -> Field {
    let half = free_propagate(f, 0.5 * dt);
    let kicked = nonlinear_phase_step(&half, dt, p);
    free_propagate(&kicked, 0.5 * dt)
}

/// Relative mass in the guard zone `{x : |x_axis| > (1−margin)·L}` along
/// any axis. Zero fields report zero.
pub fn boundary_mass(f: &Field, margin: f64) -> f64 {
    debug_assert!(margin > 0.0 && margin < 0.5);
    let grid = f.grid();
    let cut = (1.0 - margin) * grid.half_length();
    let mut guard = 0.0;
    let mut total = 0.0;
    for (idx, v) in f.values().iter().enumerate() {
        let n2 = v.norm_sqr();
        total += n2;
        let [i0, i1] = grid.axis_indices(idx);
        let outside = grid.axis_coords()[i0].abs() > cut
            || (grid.dim() == 2 && grid.axis_coords()[i1].abs() > cut);
        if outside {
            guard += n2;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        guard / total
    }
}

/// Evolve `f` to `sp.t_end` by repeated Strang steps, shortening the last
/// step to land exactly on the target time.
///
/// Observables are recorded at the initial state, every
/// `snapshot_stride`-th step, and the final state; each record is handed
/// to `observer` and collected into the returned series. At every record
/// the boundary and resolution guards are evaluated; a violation (or a
/// non-finite field) aborts with an error naming the violation time. Rows
/// recorded before the abort have already reached the observer, so
/// streaming consumers keep the partial history.
pub fn evolve<F>(
    f: &Field,
    sp: &SolverParams,
    p: &PhysicsParams,
    mut observer: F,
) -> Result<(Field, Vec<Observables>)>
where
    F: FnMut(&Field, &Observables),
{
    sp.validate()?;
    let t0 = f.time();
    let span = sp.t_end - t0;
    let ratio = span / sp.dt;
    if !(ratio > 0.0) {
        return Err(Error::Config(format!(
            "target time {} is not reachable from {} with step {}",
            sp.t_end, t0, sp.dt
        )));
    }

    // land on t_end exactly: full steps plus one shortened step, with a
    // tolerance so that span/dt within roundoff of an integer does not
    // produce a spurious sliver step
    let nearest = ratio.round();
    let (full_steps, partial) = if (ratio - nearest).abs() < 1e-9 && nearest >= 1.0 {
        (nearest as u64, None)
    } else {
        let n = ratio.floor() as u64;
        let rem = span - n as f64 * sp.dt;
        (n, Some(rem))
    };

    let mut series = Vec::new();
    let mut record = |field: &Field, series: &mut Vec<Observables>| -> Result<()> {
        let obs = match functionals::observables_with_margin(field, p, sp.boundary_margin) {
            Ok(obs) => obs,
            Err(err) => {
                // a failed measurement on a field that also violates the
                // boundary guard is reported as the guard violation, since
                // the wrapped tail is the root cause
                let fraction = boundary_mass(field, sp.boundary_margin);
                if fraction > sp.boundary_tol {
                    return Err(Error::GuardViolation {
                        time: field.time(),
                        fraction,
                        tolerance: sp.boundary_tol,
                    });
                }
                return Err(err);
            }
        };
        observer(field, &obs);
        series.push(obs);
        if obs.boundary_frac > sp.boundary_tol {
            return Err(Error::GuardViolation {
                time: field.time(),
                fraction: obs.boundary_frac,
                tolerance: sp.boundary_tol,
            });
        }
        if obs.hi_spec_frac > RESOLUTION_TOL {
            return Err(Error::Diagnostic(format!(
                "resolution guard tripped at t={}: {:.3e} of the spectrum sits in the top \
                 third of wavenumbers (limit {:.1e}); refine the grid or lower t_end",
                field.time(),
                obs.hi_spec_frac,
                RESOLUTION_TOL
            )));
        }
        Ok(())
    };

    let mut u = f.clone();
    record(&u, &mut series)?;
    let mut last_recorded = 0u64;
    for step in 1..=full_steps {
        u = strang_step(&u, sp.dt, p).with_time(t0 + step as f64 * sp.dt);
        if step % sp.snapshot_stride as u64 == 0 {
            record(&u, &mut series)?;
            last_recorded = step;
        }
    }
    if let Some(rem) = partial {
        if rem.abs() > sp.dt.abs() * 1e-12 {
            u = strang_step(&u, rem, p);
        }
        u = u.with_time(sp.t_end);
        record(&u, &mut series)?;
    } else {
        u = u.with_time(sp.t_end);
        if last_recorded != full_steps {
            record(&u, &mut series)?;
        }
    }
    Ok((u, series))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use std::f64::consts::PI;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn max_abs_diff(a: &Field, b: &Field) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn l2(f: &Field) -> f64 {
        functionals::l2_norm_sq(f).sqrt()
    }

    fn gaussian(l: f64, m: usize) -> Field {
        let g = Grid::new(l, m, 1).unwrap();
        Field::from_fn(&g, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0))
    }

    #[test]
    fn physics_params_validation() {
        assert!(PhysicsParams::new(-1.0, 4.0, 1).is_ok());
        assert!(PhysicsParams::new(0.0, 4.0, 1).is_ok());
        assert!(PhysicsParams::new(-1.0, 0.0, 1).is_err());
        assert!(PhysicsParams::new(-1.0, -2.0, 1).is_err());
        assert!(PhysicsParams::new(f64::NAN, 4.0, 1).is_err());
        assert!(PhysicsParams::new(-1.0, 4.0, 3).is_err());

        let ok = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        assert!(ok.check_scattering_range().is_ok());
        assert!(ok.is_mass_critical());
        let linear = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        assert!(linear.check_scattering_range().is_err());
        let short_range = PhysicsParams::new(-1.0, 1.5, 1).unwrap();
        assert!(short_range.check_scattering_range().is_err());
        assert!(!short_range.is_mass_critical());
    }

    #[test]
    fn solver_params_validation() {
        let ok = SolverParams::default();
        assert!(ok.validate().is_ok());
        assert!(SolverParams { dt: 0.0, ..ok }.validate().is_err());
        assert!(SolverParams { snapshot_stride: 0, ..ok }.validate().is_err());
        assert!(SolverParams { boundary_margin: 0.6, ..ok }.validate().is_err());
        assert!(SolverParams { boundary_tol: 0.0, ..ok }.validate().is_err());
        assert!(SolverParams { dt: -0.01, ..ok }.validate().is_ok());
    }

    #[test]
    fn free_propagation_of_plane_wave() {
        let g = Grid::new(5.0, 64, 1).unwrap();
        let k = g.axis_wavenumbers()[7];
        let f = Field::from_fn(&g, 0.0, |x| Complex64::new(0.0, k * x[0]).exp());
        let tau = 0.37;
        let out = free_propagate(&f, tau);
        let expect = Field::from_fn(&g, tau, |x| {
            Complex64::new(0.0, k * x[0] - k * k * tau).exp()
        });
        assert!(max_abs_diff(&out, &expect) < 1e-12);
        assert_eq!(out.time(), tau);
    }

    #[test]
    fn free_propagation_identity_group_law_isometry() {
        let f = gaussian(15.0, 256);
        let same = free_propagate(&f, 0.0);
        assert!(max_abs_diff(&f, &same) < 1e-14);

        let two = free_propagate(&free_propagate(&f, 0.4), 0.35);
        let once = free_propagate(&f, 0.75);
        assert!(max_abs_diff(&two, &once) < 1e-12);

        let out = free_propagate(&f, 1.7);
        assert!(rel_err(l2(&out), l2(&f)) < 1e-13);
        assert!(rel_err(
            functionals::h1_norm_sq(&out),
            functionals::h1_norm_sq(&f)
        ) < 1e-12);
    }

    #[test]
    fn nonlinear_phase_examples() {
        let g = Grid::new(5.0, 32, 1).unwrap();
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let c = Complex64::new(0.8, -0.3);
        let f = Field::from_fn(&g, 0.0, |_| c);
        let tau = 0.21;
        let out = nonlinear_phase_step(&f, tau, &p);
        let expect = c * Complex64::from_polar(1.0, p.lambda * c.norm().powi(4) * tau);
        for v in out.values() {
            assert!((v - expect).norm() < 1e-15);
        }

        let same = nonlinear_phase_step(&f, 0.0, &p);
        assert!(max_abs_diff(&f, &same) == 0.0);

        let mut vals = vec![Complex64::default(); 32];
        vals[3] = Complex64::new(0.5, 0.5);
        let sparse = Field::from_values(&g, 0.0, vals).unwrap();
        let out = nonlinear_phase_step(&sparse, 0.4, &p);
        assert!(out.is_finite());
        assert_eq!(out.values()[0], Complex64::default());
        assert!((out.values()[3].norm() - sparse.values()[3].norm()).abs() < 1e-15);
    }

    #[test]
    fn nonlinear_phase_preserves_modulus_with_fractional_power() {
        let g = Grid::new(8.0, 128, 1).unwrap();
        let p = PhysicsParams::new(0.7, 2.6, 1).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| {
            Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.1 * x[0].sin())
        });
        let out = nonlinear_phase_step(&f, 0.8, &p);
        for (a, b) in f.values().iter().zip(out.values()) {
            assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm().max(1e-300));
        }
    }

    #[test]
    fn strang_step_reduces_to_free_flow_when_linear() {
        let f = gaussian(15.0, 256);
        let p = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        let one = strang_step(&f, 0.3, &p);
        let free = free_propagate(&f, 0.3);
        assert!(max_abs_diff(&one, &free) < 1e-13);
        assert!(rel_err(one.time(), 0.3) < 1e-15);
    }

    #[test]
    fn strang_step_is_unitary() {
        let f = gaussian(15.0, 256);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let out = strang_step(&f, 0.05, &p);
        assert!(rel_err(l2(&out), l2(&f)) < 1e-14);
    }

    #[test]
    fn strang_self_convergence_is_second_order() {
        let f = gaussian(30.0, 1024);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let t_end = 1.0;
        let run = |dt: f64| {
            let sp = SolverParams {
                dt,
                t_end,
                snapshot_stride: usize::MAX,
                ..SolverParams::default()
            };
            evolve(&f, &sp, &p, |_, _| {}).unwrap().0
        };
        let reference = run(0.05 / 16.0);
        let errs: Vec<f64> = [0.05, 0.025, 0.0125]
            .iter()
            .map(|&dt| l2(&run(dt).sub(&reference)))
            .collect();
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        for r in [r1, r2] {
            let order = r.log2();
            assert!((1.8..=2.2).contains(&order), "order {order} from ratio {r}");
        }
    }

    #[test]
    fn linear_evolution_matches_free_group() {
        let f = gaussian(100.0, 4096);
        let p = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.01,
            t_end: 5.0,
            snapshot_stride: 100,
            ..SolverParams::default()
        };
        let (end, series) = evolve(&f, &sp, &p, |_, _| {}).unwrap();
        let free = free_propagate(&f, 5.0);
        assert!(l2(&end.sub(&free)) < 1e-12);
        assert_eq!(series.len(), 6);
        assert!((series[1].t - 1.0).abs() < 1e-12);
        assert_eq!(series.last().unwrap().t, 5.0);
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid::new(10.0, 64, 1).unwrap();
        let f = Field::zeros(&g, 0.0);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.05,
            t_end: 1.0,
            ..SolverParams::default()
        };
        let (end, _) = evolve(&f, &sp, &p, |_, _| {}).unwrap();
        assert!(end.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn mass_is_conserved_over_many_steps() {
        let f = gaussian(30.0, 1024);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.0025,
            t_end: 1.0,
            snapshot_stride: 100,
            ..SolverParams::default()
        };
        let (_, series) = evolve(&f, &sp, &p, |_, _| {}).unwrap();
        let m0 = series[0].mass;
        for o in &series {
            assert!(rel_err(o.mass, m0) < 1e-12, "t={} mass {}", o.t, o.mass);
        }
    }

    #[test]
    fn partial_final_step_lands_on_target() {
        let f = gaussian(15.0, 512);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.03,
            t_end: 0.1,
            snapshot_stride: 1,
            ..SolverParams::default()
        };
        let (end, series) = evolve(&f, &sp, &p, |_, _| {}).unwrap();
        assert_eq!(end.time(), 0.1);
        assert_eq!(series.len(), 5); // t = 0, .03, .06, .09, .1
        assert_eq!(series.last().unwrap().t, 0.1);
    }

    #[test]
    fn backward_evolution_is_supported() {
        let f = gaussian(30.0, 1024).with_time(0.0);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: -0.02,
            t_end: -1.0,
            snapshot_stride: 10,
            ..SolverParams::default()
        };
        let (end, _) = evolve(&f, &sp, &p, |_, _| {}).unwrap();
        assert_eq!(end.time(), -1.0);
    }

    #[test]
    fn forward_then_backward_returns_to_start() {
        let f = gaussian(30.0, 1024);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let fwd = SolverParams {
            dt: 0.01,
            t_end: 1.0,
            snapshot_stride: 1000,
            ..SolverParams::default()
        };
        let (mid, _) = evolve(&f, &fwd, &p, |_, _| {}).unwrap();
        let back = SolverParams {
            dt: -0.01,
            t_end: 0.0,
            snapshot_stride: 1000,
            ..SolverParams::default()
        };
        let (end, _) = evolve(&mid, &back, &p, |_, _| {}).unwrap();
        assert!(l2(&end.sub(&f)) < 1e-11);
    }

    #[test]
    fn conjugation_time_reversal_symmetry() {
        // evolving the conjugate backwards mirrors the forward run exactly
        let g = Grid::new(40.0, 1024, 1).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| {
            Complex64::new((-x[0] * x[0]).exp(), 0.0) * Complex64::new(0.0, 0.4 * x[0]).exp()
        });
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let t_end = 1.5;
        let fwd = SolverParams {
            dt: 0.01,
            t_end,
            snapshot_stride: usize::MAX,
            ..SolverParams::default()
        };
        let (forward, _) = evolve(&f, &fwd, &p, |_, _| {}).unwrap();
        let bwd = SolverParams {
            dt: -0.01,
            t_end: -t_end,
            snapshot_stride: usize::MAX,
            ..SolverParams::default()
        };
        let (mirror, _) = evolve(&f.conj(), &bwd, &p, |_, _| {}).unwrap();
        let diff = l2(&mirror.conj().with_time(t_end).sub(&forward));
        assert!(diff < 1e-10, "time-reversal defect {diff}");
    }

    #[test]
    fn boundary_mass_examples() {
        let f = gaussian(40.0 * PI, 1024);
        assert!(boundary_mass(&f, 0.1) < 1e-300);

        let g = Grid::new(10.0, 64, 1).unwrap();
        let ones = Field::from_fn(&g, 0.0, |_| Complex64::new(1.0, 0.0));
        let frac = boundary_mass(&ones, 0.1);
        assert!((frac - 0.1).abs() < 0.02, "uniform fraction {frac}");

        let g = Grid::new(20.0, 256, 1).unwrap();
        let shifted = Field::from_fn(&g, 0.0, |x| {
            let s = x[0] - 19.0;
            Complex64::new((-s * s).exp(), 0.0)
        });
        assert!(boundary_mass(&shifted, 0.1) > 0.3);
    }

    #[test]
    fn guard_aborts_drifting_packet() {
        let g = Grid::new(12.0, 512, 1).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| {
            Complex64::new((-x[0] * x[0]).exp(), 0.0) * Complex64::new(0.0, 2.0 * x[0]).exp()
        });
        let p = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.01,
            t_end: 6.0,
            snapshot_stride: 25,
            ..SolverParams::default()
        };
        let err = evolve(&f, &sp, &p, |_, _| {}).unwrap_err();
        match err {
            Error::GuardViolation { time, fraction, tolerance } => {
                assert!(time > 0.0 && time < 6.0, "violation at t={time}");
                assert!(fraction > tolerance);
            }
            other => panic!("expected guard violation, got {other:?}"),
        }
    }

    #[test]
    fn under_resolved_initial_field_is_rejected() {
        let g = Grid::new(10.0, 16, 1).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.01,
            t_end: 1.0,
            ..SolverParams::default()
        };
        let err = evolve(&f, &sp, &p, |_, _| {}).unwrap_err();
        assert!(matches!(err, Error::Diagnostic(_)), "got {err:?}");
    }

    #[test]
    fn non_finite_field_is_rejected() {
        let g = Grid::new(10.0, 64, 1).unwrap();
        let mut vals = vec![Complex64::new(0.1, 0.0); 64];
        vals[5] = Complex64::new(f64::INFINITY, 0.0);
        let f = Field::from_values(&g, 0.0, vals).unwrap();
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.01,
            t_end: 1.0,
            ..SolverParams::default()
        };
        assert!(matches!(
            evolve(&f, &sp, &p, |_, _| {}),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn unreachable_target_is_rejected() {
        let f = gaussian(10.0, 64);
        let p = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.01,
            t_end: -1.0,
            ..SolverParams::default()
        };
        assert!(evolve(&f, &sp, &p, |_, _| {}).is_err());
    }

    #[test]
    fn observer_sees_every_record() {
        let f = gaussian(30.0, 1024);
        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let sp = SolverParams {
            dt: 0.05,
            t_end: 1.0,
            snapshot_stride: 5,
            ..SolverParams::default()
        };
        let mut seen = Vec::new();
        let (_, series) = evolve(&f, &sp, &p, |field, obs| {
            assert_eq!(field.time(), obs.t);
            seen.push(obs.t);
        })
        .unwrap();
        assert_eq!(seen.len(), series.len());
        assert_eq!(seen[0], 0.0);
        assert_eq!(*seen.last().unwrap(), 1.0);
        // stride 5 at dt 0.05 → records every 0.25 time units
        assert_eq!(seen.len(), 5);
    }
}
