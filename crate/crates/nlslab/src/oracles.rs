//! Closed-form ground truth independent of the spectral solver.
//!
//! Generalized Gaussians are closed under free evolution, so every
//! functional of their free flow is analytically computable. That gives an
//! oracle family for the propagator, for the exact quadratic growth of the
//! variance under free flow, and for the mass-critical variance law of the
//! full nonlinear equation.

use std::sync::Arc;

use num_complex::Complex64;

use crate::dynamics::PhysicsParams;
use crate::error::{Error, Result};
use crate::functionals::Observables;
use crate::grid::{Field, Grid};

/// Parameters of the profile `amp · ∏_axes e^{i v x_a} e^{−a (x_a − x₀)²}`
/// (isotropic per-axis product in dimension two).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    /// Complex width; the real part must be positive.
    pub a: Complex64,
    pub amp: Complex64,
    /// Per-axis center offset.
    pub center: f64,
    /// Per-axis carrier wavenumber.
    pub boost: f64,
}

impl GaussianSpec {
    pub fn new(a: Complex64, amp: Complex64, center: f64, boost: f64) -> Result<GaussianSpec> {
        if !(a.re > 0.0) || !a.im.is_finite() {
            return Err(Error::Domain(format!(
                "gaussian width must have positive real part, got {a}"
            )));
        }
        if !(amp.re.is_finite() && amp.im.is_finite() && center.is_finite() && boost.is_finite()) {
            return Err(Error::Domain("gaussian parameters must be finite".into()));
        }
        Ok(GaussianSpec { a, amp, center, boost })
    }

    /// Parameters of the freely evolved packet at time `t` in dimension
    /// `d`: the family is closed, with
    /// `s = 1 + 4iat`, `a → a/s`, `center → center + 2vt`,
    /// `amp → amp · e^{−iv²t} · s^{−d/2}` and the boost unchanged.
    pub fn evolved(&self, t: f64, d: usize) -> GaussianSpec {
        let s = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 4.0 * t) * self.a;
        // s stays off the negative real axis (Im s = 4t·Re a vanishes only
        // at t = 0 where s = 1), so the principal branch is the continuous
        // one and composes along the group
        let spread = match d {
            1 => s.sqrt().inv(),
            _ => s.inv(),
        };
        let v = self.boost;
        // one e^{−iv²t} Galilean phase per axis
        let phase = Complex64::from_polar(1.0, -v * v * t * d as f64);
        GaussianSpec {
            a: self.a / s,
            amp: self.amp * phase * spread,
            center: self.center + 2.0 * v * t,
            boost: v,
        }
    }

    /// Sample the profile on `grid` with time tag `time`.
    pub fn sample(&self, grid: &Arc<Grid>, time: f64) -> Field {
        let a = self.a;
        let v = self.boost;
        let c = self.center;
        let amp = self.amp;
        Field::from_fn(grid, time, |x| {
            let mut acc = amp;
            for &xa in x {
                let shifted = xa - c;
                let exponent = Complex64::new(0.0, v * xa) - a * shifted * shifted;
                acc *= exponent.exp();
            }
            acc
        })
    }
}

/// Exact free evolution of a generalized Gaussian, sampled on `grid` at
/// time `t`.
pub fn gaussian_free_evolution(g: &GaussianSpec, t: f64, grid: &Arc<Grid>) -> Result<Field> {
    if !(g.a.re > 0.0) {
        return Err(Error::Domain(format!(
            "gaussian width must have positive real part, got {}",
            g.a
        )));
    }
    Ok(g.evolved(t, grid.dim()).sample(grid, t))
}

/// Coefficients of the exact variance growth under free flow:
/// `‖x T(t)ψ‖² = c0 + c1·t + c2·t²` with `c0 = h(ψ)`, `c1 = m1(ψ)`,
/// `c2 = 4‖∇ψ‖²`, for every t.
pub fn variance_polynomial(psi_obs: &Observables) -> (f64, f64, f64) {
    (psi_obs.h, psi_obs.m1, 4.0 * psi_obs.grad_sq)
}

/// Predicted variance of the *nonlinear* flow at the mass-critical power
/// `α = 4/d`, from initial data only:
/// `h(t) = h(0) + m1(φ)·t + 8E(φ)·t²`.
pub fn mass_critical_variance(phi_obs: &Observables, p: &PhysicsParams, t: f64) -> Result<f64> {
    if (p.alpha * p.d as f64 - 4.0).abs() >= 1e-12 {
        return Err(Error::Domain(format!(
            "variance law h = h0 + m1·t + 8E·t² holds only at the mass-critical power 4/d, \
             got α={} in dimension {}",
            p.alpha, p.d
        )));
    }
    Ok(phi_obs.h + phi_obs.m1 * t + 8.0 * phi_obs.energy * t * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::free_propagate;
    use crate::functionals::{self, observables};
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

    fn unit_gaussian() -> GaussianSpec {
        GaussianSpec::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 0.0, 0.0).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GaussianSpec::new(Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0), 0.0, 0.0)
            .is_err());
        assert!(GaussianSpec::new(Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0), 0.0, 0.0)
            .is_err());
        assert!(GaussianSpec::new(
            Complex64::new(1.0, 0.0),
            Complex64::new(f64::NAN, 0.0),
            0.0,
            0.0
        )
        .is_err());
    }

    #[test]
    fn zero_time_returns_initial_profile() {
        let grid = Grid::new(20.0, 256, 1).unwrap();
        let g = GaussianSpec::new(
            Complex64::new(0.8, 0.3),
            Complex64::new(0.5, -0.2),
            1.5,
            0.7,
        )
        .unwrap();
        let evolved = gaussian_free_evolution(&g, 0.0, &grid).unwrap();
        let initial = g.sample(&grid, 0.0);
        assert!(max_abs_diff(&evolved, &initial) < 1e-15);
    }

    #[test]
    fn closed_form_matches_spectral_propagator() {
        let grid = Grid::new(40.0 * PI, 4096, 1).unwrap();
        let g = unit_gaussian();
        let numeric = free_propagate(&g.sample(&grid, 0.0), 1.0);
        let exact = gaussian_free_evolution(&g, 1.0, &grid).unwrap();
        let err = max_abs_diff(&numeric, &exact);
        assert!(err < 1e-8, "max pointwise error {err}");
    }

    #[test]
    fn closed_form_matches_spectral_propagator_boosted_2d() {
        let grid = Grid::new(30.0, 256, 2).unwrap();
        let g = GaussianSpec::new(
            Complex64::new(1.0, -0.4),
            Complex64::new(0.9, 0.1),
            -0.8,
            0.6,
        )
        .unwrap();
        let numeric = free_propagate(&g.sample(&grid, 0.0), 0.8);
        let exact = gaussian_free_evolution(&g, 0.8, &grid).unwrap();
        let err = max_abs_diff(&numeric, &exact);
        assert!(err < 1e-9, "max pointwise error {err}");
    }

    #[test]
    fn evolution_preserves_mass() {
        let grid = Grid::new(120.0, 4096, 1).unwrap();
        let g = GaussianSpec::new(
            Complex64::new(1.2, 0.5),
            Complex64::new(0.7, 0.4),
            2.0,
            -0.5,
        )
        .unwrap();
        let m0 = functionals::l2_norm_sq(&g.sample(&grid, 0.0));
        for t in [0.5, 2.0, 5.0] {
            let f = gaussian_free_evolution(&g, t, &grid).unwrap();
            let m = functionals::l2_norm_sq(&f);
            assert!(rel_err(m, m0) < 1e-12, "t={t}: {m} vs {m0}");
        }
    }

    #[test]
    fn parameter_map_satisfies_group_law() {
        let g = GaussianSpec::new(
            Complex64::new(0.6, -0.9),
            Complex64::new(1.1, 0.3),
            -1.0,
            0.8,
        )
        .unwrap();
        for d in [1usize, 2] {
            let two_leg = g.evolved(0.7, d).evolved(1.6, d);
            let direct = g.evolved(2.3, d);
            assert!((two_leg.a - direct.a).norm() < 1e-12);
            assert!((two_leg.amp - direct.amp).norm() < 1e-12);
            assert!((two_leg.center - direct.center).abs() < 1e-12);
            assert_eq!(two_leg.boost, direct.boost);
        }
        // and at the field level
        let grid = Grid::new(60.0, 1024, 1).unwrap();
        let legs = gaussian_free_evolution(&g.evolved(0.7, 1), 1.6, &grid).unwrap();
        let direct = gaussian_free_evolution(&g, 2.3, &grid).unwrap();
        assert!(max_abs_diff(&legs, &direct) < 1e-10);
    }

    #[test]
    fn variance_polynomial_coefficients() {
        let grid = Grid::new(12.0, 512, 1).unwrap();
        let p = PhysicsParams::new(0.0, 4.0, 1).unwrap();

        let real = unit_gaussian().sample(&grid, 0.0);
        let (c0, c1, c2) = variance_polynomial(&observables(&real, &p).unwrap());
        let half_pi = (PI / 2.0).sqrt();
        assert!(rel_err(c0, 0.25 * half_pi) < 1e-11);
        assert!(c1.abs() < 1e-10, "real profile must have c1 = 0, got {c1}");
        assert!(rel_err(c2, 4.0 * half_pi) < 1e-11);

        let chirped = GaussianSpec::new(
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, 0.0),
            0.0,
            0.0,
        )
        .unwrap()
        .sample(&grid, 0.0);
        let (_, c1, c2) = variance_polynomial(&observables(&chirped, &p).unwrap());
        assert!(rel_err(c2, 8.0 * half_pi) < 1e-11, "c2 {c2}");
        assert!(rel_err(c1, -2.0 * half_pi) < 1e-11, "c1 {c1}");
    }

    #[test]
    fn variance_polynomial_tracks_free_flow() {
        let grid = Grid::new(200.0 * PI, 8192, 1).unwrap();
        let p = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        let psi = GaussianSpec::new(
            Complex64::new(1.0, 1.0),
            Complex64::new(1.0, 0.0),
            0.0,
            0.0,
        )
        .unwrap()
        .sample(&grid, 0.0);
        let (c0, c1, c2) = variance_polynomial(&observables(&psi, &p).unwrap());
        for t in [0.5, 1.0, 2.0, 5.0, 10.0] {
            let measured = functionals::variance(&free_propagate(&psi, t));
            let predicted = c0 + c1 * t + c2 * t * t;
            let denom = c0 + c2 * t * t;
            assert!(
                (measured - predicted).abs() / denom < 1e-8,
                "t={t}: {measured} vs {predicted}"
            );
        }
    }

    #[test]
    fn mass_critical_variance_examples() {
        let grid = Grid::new(12.0, 512, 1).unwrap();
        let phi = unit_gaussian().sample(&grid, 0.0);

        let p = PhysicsParams::new(-1.0, 4.0, 1).unwrap();
        let obs = observables(&phi, &p).unwrap();
        assert_eq!(mass_critical_variance(&obs, &p, 0.0).unwrap(), obs.h);

        // closed form: h(5) = ¼√(π/2) + 0 + 200·(½√(π/2) + √(π/6)/6)
        let energy = 0.5 * (PI / 2.0).sqrt() + (PI / 6.0).sqrt() / 6.0;
        let predicted = mass_critical_variance(&obs, &p, 5.0).unwrap();
        let exact = 0.25 * (PI / 2.0).sqrt() + 200.0 * energy;
        assert!(rel_err(predicted, exact) < 1e-12, "{predicted} vs {exact}");

        // λ=0: the law reduces to the free variance polynomial
        let linear = PhysicsParams::new(0.0, 4.0, 1).unwrap();
        let obs_lin = observables(&phi, &linear).unwrap();
        let (c0, c1, c2) = variance_polynomial(&obs_lin);
        for t in [0.3, 1.7] {
            let law = mass_critical_variance(&obs_lin, &linear, t).unwrap();
            assert!(rel_err(law, c0 + c1 * t + c2 * t * t) < 1e-14);
        }

        let off = PhysicsParams::new(-1.0, 3.0, 1).unwrap();
        assert!(mass_critical_variance(&obs, &off, 1.0).is_err());
    }
}
