//! Second-order convergence of the split-step integrator.
//!
//! Halving the step should cut the error by four. The reference solution
//! is the same scheme at dt/16, so the ladder isolates the splitting error
//! from the (spectrally exact) space discretization.
//!
//! ```bash
//! cargo run --release --example strang_order
//! ```

use nlslab::dynamics::{evolve, PhysicsParams, SolverParams};
use nlslab::functionals::l2_norm_sq;
use nlslab::grid::{Field, Grid};
use num_complex::Complex64;
use std::f64::consts::PI;

fn solve(phi: &Field, dt: f64, p: &PhysicsParams) -> nlslab::Result<Field> {
    let sp = SolverParams {
        dt,
        t_end: 2.0,
        snapshot_stride: usize::MAX,
        ..SolverParams::default()
    };
    Ok(evolve(phi, &sp, p, |_, _| {})?.0)
}

fn main() -> nlslab::Result<()> {
    let p = PhysicsParams::new(-1.0, 4.0, 1)?;
    let grid = Grid::new(40.0 * PI, 4096, 1)?;
    let phi = Field::from_fn(&grid, 0.0, |x| {
        Complex64::new((-0.5 * x[0] * x[0]).exp(), 0.0)
    });

    let reference = solve(&phi, 0.02 / 16.0, &p)?;
    println!("{:>8} {:>14} {:>10}", "dt", "l2 error", "ratio");
    let mut previous: Option<f64> = None;
    for dt in [0.02, 0.01, 0.005] {
        let u = solve(&phi, dt, &p)?;
        let err = l2_norm_sq(&u.sub(&reference)).sqrt();
        match previous {
            Some(prev) => println!("{dt:>8.3} {err:>14.6e} {:>10.3}", prev / err),
            None => println!("{dt:>8.3} {err:>14.6e} {:>10}", "-"),
        }
        previous = Some(err);
    }
    println!("\nerror ratios near 4 confirm second order in dt");
    Ok(())
}
