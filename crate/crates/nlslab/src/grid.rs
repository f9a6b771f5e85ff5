//! Periodic grid substrate: centered coordinates, signed wavenumbers,
//! forward/inverse discrete Fourier transforms, and spectral differentiation.
//!
//! Conventions (fixed once, tested by Parseval):
//!
//! * the box is `[-L, L)` per axis with `M` points, `dx = 2L/M`;
//! * wavenumbers are `k_j = pi * j / L` for `j in [-M/2, M/2)`, laid out in
//!   standard DFT bin order (`0, 1, .., M/2-1, -M/2, .., -1`); the Nyquist
//!   bin carries `-pi*(M/2)/L`;
//! * the forward transform is unnormalized, the inverse carries `1/M` per
//!   axis, and every physical norm includes the `dx` measure weight, so
//!   discrete Parseval reads `dx * sum|f|^2 = (2L/M^2) * sum|fhat|^2`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Periodic spatial discretization of the plane or line.
///
/// Immutable after construction; cheap to share via `Arc` and safe to use
/// from several threads at once (transform plans are stateless per call).
pub struct Grid {
    dim: usize,
    half_length: f64,
    points: usize,
    dx: f64,
    coords: Vec<f64>,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.dim)
            .field("half_length", &self.half_length)
            .field("points", &self.points)
            .field("dx", &self.dx)
            .finish()
    }
}

impl Grid {
    /// Build a grid with box half-length `half_length`, `points` per axis
    /// (power of two, at least 8) and dimension `dim` (1 or 2).
    pub fn new(half_length: f64, points: usize, dim: usize) -> Result<Arc<Grid>> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::Config(format!(
                "grid half-length L must be positive and finite, got {half_length}"
            )));
        }
        if points < 8 || !points.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid points M must be a power of two >= 8, got {points}"
            )));
        }
        if dim != 1 && dim != 2 {
            return Err(Error::Config(format!(
                "grid dimension d must be 1 or 2, got {dim}"
            )));
        }
        let dx = 2.0 * half_length / points as f64;
        let coords: Vec<f64> = (0..points)
            .map(|j| -half_length + j as f64 * dx)
            .collect();
        let step = std::f64::consts::PI / half_length;
        let half = points / 2;
        let wavenumbers: Vec<f64> = (0..points)
            .map(|j| {
                let signed = if j < half {
                    j as isize
                } else {
                    j as isize - points as isize
                };
                step * signed as f64
            })
            .collect();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(points);
        let inverse = planner.plan_fft_inverse(points);
        Ok(Arc::new(Grid {
            dim,
            half_length,
            points,
            dx,
            coords,
            wavenumbers,
            forward,
            inverse,
        }))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Box half-length L; the domain is `[-L, L)` per axis.
    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    /// Points per axis.
    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Total sample count `M^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `dx^d`, the quadrature weight of one sample.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    /// Centered coordinates along one axis (identical for every axis).
    pub fn axis_coords(&self) -> &[f64] {
        &self.coords
    }

    /// Signed wavenumbers in DFT bin order (identical for every axis).
    pub fn axis_wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Decompose a row-major linear index into per-axis indices.
    #[inline]
    pub fn axis_indices(&self, linear: usize) -> [usize; 2] {
        match self.dim {
            1 => [linear, 0],
            _ => [linear / self.points, linear % self.points],
        }
    }

    /// Squared distance from the origin of the sample at `linear`.
    #[inline]
    pub fn radius_sq(&self, linear: usize) -> f64 {
        let [i0, i1] = self.axis_indices(linear);
        let x = self.coords[i0];
        if self.dim == 1 {
            x * x
        } else {
            let y = self.coords[i1];
            x * x + y * y
        }
    }

    /// Squared wavenumber magnitude of the spectral bin at `linear`.
    #[inline]
    pub fn wavenumber_sq(&self, linear: usize) -> f64 {
        let [i0, i1] = self.axis_indices(linear);
        let k = self.wavenumbers[i0];
        if self.dim == 1 {
            k * k
        } else {
            let l = self.wavenumbers[i1];
            k * k + l * l
        }
    }

    /// True if two grids are structurally identical.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.dim == other.dim && self.points == other.points && self.half_length == other.half_length
    }

    fn fft_axes(&self, values: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let m = self.points;
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        match self.dim {
            1 => plan.process_with_scratch(values, &mut scratch),
            _ => {
                // rows are contiguous
                for row in values.chunks_exact_mut(m) {
                    plan.process_with_scratch(row, &mut scratch);
                }
                // columns via gather/scatter
                let mut col = vec![Complex64::default(); m];
                for j in 0..m {
                    for i in 0..m {
                        col[i] = values[i * m + j];
                    }
                    plan.process_with_scratch(&mut col, &mut scratch);
                    for i in 0..m {
                        values[i * m + j] = col[i];
                    }
                }
            }
        }
    }
}

/// Complex samples on a [`Grid`] together with the physical time they
/// represent. Immutable value type; operations return new fields.
#[derive(Debug, Clone)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    time: f64,
}

impl Field {
    /// Sample `f` over the grid, receiving per-axis coordinates.
    pub fn from_fn(grid: &Arc<Grid>, time: f64, mut f: impl FnMut(&[f64]) -> Complex64) -> Field {
        let m = grid.points_per_axis();
        let mut values = Vec::with_capacity(grid.len());
        match grid.dim() {
            1 => {
                for &x in grid.axis_coords() {
                    values.push(f(&[x]));
                }
            }
            _ => {
                for i in 0..m {
                    let x = grid.axis_coords()[i];
                    for j in 0..m {
                        let y = grid.axis_coords()[j];
                        values.push(f(&[x, y]));
                    }
                }
            }
        }
        Field {
            grid: Arc::clone(grid),
            values,
            time,
        }
    }

    pub fn zeros(grid: &Arc<Grid>, time: f64) -> Field {
        Field {
            grid: Arc::clone(grid),
            values: vec![Complex64::default(); grid.len()],
            time,
        }
    }

    /// Wrap raw samples; `values.len()` must equal `grid.len()`.
    pub fn from_values(grid: &Arc<Grid>, time: f64, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != grid.len() {
            return Err(Error::Config(format!(
                "field sample count {} does not match grid size {}",
                values.len(),
                grid.len()
            )));
        }
        Ok(Field {
            grid: Arc::clone(grid),
            values,
            time,
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> Field {
        self.time = time;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Pointwise difference `self - other`; times must refer to the same
    /// frame but are not checked (the caller owns that bookkeeping).
    pub fn sub(&self, other: &Field) -> Field {
        assert!(
            self.grid.same_layout(&other.grid),
            "field subtraction requires identical grids"
        );
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Field {
            grid: Arc::clone(&self.grid),
            values,
            time: self.time,
        }
    }

    pub fn scale(&self, c: Complex64) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v * c).collect(),
            time: self.time,
        }
    }

    /// Complex conjugate of every sample, time negated: the time-reversal
    /// companion field.
    pub fn conj_reversed(&self) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v.conj()).collect(),
            time: -self.time,
        }
    }

    /// Complex conjugate of every sample with the time tag kept.
    pub fn conj(&self) -> Field {
        Field {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().map(|v| v.conj()).collect(),
            time: self.time,
        }
    }
}

/// Transform-space samples of a [`Field`], unnormalized forward convention.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid>,
    values: Vec<Complex64>,
    time: f64,
}

impl SpectralField {
    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn with_time(mut self, time: f64) -> SpectralField {
        self.time = time;
        self
    }
}

/// Forward DFT along every axis (unnormalized).
pub fn forward_transform(f: &Field) -> SpectralField {
    let mut values = f.values.clone();
    f.grid.fft_axes(&mut values, &f.grid.forward);
    SpectralField {
        grid: Arc::clone(&f.grid),
        values,
        time: f.time,
    }
}

/// Inverse DFT along every axis, carrying the `1/M` per-axis normalization.
pub fn inverse_transform(s: &SpectralField) -> Field {
    let mut values = s.values.clone();
    s.grid.fft_axes(&mut values, &s.grid.inverse);
    // 1/M per axis, i.e. 1/M^d in total
    let scale = 1.0 / s.grid.len() as f64;
    for v in &mut values {
        *v *= scale;
    }
    Field {
        grid: Arc::clone(&s.grid),
        values,
        time: s.time,
    }
}

/// Per-axis spatial derivatives computed as multiplication by `i*k` in
/// transform space. Returns `d` fields in axis order.
pub fn spectral_gradient(f: &Field) -> Vec<Field> {
    let spectrum = forward_transform(f);
    let grid = &f.grid;
    let m = grid.points_per_axis();
    let mut out = Vec::with_capacity(grid.dim());
    for axis in 0..grid.dim() {
        let mut axis_spec = spectrum.clone();
        for (idx, v) in axis_spec.values_mut().iter_mut().enumerate() {
            let [i0, i1] = grid.axis_indices(idx);
            let bin = if axis == 0 { i0 } else { i1 };
            debug_assert!(bin < m);
            let k = grid.axis_wavenumbers()[bin];
            *v *= Complex64::new(0.0, k);
        }
        out.push(inverse_transform(&axis_spec));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
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

    /// Composite Simpson over the periodic box, wrapping the first sample
    /// as the endpoint. Independent of the dx-weighted sums used by the
    /// library (different quadrature weights).
    fn simpson_periodic(samples: &[f64], dx: f64) -> f64 {
        let mut acc = samples[0] + samples[0];
        for (j, &s) in samples.iter().enumerate().skip(1) {
            acc += if j % 2 == 1 { 4.0 * s } else { 2.0 * s };
        }
        acc * dx / 3.0
    }

    #[test]
    fn grid_layout_matches_conventions() {
        let g = Grid::new(10.0, 8, 1).unwrap();
        assert_eq!(g.dx(), 2.5);
        assert_eq!(g.axis_coords()[0], -10.0);
        assert_eq!(g.axis_coords()[7], 7.5);
        let step = PI / 10.0;
        let expect: Vec<f64> = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0]
            .iter()
            .map(|j| j * step)
            .collect();
        for (a, b) in g.axis_wavenumbers().iter().zip(&expect) {
            assert!((a - b).abs() < 1e-15, "{a} vs {b}");
        }
        let g = Grid::new(40.0 * PI, 4096, 1).unwrap();
        assert!(rel_err(g.dx(), 80.0 * PI / 4096.0) < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(Grid::new(10.0, 7, 1).is_err());
        assert!(Grid::new(10.0, 4, 1).is_err());
        assert!(Grid::new(0.0, 8, 1).is_err());
        assert!(Grid::new(-3.0, 8, 1).is_err());
        assert!(Grid::new(10.0, 8, 3).is_err());
        assert!(Grid::new(10.0, 8, 0).is_err());
        assert!(Grid::new(f64::NAN, 8, 1).is_err());
    }

    #[test]
    fn plane_wave_occupies_single_bin() {
        let g = Grid::new(5.0, 16, 1).unwrap();
        let k = g.axis_wavenumbers()[3];
        let f = Field::from_fn(&g, 0.0, |x| Complex64::new(0.0, k * x[0]).exp());
        let s = forward_transform(&f);
        // samples start at x = -L, so bin j carries the offset phase (-1)^j
        for (j, v) in s.values().iter().enumerate() {
            if j == 3 {
                assert!((v - Complex64::new(-16.0, 0.0)).norm() < 1e-12 * 16.0);
            } else {
                assert!(v.norm() < 1e-11, "bin {j} holds {v}");
            }
        }
    }

    #[test]
    fn plane_wave_occupies_single_bin_2d() {
        let g = Grid::new(5.0, 16, 2).unwrap();
        let kx = g.axis_wavenumbers()[2];
        let ky = g.axis_wavenumbers()[13];
        let f = Field::from_fn(&g, 0.0, |x| {
            Complex64::new(0.0, kx * x[0] + ky * x[1]).exp()
        });
        let s = forward_transform(&f);
        let hot = 2 * 16 + 13;
        // offset phases multiply: (-1)^2 * (-1)^13 = -1
        for (j, v) in s.values().iter().enumerate() {
            if j == hot {
                assert!((v - Complex64::new(-256.0, 0.0)).norm() < 1e-11 * 256.0);
            } else {
                assert!(v.norm() < 1e-9, "bin {j} holds {v}");
            }
        }
    }

    #[test]
    fn transforms_round_trip() {
        for dim in [1usize, 2] {
            let g = Grid::new(7.0, 32, dim).unwrap();
            let f = Field::from_fn(&g, 1.5, |x| {
                let r: f64 = x.iter().map(|c| c * c).sum();
                Complex64::new((-0.3 * r).exp() * (x[0] * 1.7).cos(), (0.9 * x[0]).sin())
            });
            let back = inverse_transform(&forward_transform(&f));
            let peak = f.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
            assert!(max_abs_diff(&f, &back) < 1e-13 * peak);
            assert_eq!(back.time(), 1.5);
        }
    }

    #[test]
    fn parseval_and_gaussian_mass() {
        // reference: integral of exp(-2x^2) over the line is sqrt(pi/2)
        let g = Grid::new(10.0, 256, 1).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let phys: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx();
        let s = forward_transform(&f);
        let spec: f64 = s.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
            * (2.0 * g.half_length() / (g.len() as f64 * g.len() as f64));
        let exact = (PI / 2.0).sqrt();
        assert!(rel_err(phys, exact) < 1e-13, "mass {phys} vs {exact}");
        assert!(rel_err(spec, exact) < 1e-12, "parseval {spec} vs {exact}");

        let dens: Vec<f64> = f.values().iter().map(|v| v.norm_sqr()).collect();
        let simpson = simpson_periodic(&dens, g.dx());
        assert!(rel_err(simpson, exact) < 1e-12, "simpson {simpson}");
    }

    #[test]
    fn gradient_is_exact_on_plane_waves() {
        let g = Grid::new(5.0, 64, 1).unwrap();
        let k = g.axis_wavenumbers()[5];
        let f = Field::from_fn(&g, 0.0, |x| Complex64::new(0.0, k * x[0]).exp());
        let d = spectral_gradient(&f);
        assert_eq!(d.len(), 1);
        let expect = f.scale(Complex64::new(0.0, k));
        assert!(max_abs_diff(&d[0], &expect) < 1e-10);

        let c = Field::from_fn(&g, 0.0, |_| Complex64::new(2.0, -1.0));
        let dc = spectral_gradient(&c);
        assert!(dc[0].values().iter().all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn gradient_matches_analytic_gaussian() {
        let g = Grid::new(10.0, 256, 1).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
        let d = spectral_gradient(&f);
        let expect = Field::from_fn(&g, 0.0, |x| {
            Complex64::new(-2.0 * x[0] * (-x[0] * x[0]).exp(), 0.0)
        });
        assert!(max_abs_diff(&d[0], &expect) < 1e-10);
    }

    #[test]
    fn gradient_matches_analytic_gaussian_2d() {
        let g = Grid::new(8.0, 64, 2).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| {
            Complex64::new((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(), 0.0)
        });
        let d = spectral_gradient(&f);
        assert_eq!(d.len(), 2);
        let e0 = Field::from_fn(&g, 0.0, |x| {
            Complex64::new(-x[0] * (-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(), 0.0)
        });
        let e1 = Field::from_fn(&g, 0.0, |x| {
            Complex64::new(
                -2.0 * x[1] * (-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(),
                0.0,
            )
        });
        assert!(max_abs_diff(&d[0], &e0) < 1e-9);
        assert!(max_abs_diff(&d[1], &e1) < 1e-9);
    }

    #[test]
    fn axis_indices_and_radius() {
        let g = Grid::new(4.0, 8, 2).unwrap();
        assert_eq!(g.axis_indices(0), [0, 0]);
        assert_eq!(g.axis_indices(8 * 3 + 5), [3, 5]);
        let r = g.radius_sq(8 * 3 + 5);
        let x = g.axis_coords()[3];
        let y = g.axis_coords()[5];
        assert_eq!(r, x * x + y * y);
    }

    proptest! {
        #[test]
        fn round_trip_random_fields(seed in 0u64..1000) {
            let g = Grid::new(6.0, 16, 1).unwrap();
            let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let vals: Vec<Complex64> = (0..16).map(|_| Complex64::new(next(), next())).collect();
            let f = Field::from_values(&g, 0.0, vals).unwrap();
            let back = inverse_transform(&forward_transform(&f));
            prop_assert!(max_abs_diff(&f, &back) < 1e-13);
        }

        #[test]
        fn forward_transform_is_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let g = Grid::new(6.0, 16, 1).unwrap();
            let mut state = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let u: Vec<Complex64> = (0..16).map(|_| Complex64::new(next(), next())).collect();
            let v: Vec<Complex64> = (0..16).map(|_| Complex64::new(next(), next())).collect();
            let fu = Field::from_values(&g, 0.0, u.clone()).unwrap();
            let fv = Field::from_values(&g, 0.0, v.clone()).unwrap();
            let mix: Vec<Complex64> = u.iter().zip(&v).map(|(x, y)| x * a + y * b).collect();
            let fm = Field::from_values(&g, 0.0, mix).unwrap();
            let su = forward_transform(&fu);
            let sv = forward_transform(&fv);
            let sm = forward_transform(&fm);
            for ((x, y), z) in su.values().iter().zip(sv.values()).zip(sm.values()) {
                prop_assert!((x * a + y * b - z).norm() < 1e-11);
            }
        }

        #[test]
        fn parseval_holds_for_random_fields(seed in 0u64..1000) {
            let g = Grid::new(9.0, 32, 1).unwrap();
            let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
            let mut next = move || {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
            };
            let vals: Vec<Complex64> = (0..32).map(|_| Complex64::new(next(), next())).collect();
            let f = Field::from_values(&g, 0.0, vals).unwrap();
            let phys: f64 = f.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * g.dx();
            let s = forward_transform(&f);
            let m = g.len() as f64;
            let spec: f64 = s.values().iter().map(|v| v.norm_sqr()).sum::<f64>()
                * (2.0 * g.half_length() / (m * m));
            prop_assert!(rel_err(phys, spec) < 1e-12);
        }
    }
}
