//! Uniform periodic grids, sampled fields, ball windows and mollification.
//!
//! Every grid is a torus `[0, L)^dim` sampled at `n` points per axis, stored
//! row-major (the last axis varies fastest). Windows are measured with the
//! periodic (minimum image) distance, and stencils are lists of integer
//! offsets applied with wrap-around.

use std::sync::OnceLock;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::Transform;
use crate::quad;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    n_per_axis: usize,
    period: f64,
}

impl Grid {
    pub fn new(dim: usize, n_per_axis: usize, period: f64) -> Result<Grid> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::InvalidGrid(format!("dimension {dim} is not 1 or 2")));
        }
        if n_per_axis < 8 || !n_per_axis.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_per_axis = {n_per_axis} must be a power of two >= 8"
            )));
        }
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::InvalidGrid(format!("period {period} must be positive")));
        }
        Ok(Grid {
            dim,
            n_per_axis,
            period,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n_per_axis
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n_per_axis as f64
    }

    /// Total number of samples, `n^dim`.
    pub fn len(&self) -> usize {
        self.n_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume element `h^dim`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 2] {
        match self.dim {
            1 => [flat, 0],
            _ => [flat / self.n_per_axis, flat % self.n_per_axis],
        }
    }

    pub fn index_of(&self, point: &[usize]) -> Result<usize> {
        if point.len() != self.dim || point.iter().any(|&i| i >= self.n_per_axis) {
            return Err(Error::param(
                "center",
                format!("{point:?} is not a grid point of a {}-d grid with n = {}", self.dim, self.n_per_axis),
            ));
        }
        Ok(match self.dim {
            1 => point[0],
            _ => point[0] * self.n_per_axis + point[1],
        })
    }

    pub fn point(&self, flat: usize) -> Vec<usize> {
        self.multi_index(flat)[..self.dim].to_vec()
    }

    pub fn coords(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        let [i, j] = self.multi_index(flat);
        match self.dim {
            1 => [i as f64 * h, 0.0],
            _ => [i as f64 * h, j as f64 * h],
        }
    }

    /// Flat index of `flat + offset` with periodic wrap.
    #[inline]
    pub fn shift(&self, flat: usize, offset: [i64; 2]) -> usize {
        let n = self.n_per_axis as i64;
        match self.dim {
            1 => (flat as i64 + offset[0]).rem_euclid(n) as usize,
            _ => {
                let i = (flat as i64 / n + offset[0]).rem_euclid(n);
                let j = (flat as i64 % n + offset[1]).rem_euclid(n);
                (i * n + j) as usize
            }
        }
    }

    /// Minimum-image displacement from `a` to `b`, in grid steps.
    pub fn periodic_offset(&self, a: usize, b: usize) -> [i64; 2] {
        let n = self.n_per_axis as i64;
        let wrap = |d: i64| -> i64 {
            let d = d.rem_euclid(n);
            if d > n / 2 {
                d - n
            } else {
                d
            }
        };
        let pa = self.multi_index(a);
        let pb = self.multi_index(b);
        [
            wrap(pb[0] as i64 - pa[0] as i64),
            if self.dim == 2 { wrap(pb[1] as i64 - pa[1] as i64) } else { 0 },
        ]
    }

    /// Grid points on a sub-lattice with the given stride along every axis.
    pub fn strided_points(&self, stride: usize) -> Vec<usize> {
        let stride = stride.max(1);
        let axis: Vec<usize> = (0..self.n_per_axis).step_by(stride).collect();
        match self.dim {
            1 => axis,
            _ => axis
                .iter()
                .flat_map(|&i| axis.iter().map(move |&j| i * self.n_per_axis + j))
                .collect(),
        }
    }
}

/// A real-valued function sampled on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledField {
    grid: Grid,
    values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<SampledField> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if let Some((flat, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                index: grid.point(flat),
                value,
            });
        }
        Ok(SampledField { grid, values })
    }

    /// Evaluates `f` at the coordinates of every grid point.
    pub fn sample<F>(grid: &Grid, f: F) -> Result<SampledField>
    where
        F: Fn(&[f64]) -> f64,
    {
        let values = (0..grid.len())
            .map(|flat| {
                let x = grid.coords(flat);
                f(&x[..grid.dim()])
            })
            .collect();
        SampledField::new(grid.clone(), values)
    }

    pub fn constant(grid: &Grid, c: f64) -> SampledField {
        SampledField {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        let anchor = self.values[0];
        anchor + self.values.iter().map(|v| v - anchor).sum::<f64>() / self.values.len() as f64
    }

    pub fn scaled(&self, lambda: f64) -> SampledField {
        self.map(|v| lambda * v)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> SampledField {
        SampledField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SampledField, b: f64) -> Result<SampledField> {
        if other.grid != self.grid {
            return Err(Error::param("other", "fields live on different grids"));
        }
        Ok(SampledField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(x, y)| a * x + b * y)
                .collect(),
        })
    }

    /// Field translated by `offset` grid steps: `out(x) = self(x - offset)`.
    pub fn translated(&self, offset: [i64; 2]) -> SampledField {
        let neg = [-offset[0], -offset[1]];
        let values = (0..self.grid.len())
            .map(|flat| self.values[self.grid.shift(flat, neg)])
            .collect();
        SampledField {
            grid: self.grid.clone(),
            values,
        }
    }

    /// Every `factor`-th sample along each axis, on the grid with `n / factor`.
    pub fn downsample(&self, factor: usize) -> Result<SampledField> {
        let grid = Grid::new(self.grid.dim, self.grid.n_per_axis / factor, self.grid.period)?;
        let values = (0..grid.len())
            .map(|flat| {
                let [i, j] = grid.multi_index(flat);
                match grid.dim {
                    1 => self.values[i * factor],
                    _ => self.values[(i * factor) * self.grid.n_per_axis + j * factor],
                }
            })
            .collect();
        SampledField::new(grid, values)
    }

    #[inline]
    pub(crate) fn at(&self, flat: usize) -> f64 {
        self.values[flat]
    }
}

/// A periodic ball `B_r(x)` centred on a grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallWindow {
    pub center: usize,
    pub radius: f64,
}

impl BallWindow {
    pub fn new(grid: &Grid, center: usize, radius: f64) -> Result<BallWindow> {
        if center >= grid.len() {
            return Err(Error::param("center", format!("flat index {center} out of range")));
        }
        if !(radius >= grid.spacing()) {
            return Err(Error::Window {
                center: grid.point(center),
                radius,
                reason: format!("is smaller than the grid spacing {}", grid.spacing()),
            });
        }
        if radius > grid.period() / 4.0 {
            return Err(Error::Window {
                center: grid.point(center),
                radius,
                reason: format!("exceeds a quarter period {}", grid.period() / 4.0),
            });
        }
        Ok(BallWindow { center, radius })
    }

    pub fn at(grid: &Grid, point: &[usize], radius: f64) -> Result<BallWindow> {
        BallWindow::new(grid, grid.index_of(point)?, radius)
    }
}

/// Integer offsets (in grid steps) describing a window shape.
#[derive(Debug, Clone)]
pub struct Stencil {
    offsets: Vec<[i64; 2]>,
}

impl Stencil {
    fn collect<P: Fn(f64) -> bool>(grid: &Grid, reach: f64, keep: P) -> Stencil {
        let h = grid.spacing();
        let m = (reach / h).ceil() as i64 + 1;
        let mut offsets = Vec::new();
        let range2 = if grid.dim() == 2 { -m..=m } else { 0..=0 };
        for a in -m..=m {
            for b in range2.clone() {
                let d2 = ((a * a + b * b) as f64) * h * h;
                if keep(d2) {
                    offsets.push([a, b]);
                }
            }
        }
        Stencil { offsets }
    }

    /// Offsets `o` with `|o|·h < r`.
    pub fn ball(grid: &Grid, radius: f64) -> Stencil {
        let r2 = radius * radius;
        Stencil::collect(grid, radius, |d2| d2 < r2)
    }

    /// Offsets with `r/2 <= |o|·h <= r`.
    pub fn annulus(grid: &Grid, radius: f64) -> Stencil {
        let (lo, hi) = (0.25 * radius * radius, radius * radius);
        Stencil::collect(grid, radius, |d2| d2 >= lo && d2 <= hi)
    }

    /// Offsets inside the axis-aligned cube of the given side, centred on 0:
    /// `|o_i|·h < side/2` on every axis.
    pub fn cube(grid: &Grid, side: f64) -> Stencil {
        let h = grid.spacing();
        let m = ((side / 2.0) / h).ceil() as i64;
        let mut offsets = Vec::new();
        let inside = |a: i64| (a.abs() as f64) * h < side / 2.0;
        let range2 = if grid.dim() == 2 { -m..=m } else { 0..=0 };
        for a in -m..=m {
            for b in range2.clone() {
                if inside(a) && (grid.dim() == 1 || inside(b)) {
                    offsets.push([a, b]);
                }
            }
        }
        Stencil { offsets }
    }

    pub fn offsets(&self) -> &[[i64; 2]] {
        &self.offsets
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallMean {
    pub mean: f64,
    /// Number of grid points inside the window.
    pub count: usize,
}

/// Average of the field over the grid points strictly inside the window.
pub fn ball_mean(field: &SampledField, window: &BallWindow) -> Result<BallMean> {
    let grid = field.grid();
    let stencil = Stencil::ball(grid, window.radius);
    if stencil.is_empty() {
        return Err(Error::Window {
            center: grid.point(window.center),
            radius: window.radius,
            reason: "contains no grid point".into(),
        });
    }
    Ok(BallMean {
        mean: anchored_mean(field, window.center, &stencil),
        count: stencil.len(),
    })
}

/// Mean over a stencil, accumulated relative to the centre value so that a
/// constant field returns that constant exactly.
pub(crate) fn anchored_mean(field: &SampledField, center: usize, stencil: &Stencil) -> f64 {
    let grid = field.grid();
    let anchor = field.at(center);
    let sum: f64 = stencil
        .offsets()
        .iter()
        .map(|&o| field.at(grid.shift(center, o)) - anchor)
        .sum();
    anchor + sum / stencil.len() as f64
}

/// The standard bump `exp(-1/(1-|x|^2))` rescaled to radius `scale`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    pub scale: f64,
}

impl Mollifier {
    pub const PROFILE: &'static str = "standard bump exp(-1/(1-|x|^2)), unit integral";

    pub fn bump(scale: f64) -> Result<Mollifier> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::param("scale", format!("{scale} must be positive")));
        }
        Ok(Mollifier { scale })
    }

    /// Unnormalised profile as a function of `s = |x| / scale`.
    pub fn raw_profile(s: f64) -> f64 {
        if s.abs() >= 1.0 {
            0.0
        } else {
            (-1.0 / (1.0 - s * s)).exp()
        }
    }

    /// Integral of the raw profile over the unit ball of dimension `dim`.
    pub fn normalisation(dim: usize) -> f64 {
        static CONSTANTS: OnceLock<[f64; 2]> = OnceLock::new();
        let c = CONSTANTS.get_or_init(|| {
            let rule = quad::Composite::new(20);
            let breaks = quad::uniform_breaks(0.0, 1.0, 64);
            let one = 2.0 * rule.integrate(&breaks, Mollifier::raw_profile);
            let two = 2.0
                * std::f64::consts::PI
                * rule.integrate(&breaks, |s| s * Mollifier::raw_profile(s));
            [one, two]
        });
        c[dim - 1]
    }

    /// Continuum kernel `ψ_r(x) = r^{-d} ψ(x / r)` at distance `dist` from 0.
    pub fn density(&self, dim: usize, dist: f64) -> f64 {
        Mollifier::raw_profile(dist / self.scale)
            / (Mollifier::normalisation(dim) * self.scale.powi(dim as i32))
    }

    /// Sampled kernel weights on the grid, renormalised to sum to exactly 1.
    pub fn weights(&self, grid: &Grid) -> Vec<([i64; 2], f64)> {
        let h = grid.spacing();
        let stencil = Stencil::ball(grid, self.scale);
        let mut weights: Vec<([i64; 2], f64)> = stencil
            .offsets()
            .iter()
            .map(|&o| {
                let d = ((o[0] * o[0] + o[1] * o[1]) as f64).sqrt() * h;
                (o, Mollifier::raw_profile(d / self.scale))
            })
            .filter(|(_, w)| *w > 0.0)
            .collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        for (_, w) in &mut weights {
            *w /= total;
        }
        weights
    }

    /// Radial weights `p(|u|)` for the kernel gradient: `Σ_u p(|u|) u (f(x+u) - f(x))`
    /// approximates `(f ∗ ∇ψ_r)(x)`. The weights are rescaled so that the
    /// discrete second moment `Σ_u p(|u|) u_1²` is exactly 1, which makes the
    /// estimate exact for fields that are affine on the kernel support.
    pub fn gradient_weights(&self, grid: &Grid) -> Vec<([i64; 2], f64)> {
        let h = grid.spacing();
        let stencil = Stencil::ball(grid, self.scale);
        let mut weights: Vec<([i64; 2], f64)> = stencil
            .offsets()
            .iter()
            .filter_map(|&o| {
                let d = ((o[0] * o[0] + o[1] * o[1]) as f64).sqrt() * h;
                let s = d / self.scale;
                if d == 0.0 || s >= 1.0 {
                    return None;
                }
                // -ψ'(d) / d for the raw profile
                let p = Mollifier::raw_profile(s) * 2.0 * s / (1.0 - s * s).powi(2) / (d * self.scale);
                Some((o, p))
            })
            .collect();
        let moment: f64 = weights
            .iter()
            .map(|(o, p)| p * (o[0] as f64 * h).powi(2))
            .sum();
        for (_, p) in &mut weights {
            *p /= moment;
        }
        weights
    }

    pub(crate) fn check_resolved(&self, grid: &Grid) -> Result<()> {
        if self.scale < 2.0 * grid.spacing() {
            return Err(Error::param(
                "scale",
                format!(
                    "mollifier scale {} is below two grid spacings ({})",
                    self.scale,
                    2.0 * grid.spacing()
                ),
            ));
        }
        Ok(())
    }

    /// Discrete Fourier transform of the sampled kernel laid out on the grid.
    pub(crate) fn spectrum(&self, grid: &Grid, transform: &Transform) -> Vec<Complex64> {
        let mut kernel = vec![0.0; grid.len()];
        for (o, w) in self.weights(grid) {
            kernel[grid.shift(0, o)] += w;
        }
        transform.forward(&kernel)
    }
}

/// Periodic convolution with the sampled mollifier, `(f ∗ ψ_r)` on the grid.
pub fn mollify(field: &SampledField, moll: &Mollifier) -> Result<SampledField> {
    let grid = field.grid();
    moll.check_resolved(grid)?;
    let transform = Transform::new(grid);
    let kernel = moll.spectrum(grid, &transform);
    Ok(convolve_anchored(field, &kernel, &transform))
}

/// `anchor + IFFT(K̂ · FFT(f - anchor))` with the anchor the first sample, so
/// constant fields pass through exactly.
pub(crate) fn convolve_anchored(
    field: &SampledField,
    kernel: &[Complex64],
    transform: &Transform,
) -> SampledField {
    let anchor = field.values[0];
    let shifted: Vec<f64> = field.values.iter().map(|v| v - anchor).collect();
    let mut spectrum = transform.forward(&shifted);
    for (c, k) in spectrum.iter_mut().zip(kernel) {
        *c *= k;
    }
    let values = transform
        .inverse_real(spectrum)
        .into_iter()
        .map(|v| anchor + v)
        .collect();
    SampledField {
        grid: field.grid.clone(),
        values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn make_grid_examples() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        assert_eq!(g.spacing(), 0.125);
        let g = Grid::new(2, 16, 2.0).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.spacing(), 0.125);
        assert!(Grid::new(1, 7, 1.0).is_err());
        assert!(Grid::new(3, 8, 1.0).is_err());
        assert!(Grid::new(1, 4, 1.0).is_err());
        assert!(Grid::new(1, 8, 0.0).is_err());
        assert!(Grid::new(1, 8, -1.0).is_err());
    }

    #[test]
    fn sample_examples() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = SampledField::sample(&g, |_| 3.0).unwrap();
        assert!(f.values().iter().all(|&v| v == 3.0));

        let g = Grid::new(1, 8, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| (2.0 * PI * x[0]).cos()).unwrap();
        for (k, v) in f.values().iter().enumerate() {
            assert_eq!(*v, (2.0 * PI * k as f64 / 8.0).cos());
        }

        let err = SampledField::sample(&g, |x| 1.0 / (x[0] - 0.5)).unwrap_err();
        match err {
            Error::NonFinite { index, .. } => assert_eq!(index, vec![4]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sample_is_row_major() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| 10.0 * x[0] + x[1]).unwrap();
        // flat index 9 = (1, 1)
        assert_eq!(f.values()[9], 10.0 * 0.125 + 0.125);
        assert_eq!(f.values()[1], 0.125);
    }

    #[test]
    fn ball_mean_of_constant_is_exact() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = SampledField::constant(&g, 0.1);
        let w = BallWindow::at(&g, &[3, 30], 0.2).unwrap();
        assert_eq!(ball_mean(&f, &w).unwrap().mean, 0.1);
        let f = SampledField::constant(&g, 5.0);
        assert_eq!(ball_mean(&f, &w).unwrap().mean, 5.0);
    }

    #[test]
    fn ball_mean_of_linear_field() {
        // exact integral mean over (0.25, 0.75) of x is 0.5
        let g = Grid::new(1, 1024, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| x[0]).unwrap();
        let w = BallWindow::at(&g, &[512], 0.25).unwrap();
        let m = ball_mean(&f, &w).unwrap();
        assert!((m.mean - 0.5).abs() <= 2.0 * g.spacing());
        // |o| < 256 → 511 points
        assert_eq!(m.count, 511);
    }

    #[test]
    fn ball_mean_of_antisymmetric_field_vanishes() {
        let g = Grid::new(1, 256, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| (2.0 * PI * (x[0] - 0.25)).sin()).unwrap();
        let w = BallWindow::at(&g, &[64], 0.2).unwrap();
        assert!(ball_mean(&f, &w).unwrap().mean.abs() < 1e-12);
    }

    #[test]
    fn ball_excludes_ties_at_radius() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        // radius exactly 4h: offsets -3..=3
        let s = Stencil::ball(&g, 4.0 * g.spacing());
        assert_eq!(s.len(), 7);
        let a = Stencil::annulus(&g, 4.0 * g.spacing());
        let mut offs: Vec<i64> = a.offsets().iter().map(|o| o[0]).collect();
        offs.sort();
        assert_eq!(offs, vec![-4, -3, -2, 2, 3, 4]);
    }

    #[test]
    fn window_radius_bounds() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        assert!(BallWindow::new(&g, 0, 0.5 * g.spacing()).is_err());
        assert!(BallWindow::new(&g, 0, 0.3).is_err());
        assert!(BallWindow::new(&g, 0, 0.25).is_ok());
    }

    #[test]
    fn ball_mean_wraps_periodically() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        // window around 0 with radius 4h covers -3..=3: three points at 0 and four at 1
        let w = BallWindow::new(&g, 0, 4.0 * g.spacing()).unwrap();
        assert!((ball_mean(&f, &w).unwrap().mean - 4.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn mollifier_profile_integrates_to_one() {
        for dim in 1..=2 {
            // independent check: plain midpoint rule on a much finer mesh
            let m = 2_000_000;
            let ds = 1.0 / m as f64;
            let mut total = 0.0;
            for i in 0..m {
                let s = (i as f64 + 0.5) * ds;
                let shell = if dim == 1 { 2.0 } else { 2.0 * PI * s };
                total += shell * Mollifier::raw_profile(s) * ds;
            }
            assert!((total / Mollifier::normalisation(dim) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn mollify_preserves_constants_exactly() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = SampledField::constant(&g, 0.3);
        let m = mollify(&f, &Mollifier::bump(0.1).unwrap()).unwrap();
        assert!(m.values().iter().all(|&v| v == 0.3));
    }

    #[test]
    fn mollify_rejects_unresolved_kernel() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let f = SampledField::constant(&g, 1.0);
        assert!(mollify(&f, &Mollifier::bump(1.5 * g.spacing()).unwrap()).is_err());
        assert!(mollify(&f, &Mollifier::bump(2.0 * g.spacing()).unwrap()).is_ok());
    }

    #[test]
    fn mollify_reproduces_affine_interior() {
        let g = Grid::new(1, 1024, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| 2.0 * x[0] - 0.3).unwrap();
        let r = 16.0 * g.spacing();
        let m = mollify(&f, &Mollifier::bump(r).unwrap()).unwrap();
        // oracle: direct summation of the renormalised kernel against the samples
        let w = Mollifier::bump(r).unwrap().weights(&g);
        for i in (100..900).step_by(37) {
            let direct: f64 = w
                .iter()
                .map(|(o, wt)| wt * f.values()[(i as i64 + o[0]) as usize])
                .sum();
            assert!((m.values()[i] - f.values()[i]).abs() < 1e-10);
            assert!((m.values()[i] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn mollify_damps_cosine_by_kernel_coefficient() {
        let g = Grid::new(1, 1024, 1.0).unwrap();
        let r = 0.1;
        let moll = Mollifier::bump(r).unwrap();
        let f = SampledField::sample(&g, |x| (2.0 * PI * x[0]).cos()).unwrap();
        let m = mollify(&f, &moll).unwrap();
        // oracle: ∫ ψ_r(u) cos(2πu) du by Gauss–Legendre on the continuum kernel
        let rule = quad::Composite::new(20);
        let coeff = rule.integrate(&quad::uniform_breaks(-r, r, 40), |u| {
            moll.density(1, u.abs()) * (2.0 * PI * u).cos()
        });
        assert!(coeff > 0.0 && coeff < 1.0);
        for (k, v) in m.values().iter().enumerate().step_by(50) {
            let expected = coeff * f.values()[k];
            assert!((v - expected).abs() < 1e-10, "{v} vs {expected}");
        }
    }

    #[test]
    fn mollify_preserves_grid_sum() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| (x[0] * 7.0).sin() + x[1] * x[1]).unwrap();
        let m = mollify(&f, &Mollifier::bump(0.15).unwrap()).unwrap();
        let a: f64 = f.values().iter().sum();
        let b: f64 = m.values().iter().sum();
        assert!(((a - b) / a).abs() < 1e-10);
    }

    #[test]
    fn mollify_commutes_with_translation() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| (6.0 * x[0]).sin() * (3.0 * x[1]).cos()).unwrap();
        let moll = Mollifier::bump(0.2).unwrap();
        let a = mollify(&f.translated([1, 0]), &moll).unwrap();
        let b = mollify(&f, &moll).unwrap().translated([1, 0]);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
