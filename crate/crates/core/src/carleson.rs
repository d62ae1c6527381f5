//! Square-function Carleson integrals
//! `∫_0^R ∫_{B_R(z)} (ν(x,r) / r^{α-1})² dx dr/r` and their normalised supremum.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bmo::{ball_family, bmo_norm};
use crate::coeffs::{check_stride, coefficient_matrix, CoefficientKind, CoefficientMatrix, Order, ScaleLadder};
use crate::error::{Error, Result};
use crate::field::{Grid, Mollifier, SampledField, Stencil};
use crate::report::{self, fmt_f64, Metadata};
use crate::spectral::{check_alpha, fractional_derivative};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowIntegral {
    pub center: Vec<usize>,
    pub top: f64,
    pub integral: f64,
    /// `integral / R^d`.
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonReport {
    pub alpha: f64,
    pub kind: CoefficientKind,
    pub per_window: Vec<WindowIntegral>,
    /// Maximum of the normalised integrals: a lower bound for the supremum
    /// over all centres and radii.
    pub constant: f64,
    pub lower_bound: bool,
    /// The coefficient order differs from `⌊α⌋`.
    pub nonstandard: bool,
    pub grid: Grid,
    pub ladder: ScaleLadder,
    pub stride: usize,
    /// Smallest radius kept; scales below it are truncated.
    pub truncation_radius: f64,
    pub mollifier: String,
}

impl CarlesonReport {
    pub fn csv(&self, meta: &Metadata) -> String {
        let mut out = meta.csv_header();
        let _ = writeln!(out, "# alpha={}", fmt_f64(self.alpha));
        let _ = writeln!(out, "# kind={}", self.kind);
        let _ = writeln!(out, "# constant={}", fmt_f64(self.constant));
        let _ = writeln!(out, "# lower_bound={}", self.lower_bound);
        let _ = writeln!(out, "# nonstandard={}", self.nonstandard);
        let _ = writeln!(out, "# truncation_radius={}", fmt_f64(self.truncation_radius));
        out.push_str(if self.grid.dim() == 1 {
            "center_i,top,integral,normalized\n"
        } else {
            "center_i,center_j,top,integral,normalized\n"
        });
        for w in &self.per_window {
            for p in &w.center {
                let _ = write!(out, "{p},");
            }
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(w.top),
                fmt_f64(w.integral),
                fmt_f64(w.normalized)
            );
        }
        out
    }

    pub fn json(&self, meta: &Metadata) -> Result<serde_json::Value> {
        let mut value = serde_json::to_value(self)?;
        value["format"] = report::FORMAT_VERSION.into();
        value["config"] = meta.json();
        Ok(value)
    }
}

/// Per-centre partial sums `T_j(x) = ln2 · Σ_{j' ≥ j} (ν(x, r_j') / r_j'^{α-1})²`,
/// so that the integral up to `R = r_j` over a ball is a plain sum of `T_j`.
fn tail_sums(matrix: &CoefficientMatrix, alpha: f64) -> Vec<f64> {
    let levels = matrix.levels();
    let radii = matrix.ladder.radii();
    let mut sums = vec![0.0; matrix.values.len()];
    for ci in 0..matrix.centers.len() {
        let mut acc = 0.0;
        for j in (0..levels).rev() {
            let v = matrix.value(ci, j) / radii[j].powf(alpha - 1.0);
            acc += v * v * ScaleLadder::LOG_WEIGHT;
            sums[ci * levels + j] = acc;
        }
    }
    sums
}

/// Offsets of the ball of radius `top` that stay on the stride lattice.
fn lattice_ball(grid: &Grid, top: f64, stride: usize) -> Vec<[i64; 2]> {
    let s = stride as i64;
    Stencil::ball(grid, top)
        .offsets()
        .iter()
        .copied()
        .filter(|o| o[0] % s == 0 && o[1] % s == 0)
        .collect()
}

fn integral_with(
    matrix: &CoefficientMatrix,
    sums: &[f64],
    ball: &[[i64; 2]],
    level: usize,
    z: usize,
) -> f64 {
    let levels = matrix.levels();
    let total: f64 = ball
        .iter()
        .map(|&o| {
            let x = matrix.grid.shift(z, o);
            let ci = matrix.center_index(x).expect("lattice offset lands on a centre");
            sums[ci * levels + level]
        })
        .sum();
    total * matrix.cell_weight()
}

fn check_center(matrix: &CoefficientMatrix, z: usize) -> Result<()> {
    if z >= matrix.grid.len() || matrix.center_index(z).is_none() {
        return Err(Error::param(
            "center",
            format!(
                "flat index {z} is not a coefficient centre (stride {})",
                matrix.stride
            ),
        ));
    }
    Ok(())
}

/// `h^d Σ_{x ∈ B_R(z)} Σ_{r_j ≤ R} (ν(x, r_j) / r_j^{α-1})² ln 2`, with `h^d`
/// replaced by `(stride·h)^d` on strided matrices. Not normalised by `R^d`.
pub fn square_function_integral(
    matrix: &CoefficientMatrix,
    alpha: f64,
    z: usize,
    top: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    let level = matrix.ladder.level_of(top)?;
    check_center(matrix, z)?;
    let sums = tail_sums(matrix, alpha);
    let ball = lattice_ball(&matrix.grid, top, matrix.stride);
    Ok(integral_with(matrix, &sums, &ball, level, z))
}

/// Normalised integrals for every `(z, R)` in `centers × tops` and their maximum.
pub fn carleson_constant(
    matrix: &CoefficientMatrix,
    alpha: f64,
    centers: &[usize],
    tops: &[f64],
) -> Result<CarlesonReport> {
    check_alpha(alpha)?;
    if centers.is_empty() || tops.is_empty() {
        return Err(Error::Empty("Carleson test family"));
    }
    let order = matrix
        .kind
        .order()
        .ok_or_else(|| Error::param("kind", "β matrices have no Carleson order"))?;
    for &z in centers {
        check_center(matrix, z)?;
    }
    let dim = matrix.grid.dim() as i32;
    let sums = tail_sums(matrix, alpha);
    let mut per_window = Vec::with_capacity(centers.len() * tops.len());
    for &top in tops {
        let level = matrix.ladder.level_of(top)?;
        let ball = lattice_ball(&matrix.grid, top, matrix.stride);
        let values: Vec<WindowIntegral> = centers
            .par_iter()
            .map(|&z| {
                let integral = integral_with(matrix, &sums, &ball, level, z);
                WindowIntegral {
                    center: matrix.grid.point(z),
                    top,
                    integral,
                    normalized: integral / top.powi(dim),
                }
            })
            .collect();
        per_window.extend(values);
    }
    let constant = per_window.iter().map(|w| w.normalized).fold(0.0, f64::max);
    Ok(CarlesonReport {
        alpha,
        kind: matrix.kind,
        per_window,
        constant,
        lower_bound: true,
        nonstandard: order != Order::for_alpha(alpha),
        grid: matrix.grid.clone(),
        ladder: matrix.ladder.clone(),
        stride: matrix.stride,
        truncation_radius: *matrix.ladder.radii().last().expect("nonempty ladder"),
        mollifier: Mollifier::PROFILE.to_string(),
    })
}

/// Settings of the comparability experiment. `None` fields take defaults
/// relative to the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Coefficient family; its order is replaced by `⌊α⌋`.
    pub family: CoefficientKind,
    /// Largest ladder radius, default `L/8`.
    pub ladder_top: Option<f64>,
    /// Number of ladder radii used as Carleson tops, default 3.
    pub tops: usize,
    /// Stride of the coefficient centres (and of the Carleson centres `z`).
    pub stride: usize,
    /// Stride of the ball centres in the BMO norm.
    pub bmo_stride: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            family: CoefficientKind::Nu0,
            ladder_top: None,
            tops: 3,
            stride: 1,
            bmo_stride: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn ladder(&self, grid: &Grid) -> Result<ScaleLadder> {
        ScaleLadder::fit(grid, self.ladder_top.unwrap_or(grid.period() / 8.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparability {
    pub alpha: f64,
    pub kind: CoefficientKind,
    pub c_sq: f64,
    pub bmo_sq: f64,
    /// `c_sq / bmo_sq`; `None` when `bmo_sq` is zero.
    pub ratio: Option<f64>,
    pub tops: Vec<f64>,
    pub bmo_radii: Vec<f64>,
    pub ladder: ScaleLadder,
    pub truncation_radius: f64,
}

/// Square-function constant at order `⌊α⌋` against `‖D_α f‖_*²`.
pub fn comparability_experiment(
    field: &SampledField,
    alpha: f64,
    config: &ExperimentConfig,
) -> Result<Comparability> {
    check_alpha(alpha)?;
    let grid = field.grid();
    check_stride(grid, config.stride)?;
    check_stride(grid, config.bmo_stride)?;
    let ladder = config.ladder(grid)?;
    if config.tops == 0 || config.tops > ladder.levels() {
        return Err(Error::param(
            "tops",
            format!("{} is outside 1..={}", config.tops, ladder.levels()),
        ));
    }
    let kind = config.family.with_order(Order::for_alpha(alpha));
    let matrix = coefficient_matrix(field, &ladder, kind, config.stride)?;
    let tops = ladder.radii()[..config.tops].to_vec();
    let report = carleson_constant(&matrix, alpha, &matrix.centers, &tops)?;
    let derivative = fractional_derivative(field, alpha)?;
    let bmo_radii = ladder.radii().to_vec();
    let bmo = bmo_norm(&derivative, &ball_family(grid, &bmo_radii, config.bmo_stride)?)?;
    let c_sq = report.constant;
    let bmo_sq = bmo.norm * bmo.norm;
    Ok(Comparability {
        alpha,
        kind,
        c_sq,
        bmo_sq,
        ratio: if bmo_sq > 0.0 { Some(c_sq / bmo_sq) } else { None },
        tops,
        bmo_radii,
        truncation_radius: report.truncation_radius,
        ladder,
    })
}
