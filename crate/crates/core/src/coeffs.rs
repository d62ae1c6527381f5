//! Multiscale approximation coefficients ν(x, r).
//!
//! Six families are provided: the optimal residuals against constants and
//! affine maps (ν₀, ν₁), the residuals against the jet of the mollified field
//! (ν̄₀, ν̄₁) and the annulus first-difference residuals (ν̃₀, ν̃₁). All are
//! root-mean-square values over grid points, divided by the radius.

use std::f64::consts::LN_2;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BallWindow, Grid, Mollifier, SampledField, Stencil};
use crate::report::{self, fmt_f64, Metadata};
use crate::spectral::{kernel_jet, MollifiedJet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Nu0,
    Nu1,
    Nu0Bar,
    Nu1Bar,
    Nu0Tilde,
    Nu1Tilde,
    /// β₂,d numbers of the graph of a field; produced by the geometry module.
    Beta,
}

impl CoefficientKind {
    pub const NU: [CoefficientKind; 6] = [
        CoefficientKind::Nu0,
        CoefficientKind::Nu1,
        CoefficientKind::Nu0Bar,
        CoefficientKind::Nu1Bar,
        CoefficientKind::Nu0Tilde,
        CoefficientKind::Nu1Tilde,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CoefficientKind::Nu0 => "nu0",
            CoefficientKind::Nu1 => "nu1",
            CoefficientKind::Nu0Bar => "nu0_bar",
            CoefficientKind::Nu1Bar => "nu1_bar",
            CoefficientKind::Nu0Tilde => "nu0_tilde",
            CoefficientKind::Nu1Tilde => "nu1_tilde",
            CoefficientKind::Beta => "beta",
        }
    }

    /// Polynomial order of the competitor, `None` for β.
    pub fn order(self) -> Option<Order> {
        match self {
            CoefficientKind::Nu0 | CoefficientKind::Nu0Bar | CoefficientKind::Nu0Tilde => {
                Some(Order::Zero)
            }
            CoefficientKind::Nu1 | CoefficientKind::Nu1Bar | CoefficientKind::Nu1Tilde => {
                Some(Order::One)
            }
            CoefficientKind::Beta => None,
        }
    }

    /// Same family at the given order.
    pub fn with_order(self, order: Order) -> CoefficientKind {
        use CoefficientKind::*;
        match (self, order) {
            (Nu0 | Nu1, Order::Zero) => Nu0,
            (Nu0 | Nu1, Order::One) => Nu1,
            (Nu0Bar | Nu1Bar, Order::Zero) => Nu0Bar,
            (Nu0Bar | Nu1Bar, Order::One) => Nu1Bar,
            (Nu0Tilde | Nu1Tilde, Order::Zero) => Nu0Tilde,
            (Nu0Tilde | Nu1Tilde, Order::One) => Nu1Tilde,
            (Beta, _) => Beta,
        }
    }

    fn needs_jet(self) -> bool {
        matches!(
            self,
            CoefficientKind::Nu0Bar | CoefficientKind::Nu1Bar | CoefficientKind::Nu1Tilde
        )
    }
}

impl fmt::Display for CoefficientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CoefficientKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoefficientKind::NU
            .into_iter()
            .chain([CoefficientKind::Beta])
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::param("kind", format!("unknown coefficient kind `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Zero,
    One,
}

impl Order {
    /// `⌊α⌋` for α in (0, 2).
    pub fn for_alpha(alpha: f64) -> Order {
        if alpha < 1.0 {
            Order::Zero
        } else {
            Order::One
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Order::Zero => 0,
            Order::One => 1,
        }
    }
}

/// Dyadic radii `r_j = R 2^{-j}`, `j = 0..J`, each carrying the weight
/// `ln 2` of one octave of `dr/r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    top: f64,
    radii: Vec<f64>,
}

impl ScaleLadder {
    pub const LOG_WEIGHT: f64 = LN_2;

    pub fn new(grid: &Grid, top: f64, levels: usize) -> Result<ScaleLadder> {
        if levels == 0 {
            return Err(Error::param("levels", "a ladder needs at least one level"));
        }
        if !(top.is_finite() && top > 0.0) {
            return Err(Error::param("top", format!("{top} must be positive")));
        }
        if top > grid.period() / 4.0 {
            return Err(Error::param(
                "top",
                format!("{top} exceeds a quarter period {}", grid.period() / 4.0),
            ));
        }
        let radii: Vec<f64> = (0..levels).map(|j| top * 0.5f64.powi(j as i32)).collect();
        let floor = 4.0 * grid.spacing();
        let smallest = radii[levels - 1];
        if smallest < floor * (1.0 - 1e-12) {
            return Err(Error::param(
                "levels",
                format!("smallest radius {smallest} is below four grid spacings ({floor})"),
            ));
        }
        Ok(ScaleLadder { top, radii })
    }

    /// The deepest ladder below `top` whose smallest radius is at least `4h`.
    pub fn fit(grid: &Grid, top: f64) -> Result<ScaleLadder> {
        let floor = 4.0 * grid.spacing() * (1.0 - 1e-12);
        let mut levels = 0;
        while top * 0.5f64.powi(levels as i32) >= floor {
            levels += 1;
        }
        ScaleLadder::new(grid, top, levels)
    }

    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn levels(&self) -> usize {
        self.radii.len()
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    /// Level whose radius equals `radius` up to relative rounding.
    pub fn level_of(&self, radius: f64) -> Result<usize> {
        self.radii
            .iter()
            .position(|&r| (r - radius).abs() <= 1e-12 * r)
            .ok_or(Error::NotInLadder(radius))
    }
}

/// Stencils and least-squares geometry shared by every window of one radius.
struct Level {
    radius: f64,
    ball: Vec<[i64; 2]>,
    ball_u: Vec<[f64; 2]>,
    /// Inverse of `Σ u uᵀ` over the ball, `None` when singular.
    moment_inv: Option<[[f64; 2]; 2]>,
    annulus: Vec<[i64; 2]>,
    annulus_u: Vec<[f64; 2]>,
}

impl Level {
    fn new(grid: &Grid, radius: f64) -> Level {
        let h = grid.spacing();
        let phys = |o: &[i64; 2]| [o[0] as f64 * h, o[1] as f64 * h];
        let ball = Stencil::ball(grid, radius).offsets().to_vec();
        let annulus = Stencil::annulus(grid, radius).offsets().to_vec();
        let ball_u: Vec<[f64; 2]> = ball.iter().map(phys).collect();
        let annulus_u = annulus.iter().map(phys).collect();
        let moment_inv = invert_moment(grid.dim(), &ball_u);
        Level {
            radius,
            ball,
            ball_u,
            moment_inv,
            annulus,
            annulus_u,
        }
    }
}

fn invert_moment(dim: usize, u: &[[f64; 2]]) -> Option<[[f64; 2]; 2]> {
    let mut m = [[0.0; 2]; 2];
    for v in u {
        for a in 0..2 {
            for b in 0..2 {
                m[a][b] += v[a] * v[b];
            }
        }
    }
    let scale = m[0][0] + m[1][1];
    if dim == 1 {
        if m[0][0] <= 0.0 {
            return None;
        }
        return Some([[1.0 / m[0][0], 0.0], [0.0, 0.0]]);
    }
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det > 1e-12 * scale * scale) {
        return None;
    }
    Some([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// Differences `f(x+u) - f(x)` over a stencil.
fn differences(field: &SampledField, center: usize, offsets: &[[i64; 2]]) -> Vec<f64> {
    let grid = field.grid();
    let fx = field.at(center);
    offsets
        .iter()
        .map(|&o| field.at(grid.shift(center, o)) - fx)
        .collect()
}

fn rms_over_r(residuals: impl Iterator<Item = f64>, count: usize, radius: f64) -> f64 {
    let sum: f64 = residuals.map(|e| e * e).sum();
    (sum / count as f64).sqrt() / radius
}

fn nu0_at(field: &SampledField, center: usize, level: &Level) -> f64 {
    let d = differences(field, center, &level.ball);
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    rms_over_r(d.iter().map(|v| v - mean), d.len(), level.radius)
}

fn nu1_at(field: &SampledField, center: usize, level: &Level) -> Result<f64> {
    let inv = level.moment_inv.ok_or_else(|| Error::Degenerate {
        center: field.grid().point(center),
        radius: level.radius,
    })?;
    let d = differences(field, center, &level.ball);
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    // the ball is symmetric, so Σu = 0 and the slope decouples from the mean
    let mut rhs = [0.0; 2];
    for (v, u) in d.iter().zip(&level.ball_u) {
        rhs[0] += (v - mean) * u[0];
        rhs[1] += (v - mean) * u[1];
    }
    let b = [
        inv[0][0] * rhs[0] + inv[0][1] * rhs[1],
        inv[1][0] * rhs[0] + inv[1][1] * rhs[1],
    ];
    Ok(rms_over_r(
        d.iter()
            .zip(&level.ball_u)
            .map(|(v, u)| v - mean - b[0] * u[0] - b[1] * u[1]),
        d.len(),
        level.radius,
    ))
}

fn jet_at(jet: &MollifiedJet, field: &SampledField, center: usize) -> (f64, [f64; 2]) {
    let value = jet.value.at(center) - field.at(center);
    let mut grad = [0.0; 2];
    for (g, component) in grad.iter_mut().zip(&jet.gradient) {
        *g = component.at(center);
    }
    (value, grad)
}

fn nu_bar_at(
    field: &SampledField,
    center: usize,
    level: &Level,
    jet: &MollifiedJet,
    order: Order,
) -> f64 {
    let (c, g) = jet_at(jet, field, center);
    let g = if order == Order::One { g } else { [0.0; 2] };
    let d = differences(field, center, &level.ball);
    rms_over_r(
        d.iter()
            .zip(&level.ball_u)
            .map(|(v, u)| v - c - g[0] * u[0] - g[1] * u[1]),
        d.len(),
        level.radius,
    )
}

fn nu_tilde_at(
    field: &SampledField,
    center: usize,
    level: &Level,
    jet: Option<&MollifiedJet>,
) -> Result<f64> {
    if level.annulus.is_empty() {
        return Err(Error::Window {
            center: field.grid().point(center),
            radius: level.radius,
            reason: "has an empty annulus".into(),
        });
    }
    let g = match jet {
        Some(jet) => jet_at(jet, field, center).1,
        None => [0.0; 2],
    };
    let d = differences(field, center, &level.annulus);
    Ok(rms_over_r(
        d.iter()
            .zip(&level.annulus_u)
            .map(|(v, u)| v - g[0] * u[0] - g[1] * u[1]),
        d.len(),
        level.radius,
    ))
}

fn window_level(field: &SampledField, window: &BallWindow) -> Result<Level> {
    BallWindow::new(field.grid(), window.center, window.radius)?;
    Ok(Level::new(field.grid(), window.radius))
}

/// `ν₀(x, r)`: RMS of `(f - ⟨f⟩_B)/r` over the ball.
pub fn nu0(field: &SampledField, window: &BallWindow) -> Result<f64> {
    let level = window_level(field, window)?;
    Ok(nu0_at(field, window.center, &level))
}

/// `ν₁(x, r)`: RMS of `(f - l*)/r` over the ball, `l*` the least-squares affine fit.
pub fn nu1(field: &SampledField, window: &BallWindow) -> Result<f64> {
    let level = window_level(field, window)?;
    nu1_at(field, window.center, &level)
}

/// `ν̄_k(x, r)`: RMS over the ball against the order-`k` jet of `f ∗ ψ_r` at `x`.
pub fn nu_bar(field: &SampledField, window: &BallWindow, order: Order) -> Result<f64> {
    let level = window_level(field, window)?;
    let jet = kernel_jet(field, &Mollifier::bump(window.radius)?)?;
    Ok(nu_bar_at(field, window.center, &level, &jet, order))
}

/// `ν̃_k(x, r)`: RMS over the annulus `r/2 ≤ |y| ≤ r` of the first difference,
/// minus `(ψ_r ∗ ∇f)(x)·y` at order 1.
pub fn nu_tilde(field: &SampledField, window: &BallWindow, order: Order) -> Result<f64> {
    let level = window_level(field, window)?;
    let jet = match order {
        Order::Zero => None,
        Order::One => Some(kernel_jet(field, &Mollifier::bump(window.radius)?)?),
    };
    nu_tilde_at(field, window.center, &level, jet.as_ref())
}

/// Values `ν(x_i, r_j)` over a set of centres and the ladder, stored
/// centre-major: `values[i * levels + j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientMatrix {
    pub grid: Grid,
    pub ladder: ScaleLadder,
    pub kind: CoefficientKind,
    /// Centres form the sub-lattice of this stride along every axis.
    pub stride: usize,
    pub centers: Vec<usize>,
    pub values: Vec<f64>,
}

impl CoefficientMatrix {
    /// An all-zero matrix over the strided centres, for assembling values by hand.
    pub fn zeros(
        grid: &Grid,
        ladder: &ScaleLadder,
        kind: CoefficientKind,
        stride: usize,
    ) -> Result<CoefficientMatrix> {
        check_stride(grid, stride)?;
        let centers = grid.strided_points(stride);
        let values = vec![0.0; centers.len() * ladder.levels()];
        Ok(CoefficientMatrix {
            grid: grid.clone(),
            ladder: ladder.clone(),
            kind,
            stride,
            centers,
            values,
        })
    }

    pub fn levels(&self) -> usize {
        self.ladder.levels()
    }

    pub fn value(&self, center_index: usize, level: usize) -> f64 {
        self.values[center_index * self.levels() + level]
    }

    pub fn set(&mut self, center_index: usize, level: usize, value: f64) {
        let levels = self.levels();
        self.values[center_index * levels + level] = value;
    }

    /// Position of a flat grid index among the centres, if it is one.
    pub fn center_index(&self, flat: usize) -> Option<usize> {
        let s = self.stride;
        let point = self.grid.multi_index(flat);
        if point[0] % s != 0 || point[1] % s != 0 {
            return None;
        }
        let m = self.grid.n() / s;
        Some(match self.grid.dim() {
            1 => point[0] / s,
            _ => (point[0] / s) * m + point[1] / s,
        })
    }

    /// Quadrature weight of one centre, `(stride·h)^d`.
    pub fn cell_weight(&self) -> f64 {
        (self.stride as f64 * self.grid.spacing()).powi(self.grid.dim() as i32)
    }

    /// Entrywise maximum of `self - other`, for ordering checks.
    pub fn max_excess_over(&self, other: &CoefficientMatrix) -> Result<f64> {
        if self.values.len() != other.values.len() || self.centers != other.centers {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                actual: other.values.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn csv(&self, meta: &Metadata) -> String {
        let mut out = meta.csv_header();
        let columns = if self.grid.dim() == 1 {
            "center_i,radius,value"
        } else {
            "center_i,center_j,radius,value"
        };
        out.push_str(columns);
        out.push('\n');
        for (ci, &flat) in self.centers.iter().enumerate() {
            let point = self.grid.point(flat);
            for (j, &r) in self.ladder.radii().iter().enumerate() {
                for p in &point {
                    let _ = write!(out, "{p},");
                }
                let _ = writeln!(out, "{},{}", fmt_f64(r), fmt_f64(self.value(ci, j)));
            }
        }
        out
    }

    pub fn json(&self, meta: &Metadata) -> serde_json::Value {
        serde_json::json!({
            "format": report::FORMAT_VERSION,
            "config": meta.json(),
            "kind": self.kind.label(),
            "grid": self.grid,
            "ladder": self.ladder,
            "stride": self.stride,
            "rows": self.centers.len() * self.levels(),
            "mollifier": Mollifier::PROFILE,
        })
    }
}

pub(crate) fn check_stride(grid: &Grid, stride: usize) -> Result<()> {
    if stride == 0 || grid.n() % stride != 0 {
        return Err(Error::param(
            "stride",
            format!("{stride} must divide the grid size {}", grid.n()),
        ));
    }
    Ok(())
}

/// Evaluate one coefficient family at every (strided centre, ladder radius)
/// pair. Each window is computed independently, so the result does not depend
/// on the parallel schedule.
pub fn coefficient_matrix(
    field: &SampledField,
    ladder: &ScaleLadder,
    kind: CoefficientKind,
    stride: usize,
) -> Result<CoefficientMatrix> {
    let grid = field.grid();
    let order = kind.order().ok_or_else(|| {
        Error::param("kind", "β coefficients are computed from point clouds, not fields")
    })?;
    let mut matrix = CoefficientMatrix::zeros(grid, ladder, kind, stride)?;
    let check = ScaleLadder::new(grid, ladder.top(), ladder.levels())?;
    debug_assert_eq!(&check, ladder);
    let levels = ladder.levels();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for &radius in ladder.radii() {
        let level = Level::new(grid, radius);
        let jet = if kind.needs_jet() {
            Some(kernel_jet(field, &Mollifier::bump(radius)?)?)
        } else {
            None
        };
        let column: Result<Vec<f64>> = matrix
            .centers
            .par_iter()
            .map(|&c| match kind {
                CoefficientKind::Nu0 => Ok(nu0_at(field, c, &level)),
                CoefficientKind::Nu1 => nu1_at(field, c, &level),
                CoefficientKind::Nu0Bar | CoefficientKind::Nu1Bar => Ok(nu_bar_at(
                    field,
                    c,
                    &level,
                    jet.as_ref().expect("jet computed"),
                    order,
                )),
                CoefficientKind::Nu0Tilde | CoefficientKind::Nu1Tilde => {
                    nu_tilde_at(field, c, &level, jet.as_ref())
                }
                CoefficientKind::Beta => unreachable!(),
            })
            .collect();
        columns.push(column?);
    }
    for (j, column) in columns.iter().enumerate() {
        for (i, &v) in column.iter().enumerate() {
            matrix.set(i, j, v);
        }
    }
    Ok(matrix)
}
