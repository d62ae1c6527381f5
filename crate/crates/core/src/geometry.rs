//! β₂,k numbers of weighted point clouds and of graphs of sampled fields.

use std::path::Path;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::{coefficient_matrix, CoefficientKind, CoefficientMatrix, ScaleLadder};
use crate::error::{Error, Result};
use crate::field::{SampledField, Stencil};
use crate::spectral::gradient;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    ambient_dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl PointCloud {
    pub fn new(ambient_dim: usize, points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<PointCloud> {
        if ambient_dim < 2 {
            return Err(Error::param("ambient_dim", format!("{ambient_dim} must be at least 2")));
        }
        if points.is_empty() {
            return Err(Error::Empty("point cloud"));
        }
        if weights.len() != points.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                actual: weights.len(),
            });
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != ambient_dim {
                return Err(Error::LengthMismatch {
                    expected: ambient_dim,
                    actual: p.len(),
                });
            }
            if let Some(&v) = p.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite { index: vec![i], value: v });
            }
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::param(
                "weights",
                format!("weight {} of point {i} must be positive", weights[i]),
            ));
        }
        Ok(PointCloud {
            ambient_dim,
            points,
            weights,
        })
    }

    /// Unit weights.
    pub fn unweighted(ambient_dim: usize, points: Vec<Vec<f64>>) -> Result<PointCloud> {
        let weights = vec![1.0; points.len()];
        PointCloud::new(ambient_dim, points, weights)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Parsed cloud plus whether the weight column was absent.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedCloud {
    pub cloud: PointCloud,
    pub unit_weights: bool,
}

/// Whitespace-separated text, one point per line. With `ambient_dim` given, a
/// line has `D` coordinates optionally followed by a weight; otherwise every
/// column is a coordinate. Blank lines and `#` comments are skipped.
pub fn parse_cloud(text: &str, ambient_dim: Option<usize>, path: &Path) -> Result<ParsedCloud> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut columns: Option<usize> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let parse_error = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            reason,
        };
        let values: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_error(format!("`{t}`: {e}"))))
            .collect::<Result<_>>()?;
        match columns {
            None => columns = Some(values.len()),
            Some(c) if c != values.len() => {
                return Err(parse_error(format!("expected {c} columns, found {}", values.len())))
            }
            _ => {}
        }
        let d = ambient_dim.unwrap_or(values.len());
        match values.len() {
            n if n == d => {
                points.push(values);
                weights.push(1.0);
            }
            n if n == d + 1 => {
                weights.push(values[d]);
                points.push(values[..d].to_vec());
            }
            n => return Err(parse_error(format!("expected {d} or {} columns, found {n}", d + 1))),
        }
    }
    let unit_weights = columns.is_some_and(|c| Some(c) != ambient_dim.map(|d| d + 1));
    let d = ambient_dim.or(columns).unwrap_or(0);
    Ok(ParsedCloud {
        cloud: PointCloud::new(d, points, weights)?,
        unit_weights,
    })
}

/// Optimal affine k-plane of a ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneFit {
    /// Weighted centroid of the points in the ball.
    pub basepoint: Vec<f64>,
    /// Orthonormal spanning vectors of the plane direction.
    pub basis: Vec<Vec<f64>>,
    /// `β`: normalised RMS distance to the plane.
    pub residual: f64,
}

impl PlaneFit {
    /// Normalised weighted RMS distance of the ball to an arbitrary plane
    /// through `base` spanned by the orthonormal `basis`.
    pub fn competitor_residual(
        cloud: &PointCloud,
        center: &[f64],
        r: f64,
        base: &[f64],
        basis: &[Vec<f64>],
    ) -> f64 {
        let (mut total, mut mass) = (0.0, 0.0);
        for (p, w) in in_ball(cloud, center, r) {
            let diff: Vec<f64> = p.iter().zip(base).map(|(a, b)| a - b).collect();
            let mut d2: f64 = diff.iter().map(|v| v * v).sum();
            for e in basis {
                let c: f64 = diff.iter().zip(e).map(|(a, b)| a * b).sum();
                d2 -= c * c;
            }
            total += w * d2.max(0.0);
            mass += w;
        }
        (total / mass).sqrt() / r
    }
}

fn in_ball<'a>(
    cloud: &'a PointCloud,
    center: &'a [f64],
    r: f64,
) -> impl Iterator<Item = (&'a [f64], f64)> + Clone + 'a {
    cloud
        .points
        .iter()
        .zip(&cloud.weights)
        .filter(move |(p, _)| {
            let d2: f64 = p.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            d2 < r * r
        })
        .map(|(p, &w)| (p.as_slice(), w))
}

/// Weighted PCA of a set of points: the plane through the weighted centroid
/// spanned by the top-k eigenvectors of the second-moment matrix is optimal,
/// and `β² = Σ(smallest D-k eigenvalues) / (r² W)`.
fn fit_points<'a>(
    points: impl Iterator<Item = (&'a [f64], f64)> + Clone,
    dim: usize,
    r: f64,
    k: usize,
    center: &[f64],
) -> Result<PlaneFit> {
    let mut mass = 0.0;
    let mut count = 0;
    let mut centroid = vec![0.0; dim];
    for (p, w) in points.clone() {
        mass += w;
        count += 1;
        for (c, v) in centroid.iter_mut().zip(p) {
            *c += w * v;
        }
    }
    if count < k + 1 {
        return Err(Error::Window {
            center: vec![],
            radius: r,
            reason: format!(
                "around {center:?} holds {count} points, fewer than k + 1 = {}",
                k + 1
            ),
        });
    }
    for c in &mut centroid {
        *c /= mass;
    }
    let mut moment = DMatrix::<f64>::zeros(dim, dim);
    for (p, w) in points.clone() {
        for a in 0..dim {
            let da = p[a] - centroid[a];
            for b in a..dim {
                moment[(a, b)] += w * da * (p[b] - centroid[b]);
            }
        }
    }
    for a in 0..dim {
        for b in 0..a {
            moment[(a, b)] = moment[(b, a)];
        }
    }
    let eigen = SymmetricEigen::new(moment);
    let mut order: Vec<usize> = (0..dim).collect();
    // descending eigenvalue, ties by index
    order.sort_by(|&i, &j| {
        eigen.eigenvalues[j]
            .partial_cmp(&eigen.eigenvalues[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let column = |i: usize| -> Vec<f64> { eigen.eigenvectors.column(i).iter().copied().collect() };
    let basis: Vec<Vec<f64>> = order[..k].iter().map(|&i| column(i)).collect();
    let normals: Vec<Vec<f64>> = order[k..].iter().map(|&i| column(i)).collect();
    // the sum of the small eigenvalues, evaluated as squared normal components
    // so that flat clouds give β at rounding level rather than its square root
    let mut rest = 0.0;
    for (p, w) in points {
        for n in &normals {
            let c: f64 = p.iter().zip(&centroid).zip(n).map(|((a, m), e)| (a - m) * e).sum();
            rest += w * c * c;
        }
    }
    Ok(PlaneFit {
        basepoint: centroid,
        basis,
        residual: (rest / (r * r * mass)).sqrt(),
    })
}

/// `β₂,k(X, r)` of the cloud in the open ball `B_r(center)`.
pub fn beta2k(cloud: &PointCloud, center: &[f64], r: f64, k: usize) -> Result<(f64, PlaneFit)> {
    let d = cloud.ambient_dim;
    if k == 0 || k >= d {
        return Err(Error::param("k", format!("{k} is outside 1..={}", d - 1)));
    }
    if center.len() != d {
        return Err(Error::LengthMismatch {
            expected: d,
            actual: center.len(),
        });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::param("r", format!("{r} must be positive")));
    }
    let fit = fit_points(in_ball(cloud, center, r), d, r, k, center)?;
    Ok((fit.residual, fit))
}

/// β of the graph of a field next to ν₁ at matching centres and radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphComparison {
    pub beta: CoefficientMatrix,
    pub nu1: CoefficientMatrix,
    /// `β / ν₁` entrywise; `None` where `ν₁` vanishes.
    pub ratio: Vec<Option<f64>>,
    /// Largest grid difference quotient of the field along the axes.
    pub lipschitz: f64,
}

/// Builds the graph `{(x, f(x))}` with surface weights `h^d √(1 + |∇f|²)`
/// (spectral gradient) and computes `β₂,d` in the ball of radius `r` about
/// `(x, f(x))` for every strided centre and ladder radius. Coordinates are
/// unwrapped around each centre.
pub fn graph_beta_vs_nu1(
    field: &SampledField,
    ladder: &ScaleLadder,
    stride: usize,
) -> Result<GraphComparison> {
    let grid = field.grid();
    let dim = grid.dim();
    let h = grid.spacing();
    let grads = gradient(field);
    let area: Vec<f64> = (0..grid.len())
        .map(|i| {
            let g2: f64 = grads.iter().map(|g| g.values()[i].powi(2)).sum();
            grid.cell_volume() * (1.0 + g2).sqrt()
        })
        .collect();
    let nu1 = coefficient_matrix(field, ladder, CoefficientKind::Nu1, stride)?;
    let mut beta = CoefficientMatrix::zeros(grid, ladder, CoefficientKind::Beta, stride)?;
    let mut columns = Vec::with_capacity(ladder.levels());
    for &r in ladder.radii() {
        let offsets = Stencil::ball(grid, r).offsets().to_vec();
        let column: Result<Vec<f64>> = beta
            .centers
            .par_iter()
            .map(|&c| {
                let fc = field.at(c);
                let local: Vec<(Vec<f64>, f64)> = offsets
                    .iter()
                    .filter_map(|&o| {
                        let x = grid.shift(c, o);
                        let mut p: Vec<f64> = o[..dim].iter().map(|&a| a as f64 * h).collect();
                        p.push(field.at(x) - fc);
                        let d2: f64 = p.iter().map(|v| v * v).sum();
                        (d2 < r * r).then_some((p, area[x]))
                    })
                    .collect();
                let origin = vec![0.0; dim + 1];
                let fit = fit_points(
                    local.iter().map(|(p, w)| (p.as_slice(), *w)),
                    dim + 1,
                    r,
                    dim,
                    &origin,
                )
                .map_err(|_| Error::Window {
                    center: grid.point(c),
                    radius: r,
                    reason: "holds too few graph points for a plane fit".into(),
                })?;
                Ok(fit.residual)
            })
            .collect();
        columns.push(column?);
    }
    for (j, column) in columns.iter().enumerate() {
        for (i, &v) in column.iter().enumerate() {
            beta.set(i, j, v);
        }
    }
    let ratio = beta
        .values
        .iter()
        .zip(&nu1.values)
        .map(|(b, n)| if *n > 0.0 { Some(b / n) } else { None })
        .collect();
    let mut lipschitz: f64 = 0.0;
    for i in 0..grid.len() {
        for axis in 0..dim {
            let mut e = [0i64; 2];
            e[axis] = 1;
            lipschitz = lipschitz.max((field.at(grid.shift(i, e)) - field.at(i)).abs() / h);
        }
    }
    Ok(GraphComparison {
        beta,
        nu1,
        ratio,
        lipschitz,
    })
}
