//! Mean oscillation, Hölder seminorms, Strichartz difference functionals and
//! the tempered-growth integral.
//!
//! Every supremum over an infinite family is evaluated as a maximum over a
//! declared finite family and is therefore a lower bound.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{anchored_mean, BallWindow, Grid, SampledField, Stencil};
use crate::quad;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowOscillation {
    pub center: Vec<usize>,
    pub radius: f64,
    pub oscillation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    pub per_window: Vec<WindowOscillation>,
    /// Maximum over `per_window`; a lower bound for the BMO norm.
    pub norm: f64,
}

/// All balls with the given radii centred on the strided sub-lattice.
pub fn ball_family(grid: &Grid, radii: &[f64], stride: usize) -> Result<Vec<BallWindow>> {
    let centers = grid.strided_points(stride);
    let mut family = Vec::with_capacity(radii.len() * centers.len());
    for &r in radii {
        for &c in &centers {
            family.push(BallWindow::new(grid, c, r)?);
        }
    }
    Ok(family)
}

/// Dyadic radii `top, top/2, …` down to `floor` inclusive.
pub fn dyadic_radii(top: f64, floor: f64) -> Vec<f64> {
    let mut radii = Vec::new();
    let mut r = top;
    while r >= floor * (1.0 - 1e-12) {
        radii.push(r);
        r *= 0.5;
    }
    radii
}

fn max_of(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, f64::max)
}

/// `‖f‖_*` over a family of balls, with the L¹ mean oscillation
/// `⨍_B |f - ⟨f⟩_B|`.
pub fn bmo_norm(field: &SampledField, windows: &[BallWindow]) -> Result<OscillationReport> {
    if windows.is_empty() {
        return Err(Error::Empty("window family"));
    }
    let grid = field.grid();
    let mut stencils: BTreeMap<u64, Stencil> = BTreeMap::new();
    for w in windows {
        BallWindow::new(grid, w.center, w.radius)?;
        stencils
            .entry(w.radius.to_bits())
            .or_insert_with(|| Stencil::ball(grid, w.radius));
    }
    let per_window: Vec<WindowOscillation> = windows
        .par_iter()
        .map(|w| {
            let stencil = &stencils[&w.radius.to_bits()];
            let mean = anchored_mean(field, w.center, stencil);
            let fx = field.at(w.center);
            let shift = mean - fx;
            let total: f64 = stencil
                .offsets()
                .iter()
                .map(|&o| (field.at(grid.shift(w.center, o)) - fx - shift).abs())
                .sum();
            WindowOscillation {
                center: grid.point(w.center),
                radius: w.radius,
                oscillation: total / stencil.len() as f64,
            }
        })
        .collect();
    let norm = max_of(per_window.iter().map(|w| w.oscillation));
    Ok(OscillationReport { per_window, norm })
}

/// `max |f(x) - f(y)| / |x - y|^α` over `x` on the strided sub-lattice and
/// every `y ≠ x` within periodic distance `L/4`.
pub fn holder_seminorm(field: &SampledField, alpha: f64, stride: usize) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::param("alpha", format!("{alpha} is outside (0, 1]")));
    }
    let grid = field.grid();
    let h = grid.spacing();
    let reach = grid.period() / 4.0;
    let offsets: Vec<([i64; 2], f64)> = Stencil::ball(grid, reach * (1.0 + 1e-12))
        .offsets()
        .iter()
        .filter(|o| **o != [0, 0])
        .map(|&o| {
            let d = ((o[0] * o[0] + o[1] * o[1]) as f64).sqrt() * h;
            (o, d.powf(-alpha))
        })
        .collect();
    let centers = grid.strided_points(stride);
    Ok(centers
        .par_iter()
        .map(|&c| {
            let fx = field.at(c);
            max_of(
                offsets
                    .iter()
                    .map(|&(o, w)| (field.at(grid.shift(c, o)) - fx).abs() * w),
            )
        })
        .reduce(|| 0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difference {
    First,
    Second,
}

/// An axis-aligned periodic cube `|x_i - c_i| < side/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    pub center: usize,
    pub side: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubeValue {
    pub center: Vec<usize>,
    pub side: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzReport {
    pub alpha: f64,
    pub difference: Difference,
    pub per_cube: Vec<CubeValue>,
    /// Maximum over `per_cube`; a lower bound for the supremum over cubes.
    pub b: f64,
}

/// Cubes of dyadic sides `largest, largest/2, …, ≥ smallest`, each side
/// centred on a sub-lattice of spacing `side/2` (at least one cell).
pub fn dyadic_cubes(grid: &Grid, largest: f64, smallest: f64) -> Vec<Cube> {
    let h = grid.spacing();
    let mut cubes = Vec::new();
    for side in dyadic_radii(largest, smallest) {
        let stride = (((side / 2.0) / h).round() as usize).clamp(1, grid.n());
        let stride = if grid.n() % stride == 0 { stride } else { 1 };
        for c in grid.strided_points(stride) {
            cubes.push(Cube { center: c, side });
        }
    }
    cubes
}

/// `(1/|Q| ∫_Q ∫_{x+y∈Q} |Δ_y f(x)|² / |y|^{d+2α} dy dx)^{1/2}` per cube,
/// with `Δ_y f(x) = f(x+y) - f(x)` or `2f(x) - f(x+y) - f(x-y)`. The diagonal
/// `y = 0` is excluded.
pub fn strichartz(
    field: &SampledField,
    alpha: f64,
    difference: Difference,
    cubes: &[Cube],
) -> Result<StrichartzReport> {
    let upper = match difference {
        Difference::First => 1.0,
        Difference::Second => 2.0,
    };
    if !(alpha > 0.0 && alpha < upper) {
        return Err(Error::param("alpha", format!("{alpha} is outside (0, {upper})")));
    }
    if cubes.is_empty() {
        return Err(Error::Empty("cube family"));
    }
    let grid = field.grid();
    let h = grid.spacing();
    for q in cubes {
        if q.center >= grid.len() {
            return Err(Error::param("center", format!("flat index {} out of range", q.center)));
        }
        if q.side < 4.0 * h * (1.0 - 1e-12) {
            return Err(Error::Window {
                center: grid.point(q.center),
                radius: q.side,
                reason: format!("cube side is below four grid spacings ({})", 4.0 * h),
            });
        }
        if q.side > grid.period() / 2.0 {
            return Err(Error::Window {
                center: grid.point(q.center),
                radius: q.side,
                reason: format!("cube side exceeds half the period {}", grid.period() / 2.0),
            });
        }
    }
    let dim = grid.dim();
    let power = -(dim as f64 + 2.0 * alpha) / 2.0;
    let mut stencils: BTreeMap<u64, (Vec<[i64; 2]>, i64, Vec<f64>)> = BTreeMap::new();
    for q in cubes {
        stencils.entry(q.side.to_bits()).or_insert_with(|| {
            let offsets = Stencil::cube(grid, q.side).offsets().to_vec();
            let m = offsets.iter().map(|o| o[0].abs()).max().unwrap_or(0);
            // |y|^{-d-2α} on the difference lattice (-2m..=2m)^dim
            let width = 4 * m + 1;
            let rows = if dim == 2 { width } else { 1 };
            let mut weights = vec![0.0; (width * rows) as usize];
            for a in -2 * m..=2 * m {
                for b in if dim == 2 { -2 * m..=2 * m } else { 0..=0 } {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let d2 = ((a * a + b * b) as f64) * h * h;
                    weights[((a + 2 * m) * rows + (b + if dim == 2 { 2 * m } else { 0 })) as usize] =
                        d2.powf(power);
                }
            }
            (offsets, m, weights)
        });
    }
    let per_cube: Vec<CubeValue> = cubes
        .par_iter()
        .map(|q| {
            let (offsets, m, weights) = &stencils[&q.side.to_bits()];
            let m = *m;
            let rows = if dim == 2 { 4 * m + 1 } else { 1 };
            let lift = if dim == 2 { 2 * m } else { 0 };
            let weight = |y: [i64; 2]| weights[((y[0] + 2 * m) * rows + y[1] + lift) as usize];
            let values: Vec<f64> = offsets
                .iter()
                .map(|&o| field.at(grid.shift(q.center, o)))
                .collect();
            let mut total = 0.0;
            match difference {
                Difference::First => {
                    for (i, a) in offsets.iter().enumerate() {
                        for (j, b) in offsets.iter().enumerate().skip(i + 1) {
                            let dv = values[j] - values[i];
                            total += 2.0 * dv * dv * weight([b[0] - a[0], b[1] - a[1]]);
                        }
                    }
                }
                Difference::Second => {
                    for (i, a) in offsets.iter().enumerate() {
                        let x = grid.shift(q.center, *a);
                        for (j, b) in offsets.iter().enumerate() {
                            if i == j {
                                continue;
                            }
                            let y = [b[0] - a[0], b[1] - a[1]];
                            let back = field.at(grid.shift(x, [-y[0], -y[1]]));
                            let dv = 2.0 * values[i] - values[j] - back;
                            total += dv * dv * weight(y);
                        }
                    }
                }
            }
            let cell = grid.cell_volume();
            // (1/|Q|) h^{2d} Σ with |Q| = count h^d
            let value = (total * cell / offsets.len() as f64).sqrt();
            CubeValue {
                center: grid.point(q.center),
                side: q.side,
                value,
            }
        })
        .collect();
    let b = max_of(per_cube.iter().map(|c| c.value));
    Ok(StrichartzReport {
        alpha,
        difference,
        per_cube,
        b,
    })
}

pub fn strichartz_first(field: &SampledField, alpha: f64, cubes: &[Cube]) -> Result<StrichartzReport> {
    strichartz(field, alpha, Difference::First, cubes)
}

pub fn strichartz_second(field: &SampledField, alpha: f64, cubes: &[Cube]) -> Result<StrichartzReport> {
    strichartz(field, alpha, Difference::Second, cubes)
}

/// Growth hypothesis `|f(x)| ≤ constant · (1 + |x|)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub constant: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthVerdict {
    Finite,
    DivergentTail,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperedGrowth {
    /// `∫_{|x|≤M} |f(x)| / (1 + |x|^{d+ε}) dx` by quadrature.
    pub truncated: f64,
    /// Upper bound for the integral over `|x| > M` implied by the growth
    /// hypothesis; infinite when the tail diverges.
    pub tail_bound: f64,
    pub verdict: GrowthVerdict,
}

/// The tempered-growth integral `∫ |f(x)| / (1 + |x|^{d+ε}) dx` on ℝ^d.
///
/// For `ρ ≥ M`, `(1+ρ)^γ ≤ (1 + 1/M)^γ ρ^γ` and `1/(1+t) ≤ 1/t - 1/t² + 1/t³`
/// give a closed-form bound on the tail that is finite exactly when `γ < ε`.
pub fn tempered_growth<F>(
    dim: usize,
    f: F,
    growth: Growth,
    epsilon: f64,
    cutoff: f64,
) -> Result<TemperedGrowth>
where
    F: Fn(&[f64]) -> f64,
{
    if !(dim == 1 || dim == 2) {
        return Err(Error::UnsupportedDimension(dim));
    }
    if !(epsilon > 0.0) {
        return Err(Error::param("epsilon", format!("{epsilon} must be positive")));
    }
    if !(cutoff > 0.0 && cutoff.is_finite()) {
        return Err(Error::param("cutoff", format!("{cutoff} must be positive")));
    }
    if !(growth.constant >= 0.0 && growth.exponent.is_finite()) {
        return Err(Error::param("growth", "constant must be nonnegative and exponent finite"));
    }
    let d = dim as f64;
    let p = d + epsilon;
    let rule = quad::Composite::new(20);
    let radial = quad::graded_breaks(cutoff, 30, 0.5);
    let truncated = match dim {
        1 => rule.integrate(&radial, |x| {
            (f(&[x]).abs() + f(&[-x]).abs()) / (1.0 + x.powf(p))
        }),
        _ => {
            let angular = quad::uniform_breaks(0.0, 2.0 * std::f64::consts::PI, 32);
            let ring = quad::Composite::new(12);
            rule.integrate(&radial, |rho| {
                let around = ring.integrate(&angular, |t| f(&[rho * t.cos(), rho * t.sin()]).abs());
                around * rho / (1.0 + rho.powf(p))
            })
        }
    };
    if !truncated.is_finite() {
        return Err(Error::NonFinite {
            index: vec![],
            value: truncated,
        });
    }
    let gamma = growth.exponent;
    if gamma >= epsilon {
        return Ok(TemperedGrowth {
            truncated,
            tail_bound: f64::INFINITY,
            verdict: GrowthVerdict::DivergentTail,
        });
    }
    let sphere = if dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let m = cutoff;
    let lift = (1.0 + 1.0 / m).powf(gamma.max(0.0));
    // ∫_M^∞ ρ^{γ+d-1} (ρ^{-p} - ρ^{-2p} + ρ^{-3p}) dρ
    let term = |k: f64| {
        let e = gamma + d - k * p;
        m.powf(e) / (-e)
    };
    let tail_bound = growth.constant * lift * sphere * (term(1.0) - term(2.0) + term(3.0));
    Ok(TemperedGrowth {
        truncated,
        tail_bound,
        verdict: GrowthVerdict::Finite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    use proptest::prelude::*;

    fn line(n: usize) -> Grid {
        Grid::new(1, n, 1.0).unwrap()
    }

    #[test]
    fn constant_field_has_zero_oscillation() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let f = SampledField::constant(&g, 3.0);
        let family = ball_family(&g, &[0.125, 0.25], 1).unwrap();
        assert_eq!(bmo_norm(&f, &family).unwrap().norm, 0.0);
        assert!(bmo_norm(&f, &[]).is_err());
    }

    #[test]
    fn sign_field_has_unit_norm() {
        let g = line(1024);
        let h = g.spacing();
        let f = SampledField::sample(&g, |x| if x[0] < 0.5 { 1.0 } else { -1.0 }).unwrap();
        let radii = dyadic_radii(0.25, 4.0 * h);
        let report = bmo_norm(&f, &ball_family(&g, &radii, 1).unwrap()).unwrap();
        let r_min = radii.last().unwrap();
        assert!(report.norm <= 1.0 + 1e-15);
        assert!((report.norm - 1.0).abs() < 2.0 * h / r_min);
        // oracle 4p(1-p) for the ball of radius r_min centred on the jump
        let m = (r_min / h).ceil() as usize - 1;
        let p = m as f64 / (2 * m + 1) as f64;
        let at_jump = report
            .per_window
            .iter()
            .find(|w| w.center == vec![512] && w.radius == *r_min)
            .unwrap();
        assert!((at_jump.oscillation - 4.0 * p * (1.0 - p)).abs() < 1e-14);
    }

    #[test]
    fn oscillation_ignores_constants_and_is_bounded_by_range() {
        let g = line(256);
        let f = SampledField::sample(&g, |x| (2.0 * PI * x[0]).sin() + 0.2 * (14.0 * PI * x[0]).cos())
            .unwrap();
        let family = ball_family(&g, &dyadic_radii(0.25, 0.02), 3).unwrap();
        let a = bmo_norm(&f, &family).unwrap();
        let b = bmo_norm(&f.map(|v| v + 7.0), &family).unwrap();
        for (x, y) in a.per_window.iter().zip(&b.per_window) {
            assert!((x.oscillation - y.oscillation).abs() < 1e-12);
        }
        let range = f.values().iter().cloned().fold(f64::MIN, f64::max)
            - f.values().iter().cloned().fold(f64::MAX, f64::min);
        assert!(a.norm <= 2.0 * range);
    }

    #[test]
    fn holder_of_cusp() {
        let g = line(4096);
        let f = SampledField::sample(&g, |x| (x[0] - 0.5).abs().powf(0.5)).unwrap();
        let s = holder_seminorm(&f, 0.5, 1).unwrap();
        assert!((s - 1.0).abs() < 0.05, "{s}");
        let s3 = holder_seminorm(&f.scaled(3.0), 0.5, 1).unwrap();
        assert!((s3 - 3.0 * s).abs() < 1e-12);
        assert_eq!(holder_seminorm(&SampledField::constant(&g, 1.0), 0.5, 4).unwrap(), 0.0);
        assert!(holder_seminorm(&f, 1.5, 1).is_err());
    }

    #[test]
    fn strichartz_second_of_parabola_matches_closed_form() {
        // f = x² away from the wrap: 2f(x) - f(x+y) - f(x-y) = -2y²
        let g = line(512);
        let h = g.spacing();
        let f = SampledField::sample(&g, |x| (x[0] - 0.5).powi(2)).unwrap();
        let alpha = 1.3;
        let side = 64.0 * h;
        let q = Cube { center: 256, side };
        let report = strichartz_second(&f, alpha, &[q]).unwrap();
        // closed form: Σ_{a,b ∈ Q, a≠b} 4 y⁴ / |y|^{1+2α} with y = (b-a)h, counts
        // of each |k| = |b-a| being 2(N - |k|) for N points in Q
        let n_pts = 63i64;
        let mut total = 0.0;
        for k in 1..n_pts {
            let y = k as f64 * h;
            total += 2.0 * (n_pts - k) as f64 * 4.0 * y.powi(4) * y.powf(-1.0 - 2.0 * alpha);
        }
        let expected = (total * h / n_pts as f64).sqrt();
        assert!((report.b - expected).abs() < 1e-6 * expected);
    }

    #[test]
    fn strichartz_invariances() {
        let g = Grid::new(2, 32, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| (2.0 * PI * x[0]).cos() * (2.0 * PI * x[1]).sin())
            .unwrap();
        let cubes = dyadic_cubes(&g, 0.25, 0.125);
        let a = strichartz_first(&f, 0.4, &cubes).unwrap();
        let b = strichartz_first(&f.scaled(2.5), 0.4, &cubes).unwrap();
        assert!((b.b - 2.5 * a.b).abs() < 1e-12 * b.b);
        let c = strichartz_first(&f.map(|v| v - 4.0), 0.4, &cubes).unwrap();
        assert!((c.b - a.b).abs() < 1e-10);
        let zero = strichartz_second(&SampledField::constant(&g, 2.0), 1.5, &cubes).unwrap();
        assert_eq!(zero.b, 0.0);
        assert!(strichartz_first(&f, 1.2, &cubes).is_err());
        assert!(strichartz_first(&f, 0.5, &[Cube { center: 0, side: 0.75 }]).is_err());
        assert!(strichartz_first(&f, 0.5, &[Cube { center: 0, side: 0.05 }]).is_err());
    }

    #[test]
    fn strichartz_second_annihilates_affine() {
        let g = Grid::new(2, 64, 1.0).unwrap();
        let f = SampledField::sample(&g, |x| 0.3 - 1.1 * x[0] + 2.0 * x[1]).unwrap();
        // cube of side 1/4 centred mid-domain; x ± y stays inside [1/8, 7/8)
        let q = Cube {
            center: g.index_of(&[32, 32]).unwrap(),
            side: 0.25,
        };
        assert!(strichartz_second(&f, 1.2, &[q]).unwrap().b < 1e-10);
    }

    #[test]
    fn strichartz_first_stable_under_refinement() {
        let value = |n| {
            let g = line(n);
            let f = SampledField::sample(&g, |x| (2.0 * PI * x[0]).cos()).unwrap();
            let cubes = vec![Cube { center: 0, side: 0.25 }, Cube { center: n / 4, side: 0.5 }];
            strichartz_first(&f, 0.5, &cubes).unwrap().b
        };
        let (a, b) = (value(512), value(1024));
        assert!((a - b).abs() < 0.2 * b, "{a} {b}");
    }

    #[test]
    fn tempered_growth_of_one() {
        let t = tempered_growth(
            1,
            |_| 1.0,
            Growth { constant: 1.0, exponent: 0.0 },
            1.0,
            1e3,
        )
        .unwrap();
        let exact_tail = 2.0 * (1.0f64 / 1e3).atan();
        assert!((t.truncated - (PI - exact_tail)).abs() < 1e-10);
        assert!(t.tail_bound < 2e-3);
        // the bound agrees with atan(1/M) through the M^{-5} term
        assert!(t.tail_bound >= exact_tail * (1.0 - 1e-12));
        assert_eq!(t.verdict, GrowthVerdict::Finite);
    }

    #[test]
    fn tempered_growth_verdicts() {
        let g15 = Growth { constant: 1.0, exponent: 1.5 };
        let t = tempered_growth(1, |x| x[0].abs().powf(1.5), g15, 1.0, 100.0).unwrap();
        assert_eq!(t.verdict, GrowthVerdict::DivergentTail);
        assert!(t.tail_bound.is_infinite());
        let g05 = Growth { constant: 1.0, exponent: 0.5 };
        let t = tempered_growth(1, |x| x[0].abs().powf(0.5), g05, 1.0, 100.0).unwrap();
        assert_eq!(t.verdict, GrowthVerdict::Finite);
        // |x|^{1/2} ≤ (1+|x|)^{1/2}: bound the true tail by a direct quadrature
        let rule = quad::Composite::new(20);
        let breaks: Vec<f64> = (0..=64).map(|k| 100.0 * 1.2f64.powi(k)).collect();
        let top = *breaks.last().unwrap();
        let tail = 2.0 * rule.integrate(&breaks, |x| {
            x.sqrt() / (1.0 + x * x)
        }) + 4.0 / top.sqrt();
        assert!(t.tail_bound >= tail);
    }

    #[test]
    fn tempered_growth_in_the_plane() {
        // radial |x|^0: ∫ 1/(1+ρ^3) 2πρ dρ over ρ ≤ M
        let t = tempered_growth(2, |_| 1.0, Growth { constant: 1.0, exponent: 0.0 }, 1.0, 50.0)
            .unwrap();
        let rule = quad::Composite::new(20);
        let oracle = 2.0 * PI * rule.integrate(&quad::uniform_breaks(0.0, 50.0, 500), |r| {
            r / (1.0 + r.powi(3))
        });
        assert!((t.truncated - oracle).abs() < 1e-10);
        assert!(t.tail_bound >= 2.0 * PI / 50.0 * (1.0 - 1e-3));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn reports_are_shift_invariant(
            a in proptest::collection::vec(-1.0f64..1.0, 4),
            c in -10.0f64..10.0,
        ) {
            let g = line(128);
            let f = SampledField::sample(&g, |x| {
                a.iter().enumerate().map(|(k, v)| v * (2.0 * PI * (k + 1) as f64 * x[0]).sin()).sum()
            }).unwrap();
            let lifted = f.map(|v| v + c);
            let cubes = dyadic_cubes(&g, 0.5, 0.125);
            let s1 = strichartz_second(&f, 0.7, &cubes).unwrap();
            let s2 = strichartz_second(&lifted, 0.7, &cubes).unwrap();
            prop_assert!((s1.b - s2.b).abs() < 1e-10 * (1.0 + c.abs()));
            let family = ball_family(&g, &[0.25, 0.0625], 1).unwrap();
            let b1 = bmo_norm(&f, &family).unwrap();
            let b2 = bmo_norm(&lifted, &family).unwrap();
            prop_assert!((b1.norm - b2.norm).abs() < 1e-12 * (1.0 + c.abs()));
        }
    }
}
