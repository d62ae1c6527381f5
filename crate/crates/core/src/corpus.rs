//! Synthetic fields of known regularity and the plain-text field file format.
//!
//! File layout: one header line
//! `iabmo-field v1 dim=<d> n=<n> period=<L> family=<name> [key=value…]`
//! followed by `n^d` values, one per line, in row-major order.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Grid, SampledField, Stencil};
use crate::quad::hurwitz_zeta;
use crate::report::{fmt_f64, write_atomic};
use crate::spectral::riesz_potential;

pub const FIELD_MAGIC: &str = "iabmo-field";
pub const FIELD_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    SmoothBump,
    Cusp { gamma: f64 },
    /// Terms with frequency at or above half the grid size are dropped.
    Weierstrass { beta: f64, levels: u32 },
    SignJump,
    LogSingularity,
    RieszOfNoise { alpha: f64, seed: u64, cells: usize },
    Sinusoid { frequency: u32 },
    /// Random trigonometric polynomial with modes `0 < |k|_∞ ≤ max_frequency`.
    BandLimited { seed: u64, max_frequency: u32 },
}

impl Family {
    pub const NAMES: [&'static str; 8] = [
        "smooth_bump",
        "cusp",
        "weierstrass",
        "sign_jump",
        "log_singularity",
        "riesz_of_noise",
        "sinusoid",
        "band_limited",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::SmoothBump => "smooth_bump",
            Family::Cusp { .. } => "cusp",
            Family::Weierstrass { .. } => "weierstrass",
            Family::SignJump => "sign_jump",
            Family::LogSingularity => "log_singularity",
            Family::RieszOfNoise { .. } => "riesz_of_noise",
            Family::Sinusoid { .. } => "sinusoid",
            Family::BandLimited { .. } => "band_limited",
        }
    }

    /// Parameters as `key=value` pairs, the family name first.
    pub fn pairs(&self) -> Vec<(String, String)> {
        let mut out = vec![("family".to_string(), self.name().to_string())];
        let mut push = |k: &str, v: String| out.push((k.to_string(), v));
        match *self {
            Family::SmoothBump | Family::SignJump | Family::LogSingularity => {}
            Family::Cusp { gamma } => push("gamma", fmt_f64(gamma)),
            Family::Weierstrass { beta, levels } => {
                push("beta", fmt_f64(beta));
                push("levels", levels.to_string());
            }
            Family::RieszOfNoise { alpha, seed, cells } => {
                push("alpha", fmt_f64(alpha));
                push("seed", seed.to_string());
                push("cells", cells.to_string());
            }
            Family::Sinusoid { frequency } => push("frequency", frequency.to_string()),
            Family::BandLimited {
                seed,
                max_frequency,
            } => {
                push("seed", seed.to_string());
                push("max_frequency", max_frequency.to_string());
            }
        }
        out
    }

    /// Inverse of [`Family::pairs`]; unknown keys are ignored.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Family> {
        let get = |key: &'static str| -> Result<&String> {
            pairs
                .get(key)
                .ok_or_else(|| Error::param(key, "missing parameter"))
        };
        fn num<T: std::str::FromStr>(key: &'static str, v: &str) -> Result<T> {
            v.parse::<T>()
                .map_err(|_| Error::param(key, format!("cannot parse `{v}`")))
        }
        let family = match get("family")?.as_str() {
            "smooth_bump" => Family::SmoothBump,
            "cusp" => Family::Cusp {
                gamma: num("gamma", get("gamma")?)?,
            },
            "weierstrass" => Family::Weierstrass {
                beta: num("beta", get("beta")?)?,
                levels: num("levels", get("levels")?)?,
            },
            "sign_jump" => Family::SignJump,
            "log_singularity" => Family::LogSingularity,
            "riesz_of_noise" => Family::RieszOfNoise {
                alpha: num("alpha", get("alpha")?)?,
                seed: num("seed", get("seed")?)?,
                cells: match pairs.get("cells") {
                    Some(v) => num("cells", v)?,
                    None => 32,
                },
            },
            "sinusoid" => Family::Sinusoid {
                frequency: num("frequency", get("frequency")?)?,
            },
            "band_limited" => Family::BandLimited {
                seed: num("seed", get("seed")?)?,
                max_frequency: num("max_frequency", get("max_frequency")?)?,
            },
            other => {
                return Err(Error::param(
                    "family",
                    format!("unknown family `{other}`; expected one of {}", Family::NAMES.join(", ")),
                ))
            }
        };
        family.validate()?;
        Ok(family)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Family::Cusp { gamma } if !(gamma > 0.0 && gamma <= 1.0) => {
                Err(Error::param("gamma", format!("{gamma} is outside (0, 1]")))
            }
            Family::Weierstrass { beta, .. } if !(beta > 0.0 && beta < 1.0) => {
                Err(Error::param("beta", format!("{beta} is outside (0, 1)")))
            }
            Family::Weierstrass { levels, .. } if levels < 4 => {
                Err(Error::param("levels", format!("{levels} is below 4")))
            }
            Family::RieszOfNoise { alpha, .. } if !(alpha > 0.0 && alpha < 2.0) => {
                Err(Error::param("alpha", format!("{alpha} is outside (0, 2)")))
            }
            Family::RieszOfNoise { cells, .. } if !(cells >= 2 && cells.is_power_of_two()) => {
                Err(Error::param("cells", format!("{cells} must be a power of two >= 2")))
            }
            Family::Sinusoid { frequency } if frequency == 0 => {
                Err(Error::param("frequency", "must be positive"))
            }
            Family::BandLimited { max_frequency, .. } if max_frequency == 0 => {
                Err(Error::param("max_frequency", "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub family: Family,
    pub grid: Grid,
}

impl CorpusSpec {
    pub fn new(family: Family, grid: Grid) -> Result<CorpusSpec> {
        family.validate()?;
        Ok(CorpusSpec { family, grid })
    }
}

/// Smooth step: 1 for `s ≤ a`, 0 for `s ≥ b`, C^∞ in between.
fn taper(s: f64, a: f64, b: f64) -> f64 {
    if s <= a {
        return 1.0;
    }
    if s >= b {
        return 0.0;
    }
    let t = (b - s) / (b - a);
    let up = (-1.0 / t).exp();
    let down = (-1.0 / (1.0 - t)).exp();
    up / (up + down)
}

fn distance_from(x: &[f64], c: f64) -> f64 {
    x.iter().map(|v| (v - c) * (v - c)).sum::<f64>().sqrt()
}

/// Deterministic field for a spec.
pub fn generate(spec: &CorpusSpec) -> Result<SampledField> {
    spec.family.validate()?;
    let grid = &spec.grid;
    let l = grid.period();
    let center = l / 2.0;
    match spec.family {
        Family::SmoothBump => SampledField::sample(grid, |x| {
            let s = distance_from(x, center) / (l / 4.0);
            if s < 1.0 {
                (1.0 - 1.0 / (1.0 - s * s)).exp()
            } else {
                0.0
            }
        }),
        Family::Cusp { gamma } => SampledField::sample(grid, |x| {
            let s = distance_from(x, center);
            s.powf(gamma) * taper(s, l / 8.0, 7.0 * l / 32.0)
        }),
        Family::Weierstrass { beta, levels } => {
            let nyquist = (grid.n() / 2) as f64;
            SampledField::sample(grid, |x| {
                let mut total = 0.0;
                for j in 0..levels {
                    let freq = 3f64.powi(j as i32);
                    if freq >= nyquist {
                        break;
                    }
                    let amp = freq.powf(-beta);
                    for v in x {
                        total += amp * (2.0 * PI * freq * v / l).cos();
                    }
                }
                total
            })
        }
        Family::SignJump => {
            SampledField::sample(grid, |x| if x[0] < center { 1.0 } else { -1.0 })
        }
        Family::LogSingularity => {
            let focus = center + grid.spacing() / 2.0;
            SampledField::sample(grid, |x| {
                let s = distance_from(x, focus);
                s.ln() * taper(s, l / 8.0, 7.0 * l / 32.0)
            })
        }
        Family::RieszOfNoise { alpha, seed, cells } => {
            let noise = noise_cells(grid, seed, cells)?;
            riesz_potential(&noise, alpha)
        }
        Family::Sinusoid { frequency } => SampledField::sample(grid, |x| {
            x.iter()
                .map(|v| (2.0 * PI * frequency as f64 * v / l).cos())
                .sum()
        }),
        Family::BandLimited {
            seed,
            max_frequency,
        } => {
            let modes = band_modes(grid.dim(), seed, max_frequency);
            SampledField::sample(grid, |x| {
                modes
                    .iter()
                    .map(|(k, a, b)| {
                        let dot: f64 = x.iter().zip(k).map(|(v, ki)| *ki as f64 * v).sum();
                        let phase = 2.0 * PI * dot / l;
                        a * phase.cos() + b * phase.sin()
                    })
                    .sum()
            })
        }
    }
}

/// Seeded ±1 field, constant on each of `cells^d` coarse cells.
pub fn noise_cells(grid: &Grid, seed: u64, cells: usize) -> Result<SampledField> {
    if cells > grid.n() || grid.n() % cells != 0 {
        return Err(Error::param(
            "cells",
            format!("{cells} must divide the grid size {}", grid.n()),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = cells.pow(grid.dim() as u32);
    let signs: Vec<f64> = (0..count)
        .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        .collect();
    let width = grid.n() / cells;
    let values = (0..grid.len())
        .map(|flat| {
            let p = grid.multi_index(flat);
            let cell = match grid.dim() {
                1 => p[0] / width,
                _ => (p[0] / width) * cells + p[1] / width,
            };
            signs[cell]
        })
        .collect();
    SampledField::new(grid.clone(), values)
}

fn band_modes(dim: usize, seed: u64, max_frequency: u32) -> Vec<([i64; 2], f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = max_frequency as i64;
    let mut modes = Vec::new();
    let second = if dim == 2 { -m..=m } else { 0..=0 };
    for a in 0..=m {
        for b in second.clone() {
            // one representative of each ±k pair
            if a == 0 && b <= 0 {
                continue;
            }
            let (ca, cb) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            modes.push(([a, b], ca, cb));
        }
    }
    modes
}

/// Closed interval of exponents; `(lo, hi)` with an open or closed upper end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaBand {
    pub lo: f64,
    pub hi: f64,
    pub hi_inclusive: bool,
}

impl AlphaBand {
    pub fn contains(&self, alpha: f64) -> bool {
        alpha > self.lo && (alpha < self.hi || (self.hi_inclusive && alpha == self.hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regularity {
    pub holder: Option<f64>,
    /// Exponents α for which the field belongs to `I_α(BMO)`; `None` when no
    /// positive α qualifies.
    pub band: Option<AlphaBand>,
}

/// Analytically known regularity of a family, for orienting experiments.
pub fn expected_regularity(spec: &CorpusSpec) -> Regularity {
    let band = |hi: f64, inclusive: bool| {
        Some(AlphaBand {
            lo: 0.0,
            hi,
            hi_inclusive: inclusive,
        })
    };
    match spec.family {
        Family::SmoothBump | Family::Sinusoid { .. } | Family::BandLimited { .. } => Regularity {
            holder: Some(1.0),
            band: band(2.0, false),
        },
        Family::Cusp { gamma } => Regularity {
            holder: Some(gamma),
            band: band(gamma, true),
        },
        // the limit object has D_β f a lacunary series with unit coefficients,
        // which is not in BMO
        Family::Weierstrass { beta, .. } => Regularity {
            holder: Some(beta),
            band: band(beta, false),
        },
        Family::SignJump | Family::LogSingularity => Regularity {
            holder: None,
            band: None,
        },
        Family::RieszOfNoise { alpha, .. } => Regularity {
            holder: Some(alpha.min(1.0)),
            band: band(alpha, true),
        },
    }
}

/// Least-squares line through `(ln r, ln m(r))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub radii: Vec<f64>,
    pub means: Vec<f64>,
}

/// Radii fitted by default: dyadic from `top` down to the smallest radius whose
/// annulus spans at least [`SLOPE_MIN_CELLS`]`/2` cells. Below that the sampled
/// cusp point biases the local slope low.
pub fn slope_radii(grid: &Grid, top: f64) -> Vec<f64> {
    crate::bmo::dyadic_radii(top, SLOPE_MIN_CELLS as f64 * grid.spacing())
}

pub const SLOPE_MIN_CELLS: usize = 32;

/// Regularity exponent from the scaling of `r·ν̃₀(x, r)`, the annulus RMS of
/// `f(x+y) - f(x)`. The mean is over `x ∈ B_r(focus)` when a focus is given
/// and over the whole grid otherwise; the fitted slope estimates the Hölder
/// exponent at the focus (or the uniform one).
pub fn holder_slope(field: &SampledField, focus: Option<usize>, radii: &[f64]) -> Result<SlopeFit> {
    if radii.len() < 2 {
        return Err(Error::param("radii", "need at least two radii"));
    }
    let grid = field.grid();
    let mut means = Vec::with_capacity(radii.len());
    for &r in radii {
        crate::field::BallWindow::new(grid, 0, r)?;
        let annulus = Stencil::annulus(grid, r);
        if annulus.is_empty() {
            return Err(Error::param("radii", format!("annulus of radius {r} is empty")));
        }
        let centers: Vec<usize> = match focus {
            Some(c) => Stencil::ball(grid, r)
                .offsets()
                .iter()
                .map(|&o| grid.shift(c, o))
                .collect(),
            None => (0..grid.len()).collect(),
        };
        let total: f64 = centers
            .iter()
            .map(|&x| {
                let fx = field.at(x);
                let sum: f64 = annulus
                    .offsets()
                    .iter()
                    .map(|&o| (field.at(grid.shift(x, o)) - fx).powi(2))
                    .sum();
                (sum / annulus.len() as f64).sqrt()
            })
            .sum();
        means.push(total / centers.len() as f64);
    }
    if let Some(&m) = means.iter().find(|m| !(**m > 0.0)) {
        return Err(Error::NonFinite {
            index: vec![],
            value: m.ln(),
        });
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        radii: radii.to_vec(),
        means,
    })
}

/// `I_α` of the coarse noise by the kernel-difference formula
/// `c_{1,α} ∫ b(y) (|x-y|^{α-1} - |y|^{α-1}) dy`, evaluated exactly cell by cell
/// with the periodised kernel; returned with its mean removed. One dimension,
/// `α ≠ 1`.
pub fn riesz_of_noise_by_kernel(spec: &CorpusSpec) -> Result<SampledField> {
    let Family::RieszOfNoise { alpha, seed, cells } = spec.family else {
        return Err(Error::param("family", "kernel oracle needs riesz_of_noise"));
    };
    let grid = &spec.grid;
    if grid.dim() != 1 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    if (alpha - 1.0).abs() < 1e-9 {
        return Err(Error::param("alpha", "the kernel constant has a pole at α = 1"));
    }
    let noise = noise_cells(grid, seed, cells)?;
    let width = grid.n() / cells;
    let signs: Vec<f64> = (0..cells).map(|c| noise.at(c * width)).collect();
    let l = grid.period();
    use statrs::function::gamma::gamma;
    let c = gamma((1.0 - alpha) / 2.0) / (2f64.powf(alpha) * PI.sqrt() * gamma(alpha / 2.0));
    // antiderivative over one period of ζ(1-α, a) + ζ(1-α, 1-a), zero at both ends
    let antiderivative = |a: f64| -> f64 {
        let a = a.rem_euclid(1.0);
        if a == 0.0 {
            return 0.0;
        }
        (hurwitz_zeta(-alpha, a) - hurwitz_zeta(-alpha, 1.0 - a)) / alpha
    };
    let values: Vec<f64> = (0..grid.n())
        .map(|i| {
            let x = i as f64 * grid.spacing();
            signs
                .iter()
                .enumerate()
                .map(|(cell, b)| {
                    // a sampled step sits halfway between its last and first samples
                    let lo = cell as f64 * l / cells as f64 - grid.spacing() / 2.0;
                    let hi = (cell + 1) as f64 * l / cells as f64 - grid.spacing() / 2.0;
                    // ∫_{x-hi}^{x-lo} K(u) du with K(u) = L^{α-1} [ζ(1-α, u/L) + ζ(1-α, 1-u/L)]
                    b * l.powf(alpha) * (antiderivative((x - lo) / l) - antiderivative((x - hi) / l))
                })
                .sum::<f64>()
                * c
        })
        .collect();
    let field = SampledField::new(grid.clone(), values)?;
    let mean = field.mean();
    Ok(field.map(|v| v - mean))
}

/// A field read from disk together with its header pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedField {
    pub field: SampledField,
    pub header: BTreeMap<String, String>,
}

impl LoadedField {
    pub fn family(&self) -> Option<Family> {
        Family::from_pairs(&self.header).ok()
    }
}

/// Serialise with the given extra header pairs (each `key=value`, no spaces).
pub fn field_text(field: &SampledField, extra: &[(String, String)]) -> String {
    let grid = field.grid();
    let mut out = format!(
        "{FIELD_MAGIC} {FIELD_VERSION} dim={} n={} period={}",
        grid.dim(),
        grid.n(),
        fmt_f64(grid.period())
    );
    for (k, v) in extra {
        let _ = write!(out, " {k}={v}");
    }
    out.push('\n');
    for v in field.values() {
        out.push_str(&fmt_f64(*v));
        out.push('\n');
    }
    out
}

pub fn save_field(path: &Path, field: &SampledField, extra: &[(String, String)]) -> Result<()> {
    for (k, v) in extra {
        if k.contains(char::is_whitespace) || v.contains(char::is_whitespace) || k.contains('=') {
            return Err(Error::param("header", format!("`{k}={v}` is not a plain token")));
        }
    }
    write_atomic(path, field_text(field, extra).as_bytes())
}

pub fn parse_field(text: &str, path: &Path) -> Result<LoadedField> {
    let mut lines = text.lines();
    let header_line = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty file".into()))?;
    let mut tokens = header_line.split_whitespace();
    if tokens.next() != Some(FIELD_MAGIC) {
        return Err(Error::MalformedHeader(format!("missing `{FIELD_MAGIC}` marker")));
    }
    match tokens.next() {
        Some(FIELD_VERSION) => {}
        other => {
            return Err(Error::MalformedHeader(format!(
                "unsupported version {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut header = BTreeMap::new();
    for token in tokens {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| Error::MalformedHeader(format!("token `{token}` is not key=value")))?;
        header.insert(k.to_string(), v.to_string());
    }
    let required = |key: &str| -> Result<&String> {
        header
            .get(key)
            .ok_or_else(|| Error::MalformedHeader(format!("missing `{key}`")))
    };
    let dim: usize = required("dim")?
        .parse()
        .map_err(|_| Error::MalformedHeader("`dim` is not an integer".into()))?;
    if !(dim == 1 || dim == 2) {
        return Err(Error::UnsupportedDimension(dim));
    }
    let n: usize = required("n")?
        .parse()
        .map_err(|_| Error::MalformedHeader("`n` is not an integer".into()))?;
    let period: f64 = required("period")?
        .parse()
        .map_err(|_| Error::MalformedHeader("`period` is not a number".into()))?;
    let grid = Grid::new(dim, n, period)?;
    let mut values = Vec::with_capacity(grid.len());
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| Error::Parse {
            path: path.to_path_buf(),
            line: i + 2,
            reason: format!("`{line}` is not a number"),
        })?;
        if !v.is_finite() {
            let index = if values.len() < grid.len() {
                grid.point(values.len())
            } else {
                vec![values.len()]
            };
            return Err(Error::NonFinite { index, value: v });
        }
        values.push(v);
    }
    if values.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    Ok(LoadedField {
        field: SampledField::new(grid, values)?,
        header,
    })
}

pub fn load_field(path: &Path) -> Result<LoadedField> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_field(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmo::holder_seminorm;
    use proptest::prelude::*;

    fn spec(family: Family, dim: usize, n: usize) -> CorpusSpec {
        CorpusSpec::new(family, Grid::new(dim, n, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn bump_shape() {
        for dim in [1, 2] {
            let s = spec(Family::SmoothBump, dim, 64);
            let f = generate(&s).unwrap();
            let g = f.grid();
            let c = g.index_of(&vec![32; dim]).unwrap();
            assert_eq!(f.values()[c], 1.0);
            for (i, &v) in f.values().iter().enumerate() {
                let x = g.coords(i);
                let r = ((x[0] - 0.5).powi(2) + if dim == 2 { (x[1] - 0.5).powi(2) } else { 0.0 }).sqrt();
                if r >= 0.25 {
                    assert_eq!(v, 0.0);
                }
                assert!(v <= 1.0);
            }
        }
    }

    #[test]
    fn sinusoid_samples() {
        let f = generate(&spec(Family::Sinusoid { frequency: 1 }, 1, 8)).unwrap();
        for (k, v) in f.values().iter().enumerate() {
            assert_eq!(*v, (2.0 * PI * k as f64 / 8.0).cos());
        }
    }

    #[test]
    fn noise_is_reproducible() {
        let s = spec(
            Family::RieszOfNoise {
                alpha: 0.5,
                seed: 7,
                cells: 32,
            },
            1,
            512,
        );
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        let other = spec(
            Family::RieszOfNoise {
                alpha: 0.5,
                seed: 8,
                cells: 32,
            },
            1,
            512,
        );
        assert_ne!(generate(&other).unwrap(), a);
    }

    #[test]
    fn invalid_parameters() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        assert!(CorpusSpec::new(Family::Cusp { gamma: 1.5 }, g.clone()).is_err());
        assert!(CorpusSpec::new(Family::Weierstrass { beta: 0.3, levels: 3 }, g.clone()).is_err());
        assert!(CorpusSpec::new(
            Family::RieszOfNoise {
                alpha: 2.0,
                seed: 1,
                cells: 8
            },
            g.clone()
        )
        .is_err());
        let too_many = CorpusSpec::new(
            Family::RieszOfNoise {
                alpha: 0.5,
                seed: 1,
                cells: 128,
            },
            g,
        )
        .unwrap();
        assert!(generate(&too_many).is_err());
    }

    #[test]
    fn analytic_families_refine_consistently() {
        let families = [
            Family::SmoothBump,
            Family::Cusp { gamma: 0.5 },
            Family::Sinusoid { frequency: 3 },
            Family::Weierstrass { beta: 0.4, levels: 4 },
            Family::BandLimited {
                seed: 4,
                max_frequency: 6,
            },
        ];
        for family in families {
            for dim in [1, 2] {
                let n = if dim == 1 { 1024 } else { 128 };
                let coarse = generate(&spec(family.clone(), dim, n)).unwrap();
                let fine = generate(&spec(family.clone(), dim, 2 * n)).unwrap();
                let down = fine.downsample(2).unwrap();
                let err = coarse
                    .values()
                    .iter()
                    .zip(down.values())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                assert!(err < 1e-12, "{family:?} dim {dim}: {err}");
            }
        }
    }

    #[test]
    fn regularity_tags() {
        let g = Grid::new(1, 64, 1.0).unwrap();
        let r = expected_regularity(&CorpusSpec::new(Family::SmoothBump, g.clone()).unwrap());
        let band = r.band.unwrap();
        assert!(band.contains(0.01) && band.contains(1.99) && !band.contains(2.0));
        let r = expected_regularity(&CorpusSpec::new(Family::Cusp { gamma: 0.5 }, g.clone()).unwrap());
        assert_eq!(r.holder, Some(0.5));
        assert!(r.band.unwrap().contains(0.5) && !r.band.unwrap().contains(0.8));
        let r = expected_regularity(&CorpusSpec::new(Family::SignJump, g).unwrap());
        assert!(r.band.is_none());
    }

    #[test]
    fn cusp_exponent_from_dense_pair_search() {
        // seminorm at exponent a is finite iff a ≤ γ; the ratio of seminorms
        // on nested grids at exponent γ + δ grows like 2^δ
        let fine = generate(&spec(Family::Cusp { gamma: 0.5 }, 1, 8192)).unwrap();
        let coarse = fine.downsample(2).unwrap();
        let exponent = |a: f64| {
            let s_f = holder_seminorm(&fine, a, 1).unwrap();
            let s_c = holder_seminorm(&coarse, a, 1).unwrap();
            (s_f / s_c).log2()
        };
        // growth of the finite-resolution seminorm at exponent 1 is 1 - γ
        let gamma_est = 1.0 - exponent(1.0);
        assert!((gamma_est - 0.5).abs() < 0.05, "{gamma_est}");
    }

    #[test]
    fn cusp_slope() {
        let f = generate(&spec(Family::Cusp { gamma: 0.5 }, 1, 8192)).unwrap();
        let h = f.grid().spacing();
        let fit = holder_slope(&f, Some(4096), &slope_radii(f.grid(), 1.0 / 16.0)).unwrap();
        assert!((fit.slope - 0.5).abs() < 0.025, "{}", fit.slope);
        // down to 4h the lattice bias drags the fit below γ
        let fine = crate::bmo::dyadic_radii(1.0 / 16.0, 4.0 * h);
        let biased = holder_slope(&f, Some(4096), &fine).unwrap();
        assert!(biased.slope < fit.slope);
    }

    #[test]
    fn weierstrass_slope() {
        let levels = 7;
        let f = generate(&spec(Family::Weierstrass { beta: 0.3, levels }, 1, 4096)).unwrap();
        // scales between the finest wavelength and L/8
        let finest = 3f64.powi(-(levels as i32 - 1));
        let radii: Vec<f64> = crate::bmo::dyadic_radii(1.0 / 8.0, 2.0 * finest);
        let fit = holder_slope(&f, None, &radii).unwrap();
        assert!((fit.slope - 0.3).abs() < 0.045, "{} over {:?}", fit.slope, radii);
    }

    #[test]
    fn kernel_oracle_matches_spectral_noise() {
        for alpha in [0.3, 0.5, 0.8, 1.4] {
            let s = spec(
                Family::RieszOfNoise {
                    alpha,
                    seed: 11,
                    cells: 16,
                },
                1,
                512,
            );
            let spectral = generate(&s).unwrap();
            let kernel = riesz_of_noise_by_kernel(&s).unwrap();
            let num: f64 = spectral
                .values()
                .iter()
                .zip(kernel.values())
                .map(|(a, b)| (a - b).powi(2))
                .sum();
            let den: f64 = kernel.values().iter().map(|b| b * b).sum();
            assert!((num / den).sqrt() < 0.05, "alpha {alpha}: {}", (num / den).sqrt());
        }
    }

    #[test]
    fn file_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.fld");
        let s = spec(
            Family::RieszOfNoise {
                alpha: 1.3,
                seed: 2,
                cells: 8,
            },
            2,
            16,
        );
        let f = generate(&s).unwrap();
        save_field(&path, &f, &s.family.pairs()).unwrap();
        let loaded = load_field(&path).unwrap();
        assert!(loaded
            .field
            .values()
            .iter()
            .zip(f.values())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(loaded.field.grid(), f.grid());
        assert_eq!(loaded.family(), Some(s.family.clone()));

        let text = std::fs::read_to_string(&path).unwrap();
        let p = Path::new("x");
        let truncated: String = text.lines().take(100).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_field(&truncated, p), Err(Error::LengthMismatch { expected: 256, actual: 99 })));
        let three = text.replacen("dim=2", "dim=3", 1);
        assert!(matches!(parse_field(&three, p), Err(Error::UnsupportedDimension(3))));
        assert!(matches!(parse_field("hello\n1\n", p), Err(Error::MalformedHeader(_))));
        let nan = text.replacen(&fmt_f64(f.values()[5]), "NaN", 1);
        assert!(matches!(parse_field(&nan, p), Err(Error::NonFinite { .. })));
        let junk = text.replacen(&fmt_f64(f.values()[5]), "abc", 1);
        assert!(matches!(parse_field(&junk, p), Err(Error::Parse { line: 7, .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn any_field_round_trips(values in proptest::collection::vec(proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO, 64)) {
            let g = Grid::new(2, 8, 0.75).unwrap();
            let f = SampledField::new(g, values).unwrap();
            let text = field_text(&f, &[("family".into(), "none".into())]);
            let back = parse_field(&text, Path::new("p")).unwrap();
            prop_assert!(back.field.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }

        #[test]
        fn generation_is_deterministic(seed in 0u64..1000, m in 1u32..6) {
            let s = spec(Family::BandLimited { seed, max_frequency: m }, 2, 16);
            let a = generate(&s).unwrap();
            let b = generate(&s).unwrap();
            prop_assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }
}
