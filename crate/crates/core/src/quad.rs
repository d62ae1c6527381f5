//! Quadrature rules and the Hurwitz zeta function.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on [-1, 1], computed by Newton iteration
/// on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = order as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Composite Gauss–Legendre rule over the given panel breakpoints.
pub struct Composite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Composite {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Composite { nodes, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, breaks: &[f64], mut f: F) -> f64 {
        let mut total = 0.0;
        for pair in breaks.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let mut panel = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                panel += w * f(mid + half * x);
            }
            total += half * panel;
        }
        total
    }
}

/// Uniform panels on [a, b].
pub fn uniform_breaks(a: f64, b: f64, panels: usize) -> Vec<f64> {
    (0..=panels)
        .map(|i| a + (b - a) * i as f64 / panels as f64)
        .collect()
}

/// Panels on [0, b] refined geometrically towards 0 (for endpoint singularities)
/// and uniformly sized at most `max_width` elsewhere.
pub fn graded_breaks(b: f64, depth: usize, max_width: f64) -> Vec<f64> {
    let mut breaks = vec![0.0];
    let first = b.min(1.0);
    for j in (0..depth).rev() {
        breaks.push(first * 0.5f64.powi(j as i32 + 1));
    }
    let mut x = first;
    breaks.push(x);
    while x < b {
        let width = max_width.max(x * 0.25);
        x = (x + width).min(b);
        breaks.push(x);
    }
    breaks.dedup();
    breaks
}

const BERNOULLI_2K: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta ζ(s, a) = Σ_{k≥0} (k + a)^{-s}, analytically continued to
/// every real s ≠ 1 with s > -15, for a > 0. Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(a > 0.0, "hurwitz_zeta requires a > 0");
    assert!((s - 1.0).abs() > 1e-12, "pole at s = 1");
    const N: usize = 24;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (k as f64 + a).powf(-s);
    }
    let x = N as f64 + a;
    sum += x.powf(1.0 - s) / (s - 1.0) + 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) / (2j)!
    let mut coeff = s; // j = 1: s / 2!
    let mut fact = 2.0;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_2K.iter().enumerate() {
        let term = b / fact * coeff * power;
        sum += term;
        let j2 = 2.0 * (j as f64 + 1.0);
        coeff *= (s + j2 - 1.0) * (s + j2);
        fact *= (j2 + 1.0) * (j2 + 2.0);
        power /= x * x;
    }
    sum
}

/// Riemann zeta via ζ(s, 1).
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// Dirichlet beta β(s) = Σ_{k≥0} (-1)^k (2k+1)^{-s}, continued through the
/// Hurwitz representation.
pub fn dirichlet_beta(s: f64) -> f64 {
    4f64.powf(-s) * (hurwitz_zeta(s, 0.25) - hurwitz_zeta(s, 0.75))
}
