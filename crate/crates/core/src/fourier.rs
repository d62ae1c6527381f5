//! Discrete Fourier transforms on the periodic grid (1-d and row/column 2-d).

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::field::Grid;

pub(crate) struct Transform {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl Transform {
    pub fn new(grid: &Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        Transform {
            grid: grid.clone(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.apply(&mut data, &self.forward);
        data
    }

    /// Inverse transform including the 1/N normalisation; returns the real part.
    pub fn inverse_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.apply(&mut data, &self.inverse);
        let scale = 1.0 / data.len() as f64;
        data.into_iter().map(|c| c.re * scale).collect()
    }

    fn apply(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        match self.grid.dim() {
            1 => fft.process(data),
            _ => {
                // rows are contiguous (axis 1), then columns via a scratch column
                for row in data.chunks_mut(n) {
                    fft.process(row);
                }
                let mut column = vec![Complex64::new(0.0, 0.0); n];
                for j in 0..n {
                    for i in 0..n {
                        column[i] = data[i * n + j];
                    }
                    fft.process(&mut column);
                    for i in 0..n {
                        data[i * n + j] = column[i];
                    }
                }
            }
        }
    }

    /// Signed integer frequency vector of a flat spectral index. The Nyquist
    /// bin maps to +n/2.
    pub fn frequency(&self, flat: usize) -> [i64; 2] {
        let n = self.grid.n();
        let signed = |i: usize| -> i64 {
            if i <= n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            }
        };
        match self.grid.dim() {
            1 => [signed(flat), 0],
            _ => [signed(flat / n), signed(flat % n)],
        }
    }

    pub fn is_nyquist(&self, k: i64) -> bool {
        k == (self.grid.n() / 2) as i64
    }

    /// Multiply every coefficient by `symbol(k)` where `k` is the integer
    /// frequency vector (second component 0 in 1-d).
    pub fn apply_symbol<F>(&self, values: &[f64], symbol: F) -> Vec<f64>
    where
        F: Fn([i64; 2]) -> Complex64,
    {
        let mut spectrum = self.forward(values);
        for (flat, c) in spectrum.iter_mut().enumerate() {
            *c *= symbol(self.frequency(flat));
        }
        self.inverse_real(spectrum)
    }
}
