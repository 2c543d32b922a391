//! Zero-padded 2-D FFTs on a `2n × 2n` buffer.
//!
//! The forward transform leaves the spectrum in transposed layout
//! (`[k₂][k₁]`); the inverse undoes it. Multipliers built with the same
//! forward transform (kernels) or symmetric in `k₁ ↔ k₂` (the heat
//! multiplier) can be applied without caring about the layout.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::fields::GridSpec;

pub(crate) struct PaddedFft {
    n: usize,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for PaddedFft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PaddedFft")
            .field("n", &self.n)
            .field("m", &self.m)
            .finish()
    }
}

impl PaddedFft {
    pub fn new(n: usize) -> Self {
        let m = 2 * n;
        let mut planner = FftPlanner::new();
        Self {
            n,
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    #[inline]
    pub fn padded_len(&self) -> usize {
        self.m
    }

    /// Embeds up to two real `n × n` arrays as real and imaginary parts.
    pub fn embed(&self, re: &[f64], im: Option<&[f64]>) -> Vec<Complex64> {
        let (n, m) = (self.n, self.m);
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        for i in 0..n {
            let row = &mut buf[i * m..i * m + n];
            for (j, c) in row.iter_mut().enumerate() {
                c.re = re[i * n + j];
                if let Some(im) = im {
                    c.im = im[i * n + j];
                }
            }
        }
        buf
    }

    /// Crops the `n × n` corner back out, applying the `1/m²` normalization.
    pub fn extract(&self, buf: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let (n, m) = (self.n, self.m);
        let norm = 1.0 / (m * m) as f64;
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for c in &buf[i * m..i * m + n] {
                re.push(c.re * norm);
                im.push(c.im * norm);
            }
        }
        (re, im)
    }

    pub fn forward(&self, buf: &mut [Complex64]) {
        self.fwd.process(buf);
        transpose(buf, self.m);
        self.fwd.process(buf);
    }

    /// Unnormalized inverse of [`forward`](Self::forward).
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.inv.process(buf);
        transpose(buf, self.m);
        self.inv.process(buf);
    }

    /// Angular wavenumber of padded frequency index `f` for lattice spacing `h`.
    #[inline]
    pub fn wavenumber(&self, f: usize, h: f64) -> f64 {
        let m = self.m;
        let signed = if f <= m / 2 { f as f64 } else { f as f64 - m as f64 };
        2.0 * PI * signed / (m as f64 * h)
    }

    /// Applies the heat semigroup `e^{τΔ}` to one or two real fields at once.
    pub fn heat(&self, grid: &GridSpec, tau: f64, re: &[f64], im: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
        let m = self.m;
        let h = grid.spacing();
        let decay: Vec<f64> = (0..m)
            .map(|f| {
                let k = self.wavenumber(f, h);
                (-k * k * tau).exp()
            })
            .collect();
        let mut buf = self.embed(re, im);
        self.forward(&mut buf);
        for (a, row) in buf.chunks_exact_mut(m).enumerate() {
            let da = decay[a];
            for (c, db) in row.iter_mut().zip(&decay) {
                *c *= da * db;
            }
        }
        self.inverse(&mut buf);
        self.extract(&buf)
    }
}

fn transpose(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in i + 1..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}
