//! Free-space Biot-Savart law by zero-padded FFT convolution.
//!
//! `u(x_i) = h² Σ_j K(x_i − y_j) ω(y_j)` with `K(x) = x^⊥ / (2π|x|²)` and
//! `K(0) = 0`. Padding to `2n × 2n` makes the circular convolution equal to
//! the linear one on the `n × n` window, so no periodic images are seen.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, Point, ScalarField, VectorField};
use crate::spectral::PaddedFft;

#[derive(Debug)]
pub struct BiotSavartPlan {
    grid: GridSpec,
    fft: PaddedFft,
    /// Real kernel samples, padded layout `[(di mod m) * m + (dj mod m)]`.
    kernel1: Vec<f64>,
    kernel2: Vec<f64>,
    /// Transform of `K₁ + iK₂`; one inverse FFT yields both components.
    kernel_hat: Vec<Complex64>,
}

/// Kernel sample at lattice offset `(di, dj)` for spacing `h`.
#[inline]
fn kernel_sample(di: i64, dj: i64, h: f64) -> Point {
    if di == 0 && dj == 0 {
        return [0.0, 0.0];
    }
    let r2 = (di * di + dj * dj) as f64;
    let c = 1.0 / (2.0 * PI * h * r2);
    [-(dj as f64) * c, di as f64 * c]
}

impl BiotSavartPlan {
    pub fn new(grid: GridSpec) -> Self {
        let n = grid.n();
        let fft = PaddedFft::new(n);
        let m = fft.padded_len();
        let h = grid.spacing();
        let offset = |a: usize| -> Option<i64> {
            match a {
                a if a < n => Some(a as i64),
                a if a > n => Some(a as i64 - m as i64),
                _ => None,
            }
        };
        let mut kernel1 = vec![0.0; m * m];
        let mut kernel2 = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                if let (Some(di), Some(dj)) = (offset(a), offset(b)) {
                    let k = kernel_sample(di, dj, h);
                    kernel1[a * m + b] = k[0];
                    kernel2[a * m + b] = k[1];
                }
            }
        }
        let mut kernel_hat: Vec<Complex64> = kernel1
            .iter()
            .zip(&kernel2)
            .map(|(&a, &b)| Complex64::new(a, b))
            .collect();
        fft.forward(&mut kernel_hat);
        Self {
            grid,
            fft,
            kernel1,
            kernel2,
            kernel_hat,
        }
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Kernel value stored for lattice offset `(di, dj)`, `|di|, |dj| < n`.
    pub fn kernel_at(&self, di: i64, dj: i64) -> Point {
        let n = self.grid.n() as i64;
        let m = 2 * n;
        assert!(di.abs() < n && dj.abs() < n, "offset outside kernel support");
        let a = di.rem_euclid(m) as usize;
        let b = dj.rem_euclid(m) as usize;
        let k = a * m as usize + b;
        [self.kernel1[k], self.kernel2[k]]
    }

    /// Convolves raw values laid out on this plan's lattice. `spacing_factor`
    /// is the ratio of the actual lattice spacing to the plan's: the kernel is
    /// homogeneous of degree −1, so a dilated lattice only rescales `u`.
    pub(crate) fn convolve(&self, values: &[f64], spacing_factor: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.fft.padded_len();
        let mut buf = self.fft.embed(values, None);
        self.fft.forward(&mut buf);
        for (c, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *c *= k;
        }
        self.fft.inverse(&mut buf);
        let (mut u1, mut u2) = self.fft.extract(&buf);
        debug_assert_eq!(buf.len(), m * m);
        let scale = self.grid.cell_area() * spacing_factor;
        u1.iter_mut().chain(u2.iter_mut()).for_each(|v| *v *= scale);
        (u1, u2)
    }

    pub(crate) fn heat(&self, grid: &GridSpec, tau: f64, re: &[f64], im: Option<&[f64]>) -> (Vec<f64>, Vec<f64>) {
        self.fft.heat(grid, tau, re, im)
    }

    pub fn velocity_from_vorticity(&self, omega: &ScalarField) -> Result<VectorField> {
        self.grid.check_same(omega.grid())?;
        let (u1, u2) = self.convolve(omega.values(), 1.0);
        let u = VectorField::from_parts(self.grid, u1, u2, omega.time_tag());
        if u.u1().iter().chain(u.u2()).all(|v| v.is_finite()) {
            Ok(u)
        } else {
            Err(Error::NonFinite("velocity_from_vorticity"))
        }
    }

    /// Spectral divergence of the padded convolution, sampled on the window.
    pub fn spectral_divergence(&self, omega: &ScalarField) -> Result<ScalarField> {
        self.grid.check_same(omega.grid())?;
        let m = self.fft.padded_len();
        let h = self.grid.spacing();
        let mut b1 = self.fft.embed(omega.values(), None);
        self.fft.forward(&mut b1);
        let i = Complex64::new(0.0, 1.0);
        // transposed layout: row index is the k₂ frequency
        for a in 0..m {
            let k2 = self.fft.wavenumber(a, h);
            for b in 0..m {
                let k1 = self.fft.wavenumber(b, h);
                let kh = self.kernel_hat[a * m + b];
                let w = b1[a * m + b];
                // kernel_hat = K̂₁ + iK̂₂ with K̂ₐ Hermitian; split them
                let idx_neg = ((m - a) % m) * m + (m - b) % m;
                let kneg = self.kernel_hat[idx_neg].conj();
                let k1h = (kh + kneg) * 0.5;
                let k2h = (kh - kneg) * (-0.5 * i);
                b1[a * m + b] = i * (k1 * k1h + k2 * k2h) * w;
            }
        }
        self.fft.inverse(&mut b1);
        let (d, _) = self.fft.extract(&b1);
        let scale = self.grid.cell_area();
        Ok(ScalarField::from_parts(
            self.grid,
            d.into_iter().map(|v| v * scale).collect(),
            omega.time_tag(),
        ))
    }

    /// `√t · max |u|`, the quantity controlled by the `L¹ → L^∞` velocity bound.
    pub fn sup_velocity_scaling(&self, omega: &ScalarField) -> Result<f64> {
        let t = match omega.time_tag() {
            Some(t) if t > 0.0 => t,
            other => {
                return Err(Error::pre(format!(
                    "sup_velocity_scaling needs a time tag t > 0, got {other:?}"
                )))
            }
        };
        let u = self.velocity_from_vorticity(omega)?;
        Ok(t.sqrt() * u.max_norm())
    }
}

pub fn make_plan(grid: GridSpec) -> BiotSavartPlan {
    BiotSavartPlan::new(grid)
}

pub fn velocity_from_vorticity(plan: &BiotSavartPlan, omega: &ScalarField) -> Result<VectorField> {
    plan.velocity_from_vorticity(omega)
}

/// Convenience form that builds a throwaway plan.
pub fn sup_velocity_scaling(omega: &ScalarField) -> Result<f64> {
    BiotSavartPlan::new(*omega.grid()).sup_velocity_scaling(omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oseen::{oseen_field, oseen_velocity, Circulation};

    fn grid(l: f64, n: usize) -> GridSpec {
        GridSpec::new(l, n).unwrap()
    }

    #[test]
    fn kernel_samples() {
        let g = grid(4.0, 32);
        let plan = make_plan(g);
        let h = g.spacing();
        assert_eq!(plan.kernel_at(0, 0), [0.0, 0.0]);
        let k = plan.kernel_at(1, 0);
        assert_eq!(k[0], 0.0);
        assert!((k[1] - 1.0 / (2.0 * PI * h)).abs() < 1e-15);
        for (a, b) in [(3, -7), (15, 15), (-2, 9), (0, -31)] {
            let p = plan.kernel_at(a, b);
            let q = plan.kernel_at(-a, -b);
            assert_eq!(p[0], -q[0]);
            assert_eq!(p[1], -q[1]);
        }
    }

    #[test]
    fn plans_are_deterministic() {
        let g = grid(4.0, 32);
        let a = make_plan(g);
        let b = make_plan(g);
        assert_eq!(a.kernel1, b.kernel1);
        assert_eq!(a.kernel2, b.kernel2);
        assert_eq!(a.kernel_hat, b.kernel_hat);
    }

    #[test]
    fn convolution_matches_direct_sum() {
        let g = grid(2.0, 16);
        let plan = make_plan(g);
        let w = ScalarField::from_fn(g, |x| (x[0] * 1.3).sin() * (-x[1] * x[1]).exp() + 0.2 * x[1]);
        let u = plan.velocity_from_vorticity(&w).unwrap();
        let n = g.n() as i64;
        for &(i, j) in &[(0usize, 0usize), (5, 11), (15, 3), (8, 8)] {
            let mut s = [0.0, 0.0];
            for k in 0..n {
                for l in 0..n {
                    let kv = kernel_sample(i as i64 - k, j as i64 - l, g.spacing());
                    let wv = w.at(k as usize, l as usize);
                    s[0] += kv[0] * wv;
                    s[1] += kv[1] * wv;
                }
            }
            let got = u.at(i, j);
            assert!((got[0] - g.cell_area() * s[0]).abs() < 1e-13);
            assert!((got[1] - g.cell_area() * s[1]).abs() < 1e-13);
        }
    }

    #[test]
    fn zero_vorticity_gives_zero_velocity() {
        let g = grid(4.0, 32);
        let u = make_plan(g).velocity_from_vorticity(&ScalarField::zeros(g)).unwrap();
        assert_eq!(u.max_norm(), 0.0);
    }

    #[test]
    fn grid_mismatch_rejected() {
        let plan = make_plan(grid(4.0, 32));
        assert!(plan
            .velocity_from_vorticity(&ScalarField::zeros(grid(4.0, 64)))
            .is_err());
        assert!(plan
            .velocity_from_vorticity(&ScalarField::zeros(grid(5.0, 32)))
            .is_err());
    }

    #[test]
    fn point_reflection_flips_velocity() {
        let g = grid(4.0, 32);
        let n = g.n();
        let plan = make_plan(g);
        let w = ScalarField::from_fn(g, |x| (-(x[0] - 1.0).powi(2) - 2.0 * (x[1] + 0.4).powi(2)).exp());
        let wr = ScalarField::from_fn(g, |x| (-(-x[0] - 1.0).powi(2) - 2.0 * (-x[1] + 0.4).powi(2)).exp());
        let u = plan.velocity_from_vorticity(&w).unwrap();
        let ur = plan.velocity_from_vorticity(&wr).unwrap();
        let scale = u.max_norm();
        for i in 0..n {
            for j in 0..n {
                let a = u.at(i, j);
                let b = ur.at(n - 1 - i, n - 1 - j);
                assert!((a[0] + b[0]).abs() < 1e-13 * scale);
                assert!((a[1] + b[1]).abs() < 1e-13 * scale);
            }
        }
    }

    #[test]
    fn linearity() {
        let g = grid(4.0, 32);
        let plan = make_plan(g);
        let w1 = ScalarField::from_fn(g, |x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let w2 = ScalarField::from_fn(g, |x| x[0] * (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
        let (a, b) = (1.7, -0.3);
        let lhs = plan.velocity_from_vorticity(&w1.axpby(a, &w2, b).unwrap()).unwrap();
        let u1 = plan.velocity_from_vorticity(&w1).unwrap();
        let u2 = plan.velocity_from_vorticity(&w2).unwrap();
        let scale = lhs.max_norm();
        for k in 0..g.len() {
            assert!((lhs.u1()[k] - (a * u1.u1()[k] + b * u2.u1()[k])).abs() < 1e-12 * scale);
            assert!((lhs.u2()[k] - (a * u1.u2()[k] + b * u2.u2()[k])).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn oseen_velocity_is_recovered() {
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| {
                let g = grid(12.0, n);
                let plan = make_plan(g);
                let w = oseen_field(g, 1.0, Circulation(1.0)).unwrap();
                let u = plan.velocity_from_vorticity(&w).unwrap();
                let mut err: f64 = 0.0;
                let mut sup: f64 = 0.0;
                for (i, j, x) in g.cells() {
                    if x[0].hypot(x[1]) < 6.0 {
                        let e = oseen_velocity(x, 1.0, Circulation(1.0)).unwrap();
                        let a = u.at(i, j);
                        err = err.max((a[0] - e[0]).hypot(a[1] - e[1]));
                        sup = sup.max(e[0].hypot(e[1]));
                    }
                }
                err / sup
            })
            .collect();
        assert!(errs[1] < 1e-2, "{errs:?}");
        assert!(errs[1] < errs[0], "{errs:?}");
    }

    #[test]
    fn sup_velocity_scaling_values() {
        // the grid maximum misses the peak radius by O(h²); n = 128 leaves 1.4e-3 at t = 0.5
        let g = grid(12.0, 256);
        let plan = make_plan(g);
        let values: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|&t| {
                plan.sup_velocity_scaling(&oseen_field(g, t, Circulation(1.0)).unwrap())
                    .unwrap()
            })
            .collect();
        // 1-D maximization oracle: max_r (1 − e^{−r²/4}) / (2πr)
        let oracle = (1..200_000)
            .map(|k| {
                let r = k as f64 * 1e-4;
                -(-r * r / 4.0f64).exp_m1() / (2.0 * PI * r)
            })
            .fold(0.0, f64::max);
        assert!((oracle - 0.0507842).abs() < 1e-6, "oracle {oracle}");
        for v in &values {
            assert!((v - oracle).abs() < 1e-3 * oracle, "{values:?}");
            assert!((v - values[1]).abs() < 1e-3 * values[1], "{values:?}");
        }
        assert_eq!(
            plan.sup_velocity_scaling(&ScalarField::zeros(g).with_time_tag(Some(1.0)))
                .unwrap(),
            0.0
        );
        assert!(plan.sup_velocity_scaling(&ScalarField::zeros(g)).is_err());
        assert!(plan
            .sup_velocity_scaling(&ScalarField::zeros(g).with_time_tag(Some(0.0)))
            .is_err());
    }
}
