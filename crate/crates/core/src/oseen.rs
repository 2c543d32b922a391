//! The Lamb-Oseen vortex family.
//!
//! In self-similar variables the vortex is the stationary profile
//! `G(ξ) = e^{−|ξ|²/4} / 4π` with velocity
//! `v^G(ξ) = ξ^⊥ (1 − e^{−|ξ|²/4}) / (2π|ξ|²)`; in physical variables
//! `Ω(x,t) = (α/t) G(x/√t)` and `u(x,t) = (α/√t) v^G(x/√t)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, Point, ScalarField, VectorField};

/// Total circulation `α = ∫ ω dx`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Circulation(pub f64);

impl Circulation {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Below this value of `|ξ|²` the velocity profile switches to its Taylor series.
const TAYLOR_R2: f64 = 1e-4;

/// `G(ξ) = e^{−|ξ|²/4} / 4π`.
#[inline]
pub fn gauss_g(xi: Point) -> f64 {
    (-(xi[0] * xi[0] + xi[1] * xi[1]) / 4.0).exp() / (4.0 * PI)
}

/// `(1 − e^{−r²/4}) / r²`, continuous at 0 with value 1/4.
#[inline]
fn swirl_profile(r2: f64) -> f64 {
    if r2 < TAYLOR_R2 {
        let q = r2 / 4.0;
        0.25 * (1.0 - q / 2.0 + q * q / 6.0 - q * q * q / 24.0)
    } else {
        -(-r2 / 4.0).exp_m1() / r2
    }
}

/// Velocity field `v^G` of the stationary profile.
#[inline]
pub fn velocity_vg(xi: Point) -> Point {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1];
    let s = swirl_profile(r2) / (2.0 * PI);
    [-xi[1] * s, xi[0] * s]
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::arg(format!("Oseen vortex needs t > 0, got {t}")))
    }
}

/// `Ω(x,t) = α/(4πt) e^{−|x|²/4t}`.
pub fn oseen_vorticity(x: Point, t: f64, alpha: Circulation) -> Result<f64> {
    check_time(t)?;
    let s = t.sqrt();
    Ok(alpha.0 / t * gauss_g([x[0] / s, x[1] / s]))
}

/// `u(x,t) = (α/√t) v^G(x/√t)`.
pub fn oseen_velocity(x: Point, t: f64, alpha: Circulation) -> Result<Point> {
    check_time(t)?;
    let s = t.sqrt();
    let v = velocity_vg([x[0] / s, x[1] / s]);
    Ok([alpha.0 / s * v[0], alpha.0 / s * v[1]])
}

/// `Ω(·,t)` sampled on `grid`, tagged with `t`.
pub fn oseen_field(grid: GridSpec, t: f64, alpha: Circulation) -> Result<ScalarField> {
    check_time(t)?;
    let s = t.sqrt();
    Ok(ScalarField::from_fn(grid, |x| alpha.0 / t * gauss_g([x[0] / s, x[1] / s])).with_time_tag(Some(t)))
}

/// `u(·,t)` of the Oseen vortex sampled on `grid`.
pub fn oseen_velocity_field(grid: GridSpec, t: f64, alpha: Circulation) -> Result<VectorField> {
    check_time(t)?;
    let s = t.sqrt();
    let a = alpha.0 / s;
    Ok(VectorField::from_fn(grid, |x| {
        let v = velocity_vg([x[0] / s, x[1] / s]);
        [a * v[0], a * v[1]]
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::integrate;

    #[test]
    fn gauss_values() {
        assert_eq!(gauss_g([0.0, 0.0]), 1.0 / (4.0 * PI));
        assert!((gauss_g([0.0, 0.0]) - 0.07957747).abs() < 1e-8);
        let e = (-1.0f64).exp() / (4.0 * PI);
        assert!((gauss_g([2.0, 0.0]) - e).abs() < 1e-16);
        assert!((e - 0.02927492).abs() < 1e-8);
    }

    #[test]
    fn gauss_is_normalized() {
        let g = GridSpec::new(12.0, 128).unwrap();
        let f = ScalarField::from_fn(g, gauss_g);
        assert!((integrate(&f) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn velocity_values() {
        assert_eq!(velocity_vg([0.0, 0.0]), [0.0, 0.0]);
        let v = velocity_vg([2.0, 0.0]);
        assert_eq!(v[0], 0.0);
        let expected = (1.0 - (-1.0f64).exp()) / (4.0 * PI);
        assert!((v[1] - expected).abs() < 1e-16);
        assert!((v[1] - 0.0503025558).abs() < 1e-10);
    }

    #[test]
    fn taylor_branch_matches_direct_formula() {
        // at the switch point both branches agree to rounding of the direct form
        for &r2 in &[0.99e-4, 1e-4, 1.01e-4, 1e-6] {
            let direct = -(-r2 / 4.0f64).exp_m1() / r2;
            assert!((swirl_profile(r2) - direct).abs() < 1e-15, "r2 {r2}");
        }
        assert_eq!(swirl_profile(0.0), 0.25);
    }

    #[test]
    fn velocity_is_perpendicular() {
        let pts = [[0.3, -1.2], [5.0, 2.0], [-0.001, 0.002], [7.5, -7.5]];
        for x in pts {
            let v = velocity_vg(x);
            assert!((x[0] * v[0] + x[1] * v[1]).abs() < 1e-17);
        }
    }

    #[test]
    fn vorticity_values_and_errors() {
        let one = Circulation(1.0);
        assert_eq!(oseen_vorticity([0.0, 0.0], 1.0, one).unwrap(), 1.0 / (4.0 * PI));
        assert_eq!(oseen_vorticity([1.0, 3.0], 2.0, Circulation(0.0)).unwrap(), 0.0);
        assert!(oseen_vorticity([0.0, 0.0], 0.0, one).is_err());
        assert!(oseen_vorticity([0.0, 0.0], -1.0, one).is_err());
        assert!(oseen_velocity([0.0, 0.0], 0.0, one).is_err());
        let g = GridSpec::new(12.0, 128).unwrap();
        let f = oseen_field(g, 1.0, Circulation(2.0)).unwrap();
        assert!((integrate(&f) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn velocity_physical_values() {
        let one = Circulation(1.0);
        assert_eq!(oseen_velocity([0.0, 0.0], 3.0, one).unwrap(), [0.0, 0.0]);
        let u = oseen_velocity([4.0, 0.0], 4.0, one).unwrap();
        assert!(u[0].abs() < 1e-18);
        assert!((u[1] - 0.5 * velocity_vg([2.0, 0.0])[1]).abs() < 1e-17);
        assert!((u[1] - 0.0251512779).abs() < 1e-10);
    }

    #[test]
    fn sup_velocity_is_self_similar() {
        // radial sweep of |u|·√t at matching self-similar radii
        let one = Circulation(1.0);
        let sup = |t: f64| {
            (0..4000)
                .map(|k| {
                    let r = k as f64 * 0.002 * t.sqrt();
                    let u = oseen_velocity([r, 0.0], t, one).unwrap();
                    u[1].abs() * t.sqrt()
                })
                .fold(0.0, f64::max)
        };
        let s1 = sup(1.0);
        for t in [0.25, 4.0, 9.0] {
            assert!((sup(t) - s1).abs() < 1e-14);
        }
    }

    #[test]
    fn curl_of_oseen_velocity_is_vorticity() {
        let errs: Vec<f64> = [64usize, 128]
            .iter()
            .map(|&n| {
                let g = GridSpec::new(8.0, n).unwrap();
                let u = oseen_velocity_field(g, 1.0, Circulation(1.0)).unwrap();
                let w = oseen_field(g, 1.0, Circulation(1.0)).unwrap();
                let c = u.curl();
                let mut m: f64 = 0.0;
                for i in 1..n - 1 {
                    for j in 1..n - 1 {
                        m = m.max((c.at(i, j) - w.at(i, j)).abs());
                    }
                }
                m
            })
            .collect();
        assert!(errs[0] < 1e-3, "{errs:?}");
        // second order
        assert!(errs[0] / errs[1] > 3.5, "{errs:?}");
    }
}
