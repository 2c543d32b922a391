//! Entropy functionals relative to `G`, the inequalities tying them together,
//! Gaussian envelope fits and the exponential decay verdict for `h(τ)`.
//!
//! All entropy quantities take a density on the `ξ` lattice normalized to unit
//! mass: `H(f) = ∫ f log(f/G)`, `I(f) = ∫ f |∇ log(f/G)|²`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{integrate, lp_norm, second_moment, ScalarField};
use crate::oseen::{gauss_g, Circulation};
use crate::solver::Trajectory;

/// Cells at or below this fraction of `max f` are left out of `H`.
pub const ENTROPY_FLOOR: f64 = 1e-16;
/// Cells above this fraction of `max f` form the region where `I` is summed.
pub const FISHER_FLOOR: f64 = 1e-10;
/// Most negative value tolerated in a density.
pub const NEGATIVE_TOL: f64 = -1e-13;
/// The excluded tail's interval must be narrower than this for a trusted `H`.
pub const TRUST_WIDTH: f64 = 1e-8;
/// Below this fraction of `max ω` cell values are solver noise (FFT roundoff,
/// interpolation ringing sit around 1e-11), not envelope data.
pub const ENVELOPE_NOISE: f64 = 1e-9;

pub const TOL_DECAY: f64 = 0.05;
pub const TOL_RATE: f64 = 0.1;
/// Entropy values at or below this are treated as zero by the decay verdict.
pub const DECAY_NOISE: f64 = 1e-10;

#[inline]
fn log_g(xi: [f64; 2]) -> f64 {
    -(xi[0] * xi[0] + xi[1] * xi[1]) / 4.0 - (4.0 * PI).ln()
}

fn check_density(f: &ScalarField) -> Result<()> {
    let mass = integrate(f);
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::pre(format!("density must have unit mass, got {mass}")));
    }
    if let Some(k) = f.values().iter().position(|&v| v < NEGATIVE_TOL) {
        return Err(Error::pre(format!(
            "negative density {} at cell {k} (positivity breach)",
            f.values()[k]
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyEstimate {
    /// Midpoint of `[lower, upper]`.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub trusted: bool,
}

/// `H(f)` with the contribution of floored cells carried as an interval.
pub fn relative_entropy_estimate(f: &ScalarField) -> Result<EntropyEstimate> {
    check_density(f)?;
    let floor = ENTROPY_FLOOR * f.max_abs();
    let (mut core, mut lo, mut hi) = (0.0, 0.0, 0.0);
    for ((_, _, x), &v) in f.grid().cells().zip(f.values()) {
        let lg = log_g(x);
        if v > floor {
            core += v * (v.ln() - lg);
        } else if floor > 0.0 {
            // v ∈ [0, floor]: s ↦ s log(s/G) is convex, minimum −G/e at s = G/e
            let at_floor = floor * (floor.ln() - lg);
            let g = lg.exp();
            lo += if floor >= g / std::f64::consts::E {
                -g / std::f64::consts::E
            } else {
                at_floor
            };
            hi += at_floor.max(0.0);
        }
    }
    let h2 = f.grid().cell_area();
    let (lower, upper) = ((core + lo) * h2, (core + hi) * h2);
    Ok(EntropyEstimate {
        value: 0.5 * (lower + upper),
        lower,
        upper,
        trusted: upper - lower < TRUST_WIDTH,
    })
}

pub fn relative_entropy(f: &ScalarField) -> Result<f64> {
    relative_entropy_estimate(f).map(|e| e.value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherEstimate {
    pub value: f64,
    /// Fraction of the mass sitting in the cells that were summed.
    pub coverage: f64,
}

/// `I(f)` by centered differences of `log(f/G)` over the reliable region.
pub fn fisher_estimate(f: &ScalarField) -> Result<FisherEstimate> {
    check_density(f)?;
    let g = f.grid();
    let n = g.n();
    let h = g.spacing();
    let max = f.max_abs();
    let floor = ENTROPY_FLOOR * max;
    let reliable = FISHER_FLOOR * max;
    let lr: Vec<f64> = g
        .cells()
        .zip(f.values())
        .map(|((_, _, x), &v)| v.max(floor).max(f64::MIN_POSITIVE).ln() - log_g(x))
        .collect();
    let (mut sum, mut covered, mut total) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let v = f.at(i, j);
            if v > 0.0 {
                total += v;
            }
            if v <= reliable || i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                continue;
            }
            let d1 = (lr[g.index(i + 1, j)] - lr[g.index(i - 1, j)]) / (2.0 * h);
            let d2 = (lr[g.index(i, j + 1)] - lr[g.index(i, j - 1)]) / (2.0 * h);
            sum += v * (d1 * d1 + d2 * d2);
            covered += v;
        }
    }
    Ok(FisherEstimate {
        value: sum * g.cell_area(),
        coverage: if total > 0.0 { covered / total } else { 0.0 },
    })
}

pub fn fisher_information(f: &ScalarField) -> Result<f64> {
    fisher_estimate(f).map(|e| e.value)
}

fn l1_to_g(f: &ScalarField) -> f64 {
    f.grid()
        .cells()
        .zip(f.values())
        .map(|((_, _, x), v)| (v - gauss_g(x)).abs())
        .sum::<f64>()
        * f.grid().cell_area()
}

/// `H(f) − ½∥f − G∥²_{L¹}`, nonnegative by Csiszár–Kullback.
pub fn csiszar_kullback_check(f: &ScalarField) -> Result<f64> {
    let h = relative_entropy(f)?;
    let d = l1_to_g(f);
    Ok(h - 0.5 * d * d)
}

/// `I(f) − H(f)`, nonnegative by the logarithmic Sobolev inequality.
pub fn log_sobolev_slack(f: &ScalarField) -> Result<f64> {
    Ok(fisher_information(f)? - relative_entropy(f)?)
}

/// Smallest `K₁` with `ω ≤ (K₁α/t) e^{−β|x|²/4t}` on the grid.
///
/// Cells below [`ENVELOPE_NOISE`]`·max ω` are skipped: there `ω` is noise and
/// the weight `e^{β|x|²/4t}` would only amplify it.
pub fn envelope_fit(f: &ScalarField, beta: f64) -> Result<f64> {
    let t = f
        .time_tag()
        .ok_or_else(|| Error::pre("envelope fit needs the field tagged with t"))?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::pre(format!("envelope fit needs t > 0, got {t}")));
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::arg(format!("β must lie in (0, 1], got {beta}")));
    }
    let alpha = integrate(f);
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(Error::pre(format!("envelope fit needs positive mass, got {alpha}")));
    }
    let noise = ENVELOPE_NOISE * f.max_abs();
    let mut k1: f64 = 0.0;
    for ((_, _, x), &v) in f.grid().cells().zip(f.values()) {
        if v > noise {
            let r2 = x[0] * x[0] + x[1] * x[1];
            k1 = k1.max(v * t * (beta * r2 / (4.0 * t)).exp() / alpha);
        }
    }
    Ok(k1)
}

/// `w/α` on the `ξ` lattice for a physical field tagged with `t`.
pub fn normalized_profile(physical: &ScalarField, alpha: Circulation) -> Result<ScalarField> {
    let t = match physical.time_tag() {
        Some(t) if t > 0.0 => t,
        other => return Err(Error::pre(format!("need a time tag t > 0, got {other:?}"))),
    };
    if alpha.0.is_nan() || alpha.0 <= 0.0 {
        return Err(Error::pre("entropy diagnostics need alpha > 0"));
    }
    let grid = physical.grid().scaled(1.0 / t.sqrt())?;
    let c = t / alpha.0;
    ScalarField::new(grid, physical.values().iter().map(|v| v * c).collect(), Some(t.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsOptions {
    pub entropy: bool,
    pub envelope_beta: f64,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        Self {
            entropy: true,
            envelope_beta: 0.9,
        }
    }
}

/// One row of a trajectory's diagnostics. Moments and norms refer to `ω` in
/// physical variables; `H`, `I` and the slacks to `w/α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub tau: f64,
    pub mass: f64,
    pub second_moment: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub entropy_h: f64,
    pub fisher_i: f64,
    pub fisher_coverage: f64,
    pub envelope_k1: f64,
    pub domination_margin: Option<f64>,
    pub ck_slack: f64,
    pub lsi_slack: f64,
    pub trusted: bool,
}

impl DiagnosticsRecord {
    pub const CSV_HEADER: &'static str = "tau,t,mass,m2,l1,l2,linf,H,I,K1_beta0.9,dom_margin,ck_slack,lsi_slack";

    pub fn csv_row(&self) -> String {
        let dom = self.domination_margin.map(|m| m.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.tau,
            self.t,
            self.mass,
            self.second_moment,
            self.l1,
            self.l2,
            self.linf,
            self.entropy_h,
            self.fisher_i,
            self.envelope_k1,
            dom,
            self.ck_slack,
            self.lsi_slack
        )
    }
}

/// Diagnostics of a physical field tagged with `t`.
pub fn compute_record(
    physical: &ScalarField,
    alpha: Circulation,
    opts: &DiagnosticsOptions,
) -> Result<DiagnosticsRecord> {
    let t = match physical.time_tag() {
        Some(t) if t > 0.0 => t,
        other => return Err(Error::pre(format!("need a time tag t > 0, got {other:?}"))),
    };
    let mut rec = DiagnosticsRecord {
        t,
        tau: t.ln(),
        mass: integrate(physical),
        second_moment: second_moment(physical),
        l1: lp_norm(physical, 1.0)?,
        l2: lp_norm(physical, 2.0)?,
        linf: physical.max_abs(),
        entropy_h: f64::NAN,
        fisher_i: f64::NAN,
        fisher_coverage: f64::NAN,
        envelope_k1: f64::NAN,
        domination_margin: None,
        ck_slack: f64::NAN,
        lsi_slack: f64::NAN,
        trusted: false,
    };
    if rec.mass > 0.0 {
        rec.envelope_k1 = envelope_fit(physical, opts.envelope_beta)?;
    }
    if opts.entropy {
        let w = normalized_profile(physical, alpha)?;
        let h = relative_entropy_estimate(&w)?;
        let i = fisher_estimate(&w)?;
        let d = l1_to_g(&w);
        rec.entropy_h = h.value;
        rec.trusted = h.trusted;
        rec.fisher_i = i.value;
        rec.fisher_coverage = i.coverage;
        rec.ck_slack = h.value - 0.5 * d * d;
        rec.lsi_slack = i.value - h.value;
    }
    Ok(rec)
}

/// Outcome of the exponential decay checks on `h(τ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub monotone: bool,
    pub strictly_decreasing: bool,
    pub pairs_checked: usize,
    /// `(i, j, h_j / (e^{−(τ_j−τ_i)} h_i))` for every failing pair.
    pub pair_failures: Vec<(usize, usize, f64)>,
    /// `(k, h′_k / h_k)` wherever `h′ ≤ −(1 − tol_rate) h` fails.
    pub rate_failures: Vec<(usize, f64)>,
    /// Least-squares slope of `log h` against `τ`; NaN when `h` vanishes.
    pub exponent: f64,
    /// Largest `|h′ + I| / I` over snapshots with `h > 1e-4`; NaN if none.
    pub dissipation_rel_err: f64,
    pub sup_h: f64,
}

impl DecayReport {
    pub fn passed(&self) -> bool {
        self.monotone && self.pair_failures.is_empty() && self.rate_failures.is_empty()
    }
}

/// Derivative on a nonuniform grid: centered three-point in the interior,
/// one-sided second order at the ends.
pub fn derivative(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let m = x.len();
    if m < 3 || y.len() != m {
        return Err(Error::pre(format!(
            "need ≥ 3 matching samples, got {} and {}",
            m,
            y.len()
        )));
    }
    // derivative at x[at] of the parabola through points a, b, c
    let three = |at: usize, a: usize, b: usize, c: usize| {
        let (xa, xb, xc, x0) = (x[a], x[b], x[c], x[at]);
        y[a] * ((x0 - xb) + (x0 - xc)) / ((xa - xb) * (xa - xc))
            + y[b] * ((x0 - xa) + (x0 - xc)) / ((xb - xa) * (xb - xc))
            + y[c] * ((x0 - xa) + (x0 - xb)) / ((xc - xa) * (xc - xb))
    };
    Ok((0..m)
        .map(|k| match k {
            0 => three(0, 0, 1, 2),
            k if k == m - 1 => three(k, k - 2, k - 1, k),
            k => three(k, k - 1, k, k + 1),
        })
        .collect())
}

/// Decay verdict from raw series `τ_k`, `h_k` and `I_k`.
pub fn decay_report_from_series(
    tau: &[f64],
    h: &[f64],
    fisher: &[f64],
    tol_decay: f64,
    tol_rate: f64,
) -> Result<DecayReport> {
    if tau.len() < 3 {
        return Err(Error::pre(format!(
            "decay report needs ≥ 3 snapshots, got {}",
            tau.len()
        )));
    }
    if h.len() != tau.len() || fisher.len() != tau.len() {
        return Err(Error::arg("τ, h and I series differ in length"));
    }
    let m = tau.len();
    let monotone = h.windows(2).all(|w| w[1] <= w[0] + DECAY_NOISE);
    let strictly_decreasing = h.windows(2).all(|w| w[1] < w[0]);
    let mut pair_failures = Vec::new();
    let mut pairs_checked = 0;
    for i in 0..m {
        for j in i + 1..m {
            pairs_checked += 1;
            let bound = (-(tau[j] - tau[i])).exp() * h[i];
            if h[j] > bound * (1.0 + tol_decay) + DECAY_NOISE {
                pair_failures.push((i, j, h[j] / bound));
            }
        }
    }
    let dh = derivative(tau, h)?;
    let rate_failures = (0..m)
        .filter(|&k| h[k] > DECAY_NOISE && dh[k] > -h[k] + tol_rate * h[k])
        .map(|k| (k, dh[k] / h[k]))
        .collect();
    let pts: Vec<(f64, f64)> = tau
        .iter()
        .zip(h)
        .filter(|(_, &v)| v > DECAY_NOISE)
        .map(|(&t, &v)| (t, v.ln()))
        .collect();
    let exponent = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };
    let dissipation_rel_err = (0..m)
        .filter(|&k| h[k] > 1e-4 && fisher[k] > 0.0)
        .map(|k| (dh[k] + fisher[k]).abs() / fisher[k])
        .fold(f64::NAN, f64::max);
    Ok(DecayReport {
        monotone,
        strictly_decreasing,
        pairs_checked,
        pair_failures,
        rate_failures,
        exponent,
        dissipation_rel_err,
        sup_h: h.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Decay verdict for the entropy recorded along a trajectory.
pub fn entropy_decay_report(traj: &Trajectory) -> Result<DecayReport> {
    let tau: Vec<f64> = traj.records.iter().map(|r| r.tau).collect();
    let h: Vec<f64> = traj.records.iter().map(|r| r.entropy_h).collect();
    let i: Vec<f64> = traj.records.iter().map(|r| r.fisher_i).collect();
    if h.iter().any(|v| v.is_nan()) {
        return Err(Error::pre("trajectory was recorded without entropy diagnostics"));
    }
    decay_report_from_series(&tau, &h, &i, TOL_DECAY, TOL_RATE)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::GridSpec;
    use crate::oseen::oseen_field;

    fn grid() -> GridSpec {
        GridSpec::new(12.0, 128).unwrap()
    }

    fn shifted(m: [f64; 2]) -> ScalarField {
        ScalarField::from_fn(grid(), |x| gauss_g([x[0] - m[0], x[1] - m[1]]))
    }

    /// Composite Simpson on [a, b] with an even number of panels.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for k in 1..panels {
            s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn entropy_of_g_vanishes() {
        let f = ScalarField::from_fn(grid(), gauss_g);
        let e = relative_entropy_estimate(&f).unwrap();
        assert!(e.value.abs() < 1e-10, "{e:?}");
        assert!(e.trusted);
        assert!(fisher_information(&f).unwrap().abs() < 1e-8);
        assert!(csiszar_kullback_check(&f).unwrap().abs() < 1e-10);
    }

    #[test]
    fn shifted_gaussian_entropy_and_fisher() {
        for m in [0.5, 1.0, 2.0] {
            let f = shifted([m, 0.0]);
            let exact = m * m / 4.0;
            let h = relative_entropy(&f).unwrap();
            let i = fisher_information(&f).unwrap();
            assert!((h - exact).abs() < 1e-6, "m {m}: H {h}");
            assert!((i - exact).abs() < 1e-4, "m {m}: I {i}");
        }
    }

    #[test]
    fn dilated_gaussian_against_radial_quadrature() {
        let s2: f64 = 1.5;
        let fr = |r: f64| (-r * r / (4.0 * s2)).exp() / (4.0 * PI * s2);
        let gr = |r: f64| (-r * r / 4.0).exp() / (4.0 * PI);
        let h_oracle = simpson(|r| 2.0 * PI * r * fr(r) * (fr(r) / gr(r)).ln(), 0.0, 40.0, 20000);
        let i_oracle = simpson(
            |r| {
                let d = r * (0.5 - 0.5 / s2);
                2.0 * PI * r * fr(r) * d * d
            },
            0.0,
            40.0,
            20000,
        );
        // sanity of the oracle against the closed forms
        assert!((h_oracle - (s2 - 1.0 - s2.ln())).abs() < 1e-10);
        assert!((i_oracle - (s2 - 1.0).powi(2) / s2).abs() < 1e-10);
        let g = GridSpec::new(14.0, 192).unwrap();
        let f = ScalarField::from_fn(g, |x| fr((x[0] * x[0] + x[1] * x[1]).sqrt()));
        let h = relative_entropy(&f).unwrap();
        assert!(h > 0.0);
        assert!((h - h_oracle).abs() < 1e-6, "{h} vs {h_oracle}");
        let i = fisher_information(&f).unwrap();
        assert!((i - i_oracle).abs() < 1e-3, "{i} vs {i_oracle}");
    }

    #[test]
    fn csiszar_kullback_for_shifted_gaussian() {
        // 1-D oracle: the L¹ distance only sees the shifted axis
        let m = 1.0;
        let phi = |x: f64| (-x * x / 4.0).exp() / (4.0 * PI).sqrt();
        let dist = simpson(|x| (phi(x) - phi(x - m)).abs(), -30.0, 30.0, 60000);
        let slack = csiszar_kullback_check(&shifted([m, 0.0])).unwrap();
        let oracle = 0.25 - 0.5 * dist * dist;
        assert!(oracle > 0.0);
        // the kink of |f − G| limits the midpoint rule to O(h²)
        assert!((slack - oracle).abs() < 5e-4, "{slack} vs {oracle}");
    }

    #[test]
    fn csiszar_kullback_on_mixtures() {
        let g = ScalarField::from_fn(grid(), gauss_g);
        let s = shifted([1.0, 0.0]);
        for eps in [0.1, 0.5] {
            let f = g.axpby(1.0 - eps, &s, eps).unwrap();
            assert!(csiszar_kullback_check(&f).unwrap() >= -1e-10);
            assert!(log_sobolev_slack(&f).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn log_sobolev_on_perturbed_density() {
        let raw = ScalarField::from_fn(grid(), |x| {
            gauss_g(x) * (1.0 + 0.4 * (1.3 * x[0]).sin() * (0.7 * x[1]).cos())
        });
        let f = raw.scale(1.0 / integrate(&raw));
        let h = relative_entropy(&f).unwrap();
        let i = fisher_information(&f).unwrap();
        assert!(h > 0.0 && i >= h, "H {h} I {i}");
    }

    #[test]
    fn rejects_bad_densities() {
        let f = ScalarField::from_fn(grid(), gauss_g);
        assert!(matches!(relative_entropy(&f.scale(2.0)), Err(Error::Precondition(_))));
        let mut v = f.values().to_vec();
        v[0] = -1e-12;
        let neg = ScalarField::new(grid(), v, None).unwrap();
        assert!(relative_entropy(&neg).is_err());
        assert!(fisher_information(&neg).is_err());
        let mut v = f.values().to_vec();
        v[0] = -1e-14;
        assert!(relative_entropy(&ScalarField::new(grid(), v, None).unwrap()).is_ok());
    }

    #[test]
    fn envelope_of_oseen() {
        let f = oseen_field(grid(), 1.0, Circulation(2.0)).unwrap();
        // the origin is a cell corner: the nearest cells sit at |x|² = h²/2
        let r2 = 0.5 * grid().spacing().powi(2);
        for beta in [1.0, 0.5, 0.9] {
            let k = envelope_fit(&f, beta).unwrap();
            let oracle = (-(1.0 - beta) * r2 / 4.0).exp() / (4.0 * PI);
            assert!((k - oracle).abs() < 1e-10, "β {beta}: {k}");
        }
        assert!(envelope_fit(&f.clone().with_time_tag(None), 0.9).is_err());
        assert!(envelope_fit(&f, 0.0).is_err());
    }

    #[test]
    fn envelope_grows_with_beta() {
        let f = shifted([1.0, 0.0]).with_time_tag(Some(1.0));
        let ks: Vec<f64> = [0.3, 0.6, 0.9, 1.0]
            .iter()
            .map(|&b| envelope_fit(&f, b).unwrap())
            .collect();
        assert!(ks.windows(2).all(|w| w[0] <= w[1]), "{ks:?}");
    }

    #[test]
    fn record_of_oseen() {
        let f = oseen_field(grid(), 1.0, Circulation(1.0)).unwrap();
        let r = compute_record(&f, Circulation(1.0), &DiagnosticsOptions::default()).unwrap();
        assert!((r.mass - 1.0).abs() < 1e-8);
        assert!((r.second_moment - 4.0).abs() < 1e-6);
        assert!(r.entropy_h.abs() < 1e-10 && r.fisher_i.abs() < 1e-8);
        assert!(r.trusted);
        assert_eq!(r.tau, 0.0);
        assert_eq!(
            r.csv_row().split(',').count(),
            DiagnosticsRecord::CSV_HEADER.split(',').count()
        );
    }

    #[test]
    fn derivative_is_exact_on_quadratics() {
        let x = [0.0, 0.1, 0.25, 0.5, 0.6];
        let y: Vec<f64> = x.iter().map(|t| 3.0 * t * t - t + 2.0).collect();
        let d = derivative(&x, &y).unwrap();
        for (t, dv) in x.iter().zip(d) {
            assert!((dv - (6.0 * t - 1.0)).abs() < 1e-12);
        }
        assert!(derivative(&x[..2], &y[..2]).is_err());
    }

    #[test]
    fn decay_verdicts() {
        let tau: Vec<f64> = (0..51).map(|k| k as f64 * 0.1).collect();
        let zero = vec![0.0; tau.len()];
        let r = decay_report_from_series(&tau, &zero, &zero, TOL_DECAY, TOL_RATE).unwrap();
        assert!(r.passed() && r.exponent.is_nan());

        let h: Vec<f64> = tau.iter().map(|t| 0.1 * (-1.2 * t).exp()).collect();
        let i: Vec<f64> = h.iter().map(|v| 1.2 * v).collect();
        let r = decay_report_from_series(&tau, &h, &i, TOL_DECAY, TOL_RATE).unwrap();
        assert!(r.passed() && r.strictly_decreasing);
        assert!((r.exponent + 1.2).abs() < 1e-12);
        assert!(r.dissipation_rel_err < 0.05);
        assert_eq!(r.pairs_checked, 51 * 50 / 2);

        let slow: Vec<f64> = tau.iter().map(|t| 0.1 * (-0.5 * t).exp()).collect();
        let r = decay_report_from_series(&tau, &slow, &i, TOL_DECAY, TOL_RATE).unwrap();
        assert!(!r.passed() && !r.pair_failures.is_empty() && !r.rate_failures.is_empty());

        assert!(decay_report_from_series(&tau[..2], &h[..2], &i[..2], TOL_DECAY, TOL_RATE).is_err());
    }
}
