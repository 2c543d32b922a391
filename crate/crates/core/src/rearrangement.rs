//! Symmetric decreasing rearrangement on the grid and the domination preorder.
//!
//! On a grid every cell has measure `h²`, so the decreasing rearrangement
//! `f*` of `|f|` is the descending sort of the cell values, and `f^#` hands
//! the `k`-th largest value to the `k`-th cell closest to the origin. Cells at
//! equal radius are ordered lexicographically by `(i, j)`. This makes every
//! equimeasurability identity hold exactly in floating point.
//!
//! `f ⪯ g` (f dominated by g) iff `∫_{B_R} f^# ≤ ∫_{B_R} g^#` for all `R`;
//! on the grid the discs `B_R` are the prefixes of the radial cell ordering,
//! so the test compares prefix sums of the two sorted profiles.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::{integrate, GridSpec, ScalarField};

/// The nonincreasing rearrangement `f*` as a step function on `[0, n²h²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RearrangementProfile {
    levels: Vec<f64>,
    cell_measure: f64,
    cumulative: Vec<f64>,
}

impl RearrangementProfile {
    fn from_levels(levels: Vec<f64>, cell_measure: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = levels
            .iter()
            .map(|v| {
                acc += v * cell_measure;
                acc
            })
            .collect();
        Self {
            levels,
            cell_measure,
            cumulative,
        }
    }

    /// Sorted `|f|` values, largest first.
    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn cell_measure(&self) -> f64 {
        self.cell_measure
    }

    /// `∫₀^{(k+1)h²} f*(σ) dσ` for `k = 0..n²`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// `f*(s)`; zero beyond the grid's total measure.
    pub fn value_at(&self, s: f64) -> f64 {
        if s < 0.0 {
            return self.levels.first().copied().unwrap_or(0.0);
        }
        let k = (s / self.cell_measure).floor() as usize;
        self.levels.get(k).copied().unwrap_or(0.0)
    }

    /// `∫₀^s f*(σ) dσ`, piecewise linear and concave in `s`.
    pub fn cumulative_at(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let k = (s / self.cell_measure).floor() as usize;
        if k >= self.levels.len() {
            return self.total_mass();
        }
        let before = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        before + self.levels[k] * (s - k as f64 * self.cell_measure)
    }
}

/// Outcome of a domination test `f ⪯ g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DominationReport {
    pub dominated: bool,
    /// Most negative `∫_{B_R} g^# − ∫_{B_R} f^#` over all discrete discs.
    pub worst_margin: f64,
    /// Radius of the disc (`πR² = k h²`) where the worst margin occurs.
    pub radius_at_worst: f64,
    pub tol_mass: f64,
}

/// `μ_f(t) = meas{|f| > t}`.
pub fn distribution_function(f: &ScalarField, t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::arg(format!("distribution function needs t ≥ 0, got {t}")));
    }
    let count = f.values().iter().filter(|v| v.abs() > t).count();
    Ok(count as f64 * f.grid().cell_area())
}

pub fn decreasing_rearrangement(f: &ScalarField) -> RearrangementProfile {
    let mut levels: Vec<f64> = f.values().iter().map(|v| v.abs()).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    RearrangementProfile::from_levels(levels, f.grid().cell_area())
}

/// Cell indices sorted by distance from the origin, ties by storage index.
pub fn radial_order(grid: &GridSpec) -> Vec<usize> {
    let n = grid.n();
    let mut order: Vec<usize> = (0..grid.len()).collect();
    // stable: equal radii keep their (i, j) lexicographic order
    order.sort_by_key(|&k| grid.radius_key(k / n, k % n));
    order
}

/// `f^#` on the same grid.
pub fn symmetric_rearrangement(f: &ScalarField) -> ScalarField {
    let profile = decreasing_rearrangement(f);
    let mut values = vec![0.0; f.grid().len()];
    for (cell, level) in radial_order(f.grid()).into_iter().zip(profile.levels) {
        values[cell] = level;
    }
    ScalarField::from_parts(*f.grid(), values, f.time_tag())
}

/// Domination test on two profiles with the same cell measure.
pub fn dominates_profiles(
    f: &RearrangementProfile,
    g: &RearrangementProfile,
    tol_mass: f64,
) -> Result<DominationReport> {
    if f.len() != g.len() || f.cell_measure != g.cell_measure {
        return Err(Error::arg("profiles live on different grids"));
    }
    let mut worst = f64::INFINITY;
    let mut at = 0;
    for (k, (fc, gc)) in f.cumulative.iter().zip(&g.cumulative).enumerate() {
        let m = gc - fc;
        if m < worst {
            worst = m;
            at = k;
        }
    }
    if f.is_empty() {
        worst = 0.0;
    }
    Ok(DominationReport {
        dominated: worst >= -tol_mass,
        worst_margin: worst,
        radius_at_worst: ((at + 1) as f64 * f.cell_measure / PI).sqrt(),
        tol_mass,
    })
}

/// Is `f ⪯ g` up to `tol_mass`?
pub fn dominates(f: &ScalarField, g: &ScalarField, tol_mass: f64) -> Result<DominationReport> {
    f.grid().check_same(g.grid())?;
    dominates_profiles(&decreasing_rearrangement(f), &decreasing_rearrangement(g), tol_mass)
}

/// Convex `Φ : [0,∞) → [0,∞)` with `Φ(0) = 0` used to probe domination.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConvexFunction {
    Square,
    ThreeHalves,
    /// `max(t − c, 0)`
    Hinge(f64),
}

impl ConvexFunction {
    pub fn apply(self, t: f64) -> f64 {
        match self {
            ConvexFunction::Square => t * t,
            ConvexFunction::ThreeHalves => t * t.sqrt(),
            ConvexFunction::Hinge(c) => (t - c).max(0.0),
        }
    }
}

/// `∫ Φ(|f|) dx`.
pub fn convex_test_functional(f: &ScalarField, phi: ConvexFunction) -> f64 {
    f.grid().cell_area() * f.values().iter().map(|v| phi.apply(v.abs())).sum::<f64>()
}

/// The two rigidity defects of a pair `(f, g)` with `g = g^#` and equal mass.
///
/// With `h = g* − f*` and `H(r) = ∫₀^r h`:
/// * `entropy_gap = sup_r H(r)`,
/// * `moment_gap = ∫₀^∞ s (f*(s) − g*(s)) ds`.
///
/// When `f ⪯ g` the function `H` is nonnegative, and integrating by parts
/// gives `moment_gap = ∫₀^∞ H ds`; both vanish exactly when `f* = g*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop1Gap {
    pub entropy_gap: f64,
    pub moment_gap: f64,
}

pub fn prop1_gap(f: &ScalarField, g: &ScalarField) -> Result<Prop1Gap> {
    f.grid().check_same(g.grid())?;
    let g_sym = symmetric_rearrangement(g);
    let asym = crate::fields::lp_norm(&g.sub(&g_sym)?, 1.0)?;
    if asym > 1e-10 {
        return Err(Error::pre(format!(
            "g must equal its symmetric rearrangement (L¹ defect {asym:.3e})"
        )));
    }
    let (mf, mg) = (integrate(f), integrate(g));
    if (mf - mg).abs() > 1e-8 * mf.abs().max(mg.abs()) {
        return Err(Error::pre(format!("masses differ: ∫f = {mf}, ∫g = {mg}")));
    }
    let fp = decreasing_rearrangement(f);
    let gp = decreasing_rearrangement(g);
    let ds = fp.cell_measure;
    let mut running = 0.0;
    let mut sup: f64 = 0.0;
    let mut moment = 0.0;
    for (k, (a, b)) in fp.levels.iter().zip(&gp.levels).enumerate() {
        let h = b - a;
        running += h * ds;
        sup = sup.max(running);
        // ∫ s ds over the k-th cell is ds²(k + ½)
        moment -= h * ds * ds * (k as f64 + 0.5);
    }
    Ok(Prop1Gap {
        entropy_gap: sup,
        moment_gap: moment,
    })
}
