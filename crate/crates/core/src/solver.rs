//! Split-step integration of `∂_t ω + u·∇ω = Δω` with `u = K_BS * ω`.
//!
//! One step alternates the exact heat semigroup (a Fourier multiplier on the
//! zero-padded grid) with a semi-Lagrangian transport step along the frozen
//! velocity, i.e. `f ↦ S(dt) e^{dt Δ} f` (Lie) or
//! `f ↦ e^{dt/2 Δ} S(dt) e^{dt/2 Δ} f` (Strang).
//!
//! Self-similar variables `ξ = x/√t`, `τ = log t`, `w(ξ,τ) = t ω(ξ√t, t)`
//! are handled by conjugation: a physical step on the lattice dilated by
//! `√t`, followed by a resample of the dilation `ξ ↦ e^{dτ/2} ξ`.

use std::f64::consts::PI;

use crate::biot_savart::BiotSavartPlan;
use crate::diagnostics::{self, DiagnosticsOptions, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::fields::{bilinear, GridSpec, ScalarField, VectorField};
use crate::oseen::Circulation;
use crate::rearrangement::{decreasing_rearrangement, dominates_profiles, symmetric_rearrangement, DominationReport};
use crate::spectral::PaddedFft;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variables {
    Physical,
    SelfSimilar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Splitting {
    Lie,
    Strang,
}

/// How the self-similar step maps the advanced field back onto the `ξ` lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Remap {
    Bilinear,
    /// Separable periodic-sinc interpolation; exact for band-limited data.
    BandLimited,
}

/// Relative domination tolerance used by [`trotter_domination_run`], in units of `α`.
pub const DOMINATION_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub grid: GridSpec,
    /// Physical start time; also fixes `τ₀ = log t_start` in self-similar runs.
    pub t_start: f64,
    pub t_end: f64,
    /// Physical time step, or the `τ` step in self-similar runs.
    pub dt: f64,
    pub alpha_expected: Circulation,
    pub variables: Variables,
    pub splitting: Splitting,
    pub remap: Remap,
    pub record_every: usize,
    pub diagnostics: DiagnosticsOptions,
}

impl SimulationConfig {
    pub fn new(grid: GridSpec, t_start: f64, t_end: f64, dt: f64, alpha: Circulation) -> Self {
        Self {
            grid,
            t_start,
            t_end,
            dt,
            alpha_expected: alpha,
            variables: Variables::Physical,
            splitting: Splitting::Strang,
            remap: Remap::BandLimited,
            record_every: 100,
            diagnostics: DiagnosticsOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_start > 0.0) {
            return Err(Error::arg(format!("t_start must be > 0, got {}", self.t_start)));
        }
        if !(self.t_end.is_finite() && self.t_end > self.t_start) {
            return Err(Error::arg(format!(
                "need t_end > t_start, got {} ≤ {}",
                self.t_end, self.t_start
            )));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::arg(format!("dt must be > 0, got {}", self.dt)));
        }
        if self.record_every == 0 {
            return Err(Error::arg("record_every must be ≥ 1"));
        }
        if !self.alpha_expected.0.is_finite() {
            return Err(Error::arg("alpha must be finite"));
        }
        if self.variables == Variables::SelfSimilar && self.alpha_expected.0 <= 0.0 {
            return Err(Error::arg("self-similar runs need alpha > 0"));
        }
        Ok(())
    }

    /// Number of steps and the span they cover, in the run's own time variable.
    pub fn schedule(&self) -> (usize, f64) {
        let (a, b) = match self.variables {
            Variables::Physical => (self.t_start, self.t_end),
            Variables::SelfSimilar => (self.t_start.ln(), self.t_end.ln()),
        };
        let steps = ((b - a) / self.dt).round().max(1.0) as usize;
        (steps, a)
    }
}

/// Recorded snapshots of a run with their diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub variables: Variables,
    pub alpha: Circulation,
    /// Fields in the run's variables, tagged with `t` or `τ`.
    pub snapshots: Vec<ScalarField>,
    pub records: Vec<DiagnosticsRecord>,
    pub domination: Vec<Option<DominationReport>>,
}

impl Trajectory {
    fn new(variables: Variables, alpha: Circulation) -> Self {
        Self {
            variables,
            alpha,
            snapshots: Vec::new(),
            records: Vec::new(),
            domination: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    /// Last snapshot in physical variables.
    pub fn final_physical(&self) -> Option<ScalarField> {
        self.snapshots.last().map(|s| to_physical(s, self.variables))
    }
}

/// `w(ξ,τ) ↦ ω(x,t)` by relabelling the lattice; no interpolation.
pub fn to_physical(f: &ScalarField, variables: Variables) -> ScalarField {
    match variables {
        Variables::Physical => f.clone(),
        Variables::SelfSimilar => {
            let tau = f.time_tag().expect("self-similar snapshots carry τ");
            let t = tau.exp();
            let grid = f.grid().scaled(t.sqrt()).expect("dilated grid is valid");
            ScalarField::from_parts(grid, f.values().iter().map(|v| v / t).collect(), Some(t))
        }
    }
}

/// `ω(x,t) ↦ w(ξ,τ)` by relabelling the lattice.
pub fn to_self_similar(f: &ScalarField) -> Result<ScalarField> {
    let t = match f.time_tag() {
        Some(t) if t > 0.0 => t,
        other => return Err(Error::pre(format!("need a time tag t > 0, got {other:?}"))),
    };
    let grid = f.grid().scaled(1.0 / t.sqrt())?;
    Ok(ScalarField::from_parts(
        grid,
        f.values().iter().map(|v| v * t).collect(),
        Some(t.ln()),
    ))
}

/// Exact heat semigroup `e^{τΔ}` on the zero-padded grid.
pub fn heat_step(f: &ScalarField, tau: f64) -> Result<ScalarField> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::arg(format!("heat step needs τ > 0, got {tau}")));
    }
    let fft = PaddedFft::new(f.grid().n());
    let (v, _) = fft.heat(f.grid(), tau, f.values(), None);
    ScalarField::from_parts(*f.grid(), v, f.time_tag().map(|t| t + tau)).ensure_finite("heat_step")
}

/// Semi-Lagrangian values: trace back with the midpoint rule through the
/// frozen, bilinearly interpolated velocity and sample `values` bilinearly.
fn transport_values(grid: &GridSpec, values: &[f64], u1: &[f64], u2: &[f64], tau: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    for (k, (_, _, x)) in grid.cells().enumerate() {
        let (a, b) = (u1[k], u2[k]);
        if a == 0.0 && b == 0.0 && tau == 0.0 {
            out.push(values[k]);
            continue;
        }
        let mid = [x[0] - 0.5 * tau * a, x[1] - 0.5 * tau * b];
        let um = [bilinear(grid, u1, mid), bilinear(grid, u2, mid)];
        let foot = [x[0] - tau * um[0], x[1] - tau * um[1]];
        out.push(bilinear(grid, values, foot));
    }
    out
}

/// One transport substep `f ↦ f ∘ Ψ⁻¹` along the frozen velocity `u`.
pub fn transport_step(f: &ScalarField, u: &VectorField, tau: f64) -> Result<ScalarField> {
    f.grid().check_same(u.grid())?;
    if !tau.is_finite() {
        return Err(Error::arg("transport step needs a finite τ"));
    }
    let v = transport_values(f.grid(), f.values(), u.u1(), u.u2(), tau);
    ScalarField::from_parts(*f.grid(), v, f.time_tag().map(|t| t + tau)).ensure_finite("transport_step")
}

/// Rescales `values` so that their sum is `target`. Semi-Lagrangian bilinear
/// sampling loses mass at a rate `~h|u||∇²f|` while the exact substeps
/// preserve it; a global factor restores it without touching signs. Skipped for
/// data whose sum is small against its total variation (no meaningful ratio).
fn restore_mass(values: &mut [f64], target: f64) {
    let sum: f64 = values.iter().sum();
    let abs: f64 = values.iter().map(|v| v.abs()).sum();
    if sum == 0.0 || sum.abs() < 1e-3 * abs || (target - sum).abs() > 1e-2 * sum.abs() {
        return;
    }
    let c = target / sum;
    for v in values.iter_mut() {
        *v *= c;
    }
}

/// Advances raw values living on the plan's lattice dilated by `scale` over a
/// physical time `dt`. `companion`, if given, receives the heat flow only.
fn advance(
    plan: &BiotSavartPlan,
    scale: f64,
    values: &[f64],
    companion: Option<&[f64]>,
    dt: f64,
    splitting: Splitting,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let grid = plan.grid();
    // on the ξ lattice heat time shrinks by scale², displacements by scale
    let heat_dt = dt / (scale * scale);
    let transport = |v: &[f64]| {
        let (u1, u2) = plan.convolve(v, 1.0);
        let mut out = transport_values(grid, v, &u1, &u2, dt);
        restore_mass(&mut out, v.iter().sum());
        out
    };
    // e^{τΔ} maps nonnegative data to nonnegative data; FFT roundoff leaves
    // ~1e-16·max of negative noise in the empty far field, which would otherwise
    // accumulate over many steps
    let clamp = values.iter().chain(companion.unwrap_or(&[])).all(|&v| v >= 0.0);
    let heat = |tau: f64, re: &[f64], im: Option<&[f64]>| {
        let (mut f, mut g) = plan.heat(grid, tau, re, im);
        if clamp {
            f.iter_mut().chain(g.iter_mut()).for_each(|v| *v = v.max(0.0));
        }
        (f, g)
    };
    match splitting {
        Splitting::Lie => {
            let (f, g) = heat(heat_dt, values, companion);
            (transport(&f), companion.map(|_| g))
        }
        Splitting::Strang => {
            let (f, g) = heat(0.5 * heat_dt, values, companion);
            let f = transport(&f);
            let (f, g) = heat(0.5 * heat_dt, &f, companion.map(|_| g.as_slice()));
            (f, companion.map(|_| g))
        }
    }
}

/// One step of the vorticity equation in physical variables.
pub fn step_physical(f: &ScalarField, plan: &BiotSavartPlan, dt: f64, splitting: Splitting) -> Result<ScalarField> {
    plan.grid().check_same(f.grid())?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::arg(format!("dt must be > 0, got {dt}")));
    }
    let (v, _) = advance(plan, 1.0, f.values(), None, dt, splitting);
    ScalarField::from_parts(*f.grid(), v, f.time_tag().map(|t| t + dt)).ensure_finite("step_physical")
}

/// Periodic sinc on `n` points of spacing `h`: `sin(πu/h) / (n tan(πu/2L))`.
fn periodic_sinc(u: f64, h: f64, n: usize) -> f64 {
    let period = h * n as f64;
    let a = PI * u / h;
    if a.abs() < 1e-12 {
        return 1.0;
    }
    let b = PI * u / period;
    let t = b.tan();
    if t.abs() < 1e-300 {
        return if (a / PI).round() as i64 % 2 == 0 { 1.0 } else { -1.0 };
    }
    a.sin() / (n as f64 * t)
}

/// `v ↦ λ² v(λξ)` on the same lattice; zero where `λξ` leaves the grid.
fn dilate(grid: &GridSpec, values: &[f64], lambda: f64, remap: Remap) -> Vec<f64> {
    let l2 = lambda * lambda;
    match remap {
        Remap::Bilinear => grid
            .cells()
            .map(|(_, _, x)| l2 * bilinear(grid, values, [lambda * x[0], lambda * x[1]]))
            .collect(),
        Remap::BandLimited => {
            let n = grid.n();
            let h = grid.spacing();
            let lw = grid.half_width();
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                let y = lambda * grid.center(i);
                if y.abs() > lw {
                    continue;
                }
                for a in 0..n {
                    m[i * n + a] = periodic_sinc(y - grid.center(a), h, n);
                }
            }
            // rows: tmp = M V, then out = tmp Mᵀ
            let mut tmp = vec![0.0; n * n];
            for i in 0..n {
                let row = &m[i * n..(i + 1) * n];
                let out = &mut tmp[i * n..(i + 1) * n];
                for (a, &w) in row.iter().enumerate() {
                    if w != 0.0 {
                        let src = &values[a * n..(a + 1) * n];
                        for (o, s) in out.iter_mut().zip(src) {
                            *o += w * s;
                        }
                    }
                }
            }
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                let src = &tmp[i * n..(i + 1) * n];
                for j in 0..n {
                    let row = &m[j * n..(j + 1) * n];
                    out[i * n + j] = l2 * row.iter().zip(src).map(|(a, b)| a * b).sum::<f64>();
                }
            }
            out
        }
    }
}

/// One step of the rescaled equation `∂_τ w + v·∇w = Δw + ½ξ·∇w + w`.
pub fn step_self_similar(w: &ScalarField, plan: &BiotSavartPlan, dtau: f64) -> Result<ScalarField> {
    step_self_similar_with(w, plan, dtau, Splitting::Strang, Remap::BandLimited)
}

pub fn step_self_similar_with(
    w: &ScalarField,
    plan: &BiotSavartPlan,
    dtau: f64,
    splitting: Splitting,
    remap: Remap,
) -> Result<ScalarField> {
    plan.grid().check_same(w.grid())?;
    if !(dtau.is_finite() && dtau > 0.0) {
        return Err(Error::arg(format!("dτ must be > 0, got {dtau}")));
    }
    let tau = w
        .time_tag()
        .ok_or_else(|| Error::pre("self-similar step needs the field tagged with τ"))?;
    let t = tau.exp();
    let dt = t * dtau.exp_m1();
    let omega: Vec<f64> = w.values().iter().map(|v| v / t).collect();
    let (advanced, _) = advance(plan, t.sqrt(), &omega, None, dt, splitting);
    let scaled: Vec<f64> = advanced.iter().map(|v| v * t).collect();
    let mut v = dilate(w.grid(), &scaled, (0.5 * dtau).exp(), remap);
    if remap == Remap::BandLimited && scaled.iter().all(|&x| x >= 0.0) {
        // sinc ringing in the far tail (~1e-13 of the peak) would break positivity
        for x in v.iter_mut() {
            *x = x.max(0.0);
        }
    }
    restore_mass(&mut v, scaled.iter().sum());
    ScalarField::from_parts(*w.grid(), v, Some(tau + dtau)).ensure_finite("step_self_similar")
}

/// Receives every recorded snapshot as soon as it exists.
pub trait Observer {
    fn record(&mut self, snapshot: &ScalarField, record: &DiagnosticsRecord) -> Result<()>;

    /// Called with the last valid state when a run aborts.
    fn abort(&mut self, _last_valid: &ScalarField, _error: &Error) {}
}

impl Observer for () {
    fn record(&mut self, _: &ScalarField, _: &DiagnosticsRecord) -> Result<()> {
        Ok(())
    }
}

fn check_initial(config: &SimulationConfig, omega0: &ScalarField) -> Result<()> {
    config.validate()?;
    config.grid.check_same(omega0.grid())
}

/// Initial state tagged with `t_start` or `τ₀`.
fn initial_state(config: &SimulationConfig, omega0: &ScalarField) -> ScalarField {
    let t0 = config.t_start;
    match config.variables {
        Variables::Physical => omega0.clone().with_time_tag(Some(t0)),
        Variables::SelfSimilar => omega0.clone().with_time_tag(Some(t0.ln())),
    }
}

struct Recorder<'a> {
    config: &'a SimulationConfig,
    traj: Trajectory,
    observer: &'a mut dyn Observer,
}

impl Recorder<'_> {
    fn push(&mut self, state: &ScalarField, dom: Option<DominationReport>) -> Result<()> {
        let physical = to_physical(state, self.config.variables);
        let mut rec = diagnostics::compute_record(&physical, self.config.alpha_expected, &self.config.diagnostics)?;
        rec.domination_margin = dom.map(|d| d.worst_margin);
        self.observer.record(state, &rec)?;
        self.traj.snapshots.push(state.clone());
        self.traj.records.push(rec);
        self.traj.domination.push(dom);
        Ok(())
    }
}

/// Integrates from `t_start` to `t_end`, recording every `record_every` steps
/// and at the final time.
///
/// The initial data is given in the run's variables on `config.grid`: `ω₀` for
/// physical runs, `w₀(ξ) = t₀ ω₀(ξ√t₀)` on the `ξ` lattice for self-similar
/// ones (see [`to_self_similar`]).
pub fn run(config: &SimulationConfig, omega0: &ScalarField) -> Result<Trajectory> {
    run_observed(config, omega0, &mut ())
}

pub fn run_observed(
    config: &SimulationConfig,
    omega0: &ScalarField,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    check_initial(config, omega0)?;
    let plan = BiotSavartPlan::new(config.grid);
    let (steps, start) = config.schedule();
    let mut rec = Recorder {
        config,
        traj: Trajectory::new(config.variables, config.alpha_expected),
        observer,
    };
    let mut state = initial_state(config, omega0);
    rec.push(&state, None)?;
    for k in 1..=steps {
        let next = match config.variables {
            Variables::Physical => step_physical(&state, &plan, config.dt, config.splitting),
            Variables::SelfSimilar => step_self_similar_with(&state, &plan, config.dt, config.splitting, config.remap),
        };
        let next = match next {
            Ok(s) => s.with_time_tag(Some(start + k as f64 * config.dt)),
            Err(e) => {
                rec.observer.abort(&state, &e);
                return Err(e);
            }
        };
        state = next;
        if k % config.record_every == 0 || k == steps {
            if let Err(e) = rec.push(&state, None) {
                rec.observer.abort(&state, &e);
                return Err(e);
            }
        }
    }
    Ok(rec.traj)
}

/// Runs the nonlinear flow `f` next to the heat flow `g` of `ω₀^#` and records
/// `f ⪯ g` at every snapshot. Physical variables only.
pub fn trotter_domination_run(config: &SimulationConfig, omega0: &ScalarField) -> Result<Trajectory> {
    trotter_domination_run_observed(config, omega0, &mut ())
}

pub fn trotter_domination_run_observed(
    config: &SimulationConfig,
    omega0: &ScalarField,
    observer: &mut dyn Observer,
) -> Result<Trajectory> {
    check_initial(config, omega0)?;
    if config.variables != Variables::Physical {
        return Err(Error::arg("the domination run works in physical variables"));
    }
    let tol = DOMINATION_TOL * config.alpha_expected.0.abs();
    let plan = BiotSavartPlan::new(config.grid);
    let (steps, start) = config.schedule();
    let mut rec = Recorder {
        config,
        traj: Trajectory::new(config.variables, config.alpha_expected),
        observer,
    };
    let mut f = initial_state(config, omega0);
    let mut g = symmetric_rearrangement(&f).into_values();
    let dom = |f: &ScalarField, g: &[f64]| {
        let gp = decreasing_rearrangement(&ScalarField::from_parts(config.grid, g.to_vec(), None));
        dominates_profiles(&decreasing_rearrangement(f), &gp, tol)
    };
    rec.push(&f, Some(dom(&f, &g)?))?;
    for k in 1..=steps {
        let (fv, gv) = advance(&plan, 1.0, f.values(), Some(&g), config.dt, config.splitting);
        let next = ScalarField::from_parts(config.grid, fv, Some(start + k as f64 * config.dt));
        let next = match next.ensure_finite("trotter_domination_run") {
            Ok(s) => s,
            Err(e) => {
                rec.observer.abort(&f, &e);
                return Err(e);
            }
        };
        f = next;
        g = gv.expect("companion flow");
        if k % config.record_every == 0 || k == steps {
            let d = dom(&f, &g)?;
            if let Err(e) = rec.push(&f, Some(d)) {
                rec.observer.abort(&f, &e);
                return Err(e);
            }
        }
    }
    Ok(rec.traj)
}
