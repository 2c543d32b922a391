//! Initial data, trajectory directories and the preset experiments.
//!
//! A trajectory directory holds
//!
//! * `trajectory.meta` — `variables`, `alpha`, `L`, `n` as `key = value`,
//! * `snap_NNNNN.osn` — recorded snapshots in the run's variables,
//! * `diagnostics.csv`, `verdict.txt` and a `plot_diagnostics.py` helper.
//!
//! Presets are plain configuration texts (see [`crate::config`]), so every
//! preset pins a [`SimulationConfig`] and an initial-data recipe; overrides
//! replace individual keys.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::config::{parse_config_str, RunFile, KEYS};
use crate::diagnostics::{
    compute_record, decay_report_from_series, normalized_profile, DiagnosticsRecord, TOL_DECAY, TOL_RATE,
};
use crate::error::{Error, Result};
use crate::fields::{integrate, lp_norm, rescale_solution, GridSpec, ScalarField};
use crate::oseen::{gauss_g, oseen_field, oseen_vorticity, Circulation};
use crate::rearrangement::{dominates, symmetric_rearrangement};
use crate::snapshot::{read_snapshot, write_snapshot};
use crate::solver::{self, to_physical, Observer, SimulationConfig, Trajectory, Variables};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialData {
    Oseen {
        t0: f64,
        alpha: f64,
    },
    /// Two Oseen vortices of circulation `α/2` at `±(d, 0)`.
    TwoBump {
        t0: f64,
        alpha: f64,
        d: f64,
    },
    Snapshot(PathBuf),
}

/// Initial vorticity in physical variables on `grid`, tagged with `t₀`.
/// Snapshots are returned as stored, after checking their grid.
pub fn make_initial_data(recipe: &InitialData, grid: &GridSpec) -> Result<ScalarField> {
    match *recipe {
        InitialData::Oseen { t0, alpha } => oseen_field(*grid, t0, Circulation(alpha)),
        InitialData::TwoBump { t0, alpha, d } => {
            if !(d.is_finite() && d >= 0.0) {
                return Err(Error::arg(format!("bump offset must be ≥ 0, got {d}")));
            }
            let half = Circulation(0.5 * alpha);
            oseen_vorticity([0.0, 0.0], t0, half)?;
            let raw = ScalarField::from_fn(*grid, |x| {
                oseen_vorticity([x[0] - d, x[1]], t0, half).unwrap()
                    + oseen_vorticity([x[0] + d, x[1]], t0, half).unwrap()
            });
            // symmetric about the origin, so only the quadrature mass needs fixing
            let m = integrate(&raw);
            let f = if m != 0.0 { raw.scale(alpha / m) } else { raw };
            Ok(f.with_time_tag(Some(t0)))
        }
        InitialData::Snapshot(ref path) => {
            let s = read_snapshot(path)?;
            grid.check_same(s.field.grid())?;
            Ok(s.field)
        }
    }
}

/// Initial state of `config` in its own variables, on `config.grid`.
///
/// For self-similar runs the closed-form recipes are sampled on the physical
/// lattice `√t₀·ξ` and relabelled; a snapshot is taken to hold `w₀` already.
pub fn initial_state(config: &SimulationConfig, recipe: &InitialData) -> Result<ScalarField> {
    match (config.variables, recipe) {
        (Variables::Physical, _) | (Variables::SelfSimilar, InitialData::Snapshot(_)) => {
            make_initial_data(recipe, &config.grid)
        }
        (Variables::SelfSimilar, _) => {
            let t0 = config.t_start;
            let physical = make_initial_data(recipe, &config.grid.scaled(t0.sqrt())?)?;
            ScalarField::new(
                config.grid,
                physical.values().iter().map(|v| v * t0).collect(),
                Some(t0.ln()),
            )
        }
    }
}

// ---------------------------------------------------------------------------
// trajectory directories

pub const META_FILE: &str = "trajectory.meta";
pub const CSV_FILE: &str = "diagnostics.csv";
pub const VERDICT_FILE: &str = "verdict.txt";
pub const PLOT_FILE: &str = "plot_diagnostics.py";

pub fn snapshot_name(k: usize) -> String {
    format!("snap_{k:05}.osn")
}

fn variables_name(v: Variables) -> &'static str {
    match v {
        Variables::Physical => "physical",
        Variables::SelfSimilar => "self_similar",
    }
}

pub fn write_meta(dir: &Path, grid: &GridSpec, variables: Variables, alpha: Circulation) -> Result<()> {
    let text = format!(
        "variables = {}\nalpha = {}\nL = {}\nn = {}\n",
        variables_name(variables),
        alpha.0,
        grid.half_width(),
        grid.n()
    );
    fs::write(dir.join(META_FILE), text)?;
    Ok(())
}

/// Streams snapshots into a trajectory directory while a run progresses.
pub struct TrajectoryWriter {
    dir: PathBuf,
    alpha: Circulation,
    count: usize,
    csv: String,
}

impl TrajectoryWriter {
    pub fn create(dir: impl Into<PathBuf>, config: &SimulationConfig) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        write_meta(&dir, &config.grid, config.variables, config.alpha_expected)?;
        Ok(Self {
            dir,
            alpha: config.alpha_expected,
            count: 0,
            csv: format!("{}\n", DiagnosticsRecord::CSV_HEADER),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `diagnostics.csv` and the plotting helper.
    pub fn finish(self) -> Result<PathBuf> {
        fs::write(self.dir.join(CSV_FILE), &self.csv)?;
        fs::write(self.dir.join(PLOT_FILE), PLOT_SCRIPT)?;
        Ok(self.dir)
    }
}

impl Observer for TrajectoryWriter {
    fn record(&mut self, snapshot: &ScalarField, record: &DiagnosticsRecord) -> Result<()> {
        write_snapshot(self.dir.join(snapshot_name(self.count)), snapshot, Some(self.alpha.0))?;
        self.count += 1;
        self.csv.push_str(&record.csv_row());
        self.csv.push('\n');
        Ok(())
    }

    fn abort(&mut self, last_valid: &ScalarField, error: &Error) {
        let _ = write_snapshot(self.dir.join("last_valid.osn"), last_valid, Some(self.alpha.0));
        let _ = fs::write(self.dir.join(CSV_FILE), &self.csv);
        let _ = fs::write(self.dir.join("abort.txt"), format!("{error}\n"));
    }
}

/// A trajectory read back from disk.
#[derive(Debug, Clone)]
pub struct StoredTrajectory {
    pub variables: Variables,
    pub alpha: Circulation,
    pub snapshots: Vec<ScalarField>,
}

pub fn read_trajectory_dir(dir: &Path) -> Result<StoredTrajectory> {
    let meta_path = dir.join(META_FILE);
    let text = fs::read_to_string(&meta_path).map_err(|e| Error::Config {
        path: meta_path.clone(),
        line: 0,
        msg: format!("cannot read: {e}"),
    })?;
    let mut variables = None;
    let mut alpha = None;
    for (k, line) in text.lines().enumerate() {
        let Some((key, value)) = line.split_once('=') else {
            continue;
        };
        let value = value.trim();
        let bad = || Error::Config {
            path: meta_path.clone(),
            line: k + 1,
            msg: format!("bad value '{value}'"),
        };
        match key.trim() {
            "variables" => {
                variables = Some(match value {
                    "physical" => Variables::Physical,
                    "self_similar" => Variables::SelfSimilar,
                    _ => return Err(bad()),
                })
            }
            "alpha" => alpha = Some(value.parse::<f64>().map_err(|_| bad())?),
            _ => {}
        }
    }
    let (Some(variables), Some(alpha)) = (variables, alpha) else {
        return Err(Error::Config {
            path: meta_path,
            line: 0,
            msg: "needs both 'variables' and 'alpha'".into(),
        });
    };
    let mut names: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .is_some_and(|s| s.starts_with("snap_") && s.ends_with(".osn"))
        })
        .collect();
    names.sort();
    let snapshots = names
        .iter()
        .map(|p| read_snapshot(p).map(|s| s.field))
        .collect::<Result<Vec<_>>>()?;
    Ok(StoredTrajectory {
        variables,
        alpha: Circulation(alpha),
        snapshots,
    })
}

/// Recomputes the diagnostics of stored snapshots.
///
/// A snapshot that is not a valid density for the entropy functionals (wrong
/// mass, negative cells) keeps its moments and norms and gets NaN entropy
/// entries, so the caller can report it instead of aborting.
pub fn recompute_records(traj: &StoredTrajectory) -> Result<Vec<DiagnosticsRecord>> {
    let opts = crate::diagnostics::DiagnosticsOptions {
        entropy: traj.alpha.0 > 0.0,
        ..Default::default()
    };
    let plain = crate::diagnostics::DiagnosticsOptions { entropy: false, ..opts };
    traj.snapshots
        .iter()
        .map(|s| {
            let f = to_physical(s, traj.variables);
            match compute_record(&f, traj.alpha, &opts) {
                Err(Error::Precondition(_)) => compute_record(&f, traj.alpha, &plain),
                other => other,
            }
        })
        .collect()
}

/// Fails when some record has no entropy diagnostics.
pub fn check_entropy_preconditions(records: &[DiagnosticsRecord]) -> Criterion {
    let missing: Vec<String> = records
        .iter()
        .filter(|r| !r.entropy_h.is_finite())
        .map(|r| format!("{}", r.t))
        .collect();
    Criterion::new(
        "entropy_preconditions",
        missing.is_empty(),
        if missing.is_empty() {
            format!(
                "all {} snapshots are densities of mass α without negative cells",
                records.len()
            )
        } else {
            format!("no entropy diagnostics at t = {}", missing.join(", "))
        },
    )
}

pub fn records_csv(records: &[DiagnosticsRecord]) -> String {
    let mut out = format!("{}\n", DiagnosticsRecord::CSV_HEADER);
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

pub const PLOT_SCRIPT: &str = r#"# Plots the columns of diagnostics.csv against tau.
# usage: python plot_diagnostics.py [diagnostics.csv]
import csv
import sys

import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "diagnostics.csv"
with open(path) as fh:
    rows = list(csv.DictReader(fh))
tau = [float(r["tau"]) for r in rows]
columns = [c for c in rows[0].keys() if c not in ("tau", "t")]
fig, axes = plt.subplots(len(columns), 1, sharex=True, figsize=(7, 2 * len(columns)))
for ax, c in zip(axes, columns):
    ys = [float(r[c]) if r[c] not in ("", "NaN") else float("nan") for r in rows]
    ax.plot(tau, ys, ".-")
    ax.set_ylabel(c)
    if c in ("H", "I") and all(y > 0 for y in ys if y == y):
        ax.set_yscale("log")
axes[-1].set_xlabel("tau")
fig.tight_layout()
fig.savefig(path.rsplit(".", 1)[0] + ".png", dpi=120)
"#;

// ---------------------------------------------------------------------------
// checks shared by the presets and the `verify` command

/// One line of a verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: String,
    pub passed: bool,
    pub detail: String,
}

impl Criterion {
    pub fn new(id: &str, passed: bool, detail: String) -> Self {
        Self {
            id: id.to_string(),
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.detail
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Verdict {
    pub criteria: Vec<Criterion>,
    /// Measurements reported without a pass/fail judgement.
    pub notes: Vec<String>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let _ = writeln!(out, "{}", c.line());
        }
        for n in &self.notes {
            let _ = writeln!(out, "NOTE {n}");
        }
        let _ = writeln!(out, "OVERALL {}", if self.passed() { "PASS" } else { "FAIL" });
        out
    }
}

/// `max_k |mass_k − α| ≤ 1e-8·|α|`.
pub fn check_mass(records: &[DiagnosticsRecord], alpha: f64) -> Criterion {
    let worst = records.iter().map(|r| (r.mass - alpha).abs()).fold(0.0, f64::max);
    let tol = 1e-8 * alpha.abs().max(f64::MIN_POSITIVE);
    Criterion::new(
        "mass",
        worst <= tol,
        format!("max |mass − α| = {worst:.3e} (bound {tol:.1e})"),
    )
}

/// Least-squares slope of the second moment against `t`, expected `4α`.
pub fn second_moment_slope(records: &[DiagnosticsRecord]) -> f64 {
    let k = records.len() as f64;
    let mt = records.iter().map(|r| r.t).sum::<f64>() / k;
    let mm = records.iter().map(|r| r.second_moment).sum::<f64>() / k;
    let sxy: f64 = records.iter().map(|r| (r.t - mt) * (r.second_moment - mm)).sum();
    let sxx: f64 = records.iter().map(|r| (r.t - mt) * (r.t - mt)).sum();
    sxy / sxx
}

pub fn check_moment_slope(records: &[DiagnosticsRecord], alpha: f64) -> Criterion {
    if records.len() < 2 {
        return Criterion::new("second_moment", false, "fewer than 2 snapshots".into());
    }
    let slope = second_moment_slope(records);
    let rel = (slope - 4.0 * alpha).abs() / (4.0 * alpha).abs();
    Criterion::new(
        "second_moment",
        rel <= 0.01,
        format!(
            "slope of ∫|x|²ω vs t = {slope:.6} (4α = {}, rel. dev. {rel:.2e}, bound 1e-2)",
            4.0 * alpha
        ),
    )
}

pub fn check_time_tags(snapshots: &[ScalarField]) -> Criterion {
    let tags: Vec<f64> = snapshots.iter().map(|s| s.time_tag().unwrap_or(f64::NAN)).collect();
    let ok = tags.iter().all(|t| t.is_finite()) && tags.windows(2).all(|w| w[1] > w[0]);
    Criterion::new(
        "time_tags",
        ok,
        format!("{} snapshots, tags strictly increasing: {ok}", tags.len()),
    )
}

pub fn check_positivity(snapshots: &[ScalarField]) -> Criterion {
    let min = snapshots
        .iter()
        .flat_map(|s| s.values().iter().copied())
        .fold(f64::INFINITY, f64::min);
    let max = snapshots.iter().map(|s| s.max_abs()).fold(0.0, f64::max);
    Criterion::new(
        "positivity",
        min >= -1e-13 * max.max(1.0),
        format!("min cell value {min:.3e}"),
    )
}

/// Entropy decay checks on recorded `(τ, h, I)`.
pub fn check_entropy_decay(records: &[DiagnosticsRecord], verdict: &mut Verdict) -> Result<()> {
    let tau: Vec<f64> = records.iter().map(|r| r.tau).collect();
    let h: Vec<f64> = records.iter().map(|r| r.entropy_h).collect();
    let i: Vec<f64> = records.iter().map(|r| r.fisher_i).collect();
    let rep = decay_report_from_series(&tau, &h, &i, TOL_DECAY, TOL_RATE)?;
    verdict.push(Criterion::new(
        "decay_report",
        rep.passed(),
        format!(
            "h nonincreasing: {}, {} of {} pairs violate h(τ₂) ≤ e^(τ₁−τ₂)h(τ₁)(1+{TOL_DECAY}), {} snapshots violate h′ ≤ −(1−{TOL_RATE})h",
            rep.monotone,
            rep.pair_failures.len(),
            rep.pairs_checked,
            rep.rate_failures.len()
        ),
    ));
    verdict.push(Criterion::new(
        "h_strictly_decreasing",
        rep.strictly_decreasing,
        format!("h from {:.4e} to {:.4e}", h[0], h[h.len() - 1]),
    ));
    verdict.push(Criterion::new(
        "decay_exponent",
        rep.exponent <= -0.85,
        format!("fitted exponent of h(τ) = {:.4} (bound ≤ −0.85)", rep.exponent),
    ));
    verdict.push(Criterion::new(
        "dissipation",
        rep.dissipation_rel_err.is_nan() || rep.dissipation_rel_err <= 0.15,
        format!(
            "max |dH/dτ + I|/I where h > 1e-4 = {:.3e} (bound 0.15)",
            rep.dissipation_rel_err
        ),
    ));
    verdict.note(format!("sup h over the run = {:.4e}", rep.sup_h));
    Ok(())
}

// ---------------------------------------------------------------------------
// presets

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    OseenExact,
    TwoBumpUniqueness,
    TrotterDomination,
    EntropyDecay,
}

impl PresetName {
    pub const ALL: [PresetName; 4] = [
        PresetName::OseenExact,
        PresetName::TwoBumpUniqueness,
        PresetName::TrotterDomination,
        PresetName::EntropyDecay,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::OseenExact => "oseen_exact",
            PresetName::TwoBumpUniqueness => "two_bump_uniqueness",
            PresetName::TrotterDomination => "trotter_domination",
            PresetName::EntropyDecay => "entropy_decay",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|p| p.as_str() == s)
    }

    /// The preset as configuration text (version 1).
    pub fn text(self) -> &'static str {
        match self {
            PresetName::OseenExact => {
                "L = 12\nn = 128\nt_start = 1\nt_end = 2\ndt = 1e-3\nalpha = 1\nsplitting = strang\n\
                 record_every = 50\ninit = oseen\n"
            }
            PresetName::TwoBumpUniqueness => {
                "L = 14\nn = 192\nt_start = 0.05\nt_end = 1\ndt = 5e-4\nalpha = 1\nsplitting = strang\n\
                 record_every = 50\ninit = two_bump\nbump_offset = 0.2\n"
            }
            PresetName::TrotterDomination => {
                "L = 14\nn = 192\nt_start = 0.05\nt_end = 1\ndt = 5e-4\nalpha = 1\nsplitting = strang\n\
                 record_every = 50\ninit = two_bump\nbump_offset = 0.2\n"
            }
            // dτ = dt/t₀ for dt = 5e-4 at t₀ = 0.05; t_end = t₀e⁵ spans τ by 5
            PresetName::EntropyDecay => {
                "L = 14\nn = 192\nt_start = 0.05\nt_end = 7.420657955128\ndt = 0.01\nalpha = 1\n\
                 variables = self_similar\nsplitting = strang\nrecord_every = 20\ninit = two_bump\nbump_offset = 0.2\n"
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioPreset {
    pub name: PresetName,
    pub run: RunFile,
}

impl ScenarioPreset {
    pub fn new(name: PresetName) -> Self {
        Self::with_overrides(name, &[]).expect("built-in presets parse")
    }

    /// The preset with `key = value` overrides applied.
    pub fn with_overrides(name: PresetName, overrides: &[(String, String)]) -> Result<Self> {
        let mut lines: Vec<(String, String)> = name
            .text()
            .lines()
            .filter_map(|l| {
                l.split_once('=')
                    .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            })
            .collect();
        for (k, v) in overrides {
            if !KEYS.contains(&k.as_str()) {
                return Err(Error::arg(format!("unknown override key '{k}'")));
            }
            match lines.iter_mut().find(|(key, _)| key == k) {
                Some(entry) => entry.1 = v.clone(),
                None => lines.push((k.clone(), v.clone())),
            }
        }
        let text: String = lines.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
        let run = parse_config_str(Path::new(&format!("preset:{}", name.as_str())), &text)?;
        Ok(Self { name, run })
    }
}

/// Result of one preset experiment.
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub verdict: Verdict,
    pub trajectory: Trajectory,
    pub dir: PathBuf,
}

fn run_into(dir: &Path, config: &SimulationConfig, w0: &ScalarField, domination: bool) -> Result<Trajectory> {
    let mut writer = TrajectoryWriter::create(dir, config)?;
    let traj = if domination {
        solver::trotter_domination_run_observed(config, w0, &mut writer)?
    } else {
        solver::run_observed(config, w0, &mut writer)?
    };
    writer.finish()?;
    Ok(traj)
}

fn l1_dist(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    lp_norm(&a.sub(b)?, 1.0)
}

/// Runs a preset, writing its trajectory and `verdict.txt` into `dir`.
pub fn run_scenario(preset: &ScenarioPreset, dir: &Path) -> Result<ScenarioOutcome> {
    let cfg = &preset.run.simulation;
    let alpha = cfg.alpha_expected;
    let w0 = initial_state(cfg, &preset.run.init)?;
    let mut verdict = Verdict::default();
    let domination = preset.name == PresetName::TrotterDomination;
    let traj = run_into(dir, cfg, &w0, domination)?;
    verdict.push(check_time_tags(&traj.snapshots));
    verdict.push(check_mass(&traj.records, alpha.0));
    verdict.push(check_moment_slope(&traj.records, alpha.0));

    match preset.name {
        PresetName::OseenExact => oseen_exact_checks(preset, &traj, &mut verdict)?,
        PresetName::EntropyDecay => {
            check_entropy_decay(&traj.records, &mut verdict)?;
            let last = traj.final_physical().expect("nonempty trajectory");
            let w = normalized_profile(&last, alpha)?;
            let g = ScalarField::from_fn(*w.grid(), gauss_g);
            let dist = l1_dist(&w, &g)?;
            let h = traj.records.last().expect("nonempty").entropy_h;
            verdict.push(Criterion::new(
                "final_l1_to_G",
                dist <= 2.0 * h.max(0.0).sqrt() && dist <= 0.02,
                format!(
                    "‖w/α − G‖₁ = {dist:.4e} (bounds 2√h = {:.4e}, 0.02)",
                    2.0 * h.max(0.0).sqrt()
                ),
            ));
            let k1 = traj.records.iter().map(|r| r.envelope_k1).fold(0.0, f64::max);
            verdict.push(Criterion::new(
                "envelope_bounded",
                k1.is_finite() && k1 < 1.0,
                format!("sup over the run of K₁(β=0.9) = {k1:.4e}"),
            ));
        }
        PresetName::TrotterDomination => {
            let tol = solver::DOMINATION_TOL * alpha.0.abs();
            let worst = traj
                .domination
                .iter()
                .flatten()
                .map(|d| d.worst_margin)
                .fold(f64::INFINITY, f64::min);
            verdict.push(Criterion::new(
                "heat_domination",
                worst >= -tol,
                format!("worst margin of ω(t) ⪯ e^((t−t₀)Δ)ω₀^# = {worst:.4e} (bound −{tol:.1e})"),
            ));
            let mut worst_oseen = f64::INFINITY;
            for s in &traj.snapshots {
                let t = s.time_tag().expect("tagged");
                if t >= 2.0 * cfg.t_start * (1.0 - 1e-12) {
                    let om = oseen_field(cfg.grid, t, alpha)?;
                    worst_oseen = worst_oseen.min(dominates(s, &om, tol)?.worst_margin);
                }
            }
            verdict.push(Criterion::new(
                "oseen_domination",
                worst_oseen >= -tol,
                format!("worst margin of ω(t) ⪯ Ω(t) for t ≥ 2t₀ = {worst_oseen:.4e} (bound −{tol:.1e})"),
            ));
            verdict.push(check_positivity(&traj.snapshots));
        }
        PresetName::TwoBumpUniqueness => {
            // Csiszár–Kullback plus exponential entropy decay:
            // ‖ω(t) − Ω(t)‖₁/α ≤ √(2h(τ₀)) e^{−(τ−τ₀)/2}
            let h0 = traj.records[0].entropy_h;
            let mut worst: f64 = 0.0;
            for (s, r) in traj.snapshots.iter().zip(&traj.records) {
                let om = oseen_field(cfg.grid, r.t, alpha)?;
                let bound = (2.0 * h0).sqrt() * (-(r.tau - traj.records[0].tau) / 2.0).exp();
                worst = worst.max(l1_dist(s, &om)? / alpha.0.abs() / bound);
            }
            verdict.push(Criterion::new(
                "approach_to_oseen",
                worst <= 1.0,
                format!("max over snapshots of ‖ω − Ω‖₁ / (α√(2h₀)e^(−(τ−τ₀)/2)) = {worst:.4}"),
            ));
            verdict.push(check_positivity(&traj.snapshots));
            let last = traj.snapshots.last().expect("nonempty");
            let is_radial = l1_dist(last, &symmetric_rearrangement(last))?;
            verdict.note(format!("final ‖ω − ω^#‖₁ = {is_radial:.4e}"));
        }
    }
    fs::write(dir.join(VERDICT_FILE), verdict.render())?;
    Ok(ScenarioOutcome {
        verdict,
        trajectory: traj,
        dir: dir.to_path_buf(),
    })
}

fn oseen_exact_checks(preset: &ScenarioPreset, traj: &Trajectory, verdict: &mut Verdict) -> Result<()> {
    let cfg = &preset.run.simulation;
    let alpha = cfg.alpha_expected;
    if cfg.variables != Variables::Physical {
        return Err(Error::arg("oseen_exact runs in physical variables"));
    }
    let last = traj.final_physical().expect("nonempty trajectory");
    let t_end = last.time_tag().expect("tagged");
    let exact = oseen_field(cfg.grid, t_end, alpha)?;
    let err = l1_dist(&last, &exact)?;
    verdict.push(Criterion::new(
        "final_l1_error",
        err <= 1e-3,
        format!("‖ω(t_end) − Ω(t_end)‖₁ = {err:.4e} (bound 1e-3)"),
    ));

    let w0 = initial_state(cfg, &preset.run.init)?;
    let mut half = cfg.clone();
    half.dt *= 0.5;
    half.record_every = usize::MAX;
    let fine = solver::run(&half, &w0)?.final_physical().expect("nonempty");
    let err_half = l1_dist(&fine, &exact)?;
    let ratio = err / err_half;
    verdict.push(Criterion::new(
        "dt_halving",
        ratio >= 3.0,
        format!("error at dt/2 = {err_half:.4e}, reduction {ratio:.3} (bound ≥ 3)"),
    ));

    // ω_λ(x,t) = λ²ω(λx,λ²t): rescale-then-evolve against evolve-then-rescale
    let lambda = 2.0;
    let evolved_then_scaled = rescale_solution(&last, lambda)?;
    let mut scaled_cfg = cfg.clone();
    scaled_cfg.t_start /= lambda * lambda;
    scaled_cfg.t_end /= lambda * lambda;
    scaled_cfg.dt /= lambda * lambda;
    scaled_cfg.record_every = usize::MAX;
    let scaled0 = rescale_solution(&w0, lambda)?;
    let scaled_then_evolved = solver::run(&scaled_cfg, &scaled0)?.final_physical().expect("nonempty");
    let gap = l1_dist(&evolved_then_scaled, &scaled_then_evolved)?;
    verdict.push(Criterion::new(
        "scaling_covariance",
        gap <= 2e-3,
        format!("λ = 2: ‖evolve∘rescale − rescale∘evolve‖₁ = {gap:.4e} (bound 2e-3)"),
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::second_moment;
    use crate::rearrangement::symmetric_rearrangement;

    #[test]
    fn oseen_initial_data_moments() {
        let g = GridSpec::new(12.0, 128).unwrap();
        let f = make_initial_data(&InitialData::Oseen { t0: 1.0, alpha: 1.0 }, &g).unwrap();
        assert!((integrate(&f) - 1.0).abs() < 1e-8);
        assert!((second_moment(&f) - 4.0).abs() < 1e-8);
        assert_eq!(f.time_tag(), Some(1.0));
    }

    #[test]
    fn two_bump_is_normalized_and_not_radial() {
        let g = GridSpec::new(14.0, 192).unwrap().scaled(0.05f64.sqrt()).unwrap();
        let f = make_initial_data(
            &InitialData::TwoBump {
                t0: 0.05,
                alpha: 1.0,
                d: 0.2,
            },
            &g,
        )
        .unwrap();
        assert!((integrate(&f) - 1.0).abs() < 1e-10);
        let asym = lp_norm(&f.sub(&symmetric_rearrangement(&f)).unwrap(), 1.0).unwrap();
        assert!(asym > 1e-2, "{asym}");
        // two Gaussians of variance 2t₀ per axis at ±d: α(4t₀ + d²)
        let m2 = second_moment(&f);
        assert!((m2 - (4.0 * 0.05 + 0.04)).abs() < 1e-6, "{m2}");
    }

    #[test]
    fn snapshot_initial_data() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(12.0, 32).unwrap();
        let f = oseen_field(g, 1.0, Circulation(1.0)).unwrap();
        let p = dir.path().join("w.osn");
        write_snapshot(&p, &f, Some(1.0)).unwrap();
        let back = make_initial_data(&InitialData::Snapshot(p.clone()), &g).unwrap();
        assert_eq!(back, f);
        let other = GridSpec::new(12.0, 64).unwrap();
        assert!(matches!(
            make_initial_data(&InitialData::Snapshot(p), &other),
            Err(Error::GridMismatch { .. })
        ));
    }

    #[test]
    fn self_similar_initial_state_is_a_relabel() {
        let preset = ScenarioPreset::new(PresetName::EntropyDecay);
        let cfg = &preset.run.simulation;
        let w0 = initial_state(cfg, &preset.run.init).unwrap();
        assert!(w0.grid().same_as(&cfg.grid));
        assert!((w0.time_tag().unwrap() - 0.05f64.ln()).abs() < 1e-15);
        assert!((integrate(&w0) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn presets_parse_and_override() {
        for name in PresetName::ALL {
            let p = ScenarioPreset::new(name);
            assert_eq!(PresetName::parse(name.as_str()), Some(name));
            assert!(p.run.simulation.validate().is_ok());
        }
        let p = ScenarioPreset::with_overrides(PresetName::OseenExact, &[("n".into(), "64".into())]).unwrap();
        assert_eq!(p.run.simulation.grid.n(), 64);
        assert!(ScenarioPreset::with_overrides(PresetName::OseenExact, &[("nu".into(), "1".into())]).is_err());
        assert!(ScenarioPreset::with_overrides(PresetName::OseenExact, &[("n".into(), "15".into())]).is_err());
        let e = ScenarioPreset::new(PresetName::EntropyDecay);
        let (steps, _) = e.run.simulation.schedule();
        assert_eq!(steps, 500);
    }

    #[test]
    fn trajectory_directory_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = GridSpec::new(12.0, 32).unwrap();
        let mut cfg = SimulationConfig::new(g, 1.0, 1.01, 5e-3, Circulation(1.0));
        cfg.record_every = 1;
        let w0 = oseen_field(g, 1.0, Circulation(1.0)).unwrap();
        let traj = run_into(dir.path(), &cfg, &w0, false).unwrap();
        let stored = read_trajectory_dir(dir.path()).unwrap();
        assert_eq!(stored.variables, Variables::Physical);
        assert_eq!(stored.snapshots, traj.snapshots);
        let recs = recompute_records(&stored).unwrap();
        assert_eq!(recs, traj.records);
        let csv = fs::read_to_string(dir.path().join(CSV_FILE)).unwrap();
        assert_eq!(csv, records_csv(&traj.records));
        assert!(dir.path().join(PLOT_FILE).exists());
    }

    #[test]
    fn verdict_rendering() {
        let mut v = Verdict::default();
        v.push(Criterion::new("a", true, "x = 1".into()));
        assert!(v.passed());
        v.push(Criterion::new("b", false, "y = 2".into()));
        v.note("z".into());
        let r = v.render();
        assert!(r.contains("PASS a: x = 1\nFAIL b: y = 2\nNOTE z\nOVERALL FAIL"));
    }
}
