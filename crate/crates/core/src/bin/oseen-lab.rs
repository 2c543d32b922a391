use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use oseen_lab::config::parse_config;
use oseen_lab::diagnostics::DiagnosticsRecord;
use oseen_lab::rearrangement::{decreasing_rearrangement, symmetric_rearrangement};
use oseen_lab::scenario::{
    self, check_entropy_decay, check_entropy_preconditions, check_mass, check_moment_slope, check_positivity,
    check_time_tags, initial_state, read_trajectory_dir, recompute_records, records_csv, Criterion, PresetName,
    ScenarioPreset, TrajectoryWriter, Verdict, CSV_FILE, PLOT_FILE, PLOT_SCRIPT,
};
use oseen_lab::snapshot::{read_snapshot, write_snapshot};
use oseen_lab::solver::{self, Variables};
use oseen_lab::Error;

/// Vorticity-equation laboratory: Lamb-Oseen benchmarks, rearrangements and
/// entropy diagnostics.
#[derive(Parser)]
#[command(name = "oseen-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a key=value config file.
    Simulate { config: PathBuf },
    /// Write the symmetric decreasing rearrangement of a snapshot and its profile.
    Rearrange { snapshot: PathBuf },
    /// Recompute entropy diagnostics of a trajectory and check their decay.
    Entropy { traj_dir: PathBuf },
    /// Check the conservation laws and inequalities along a trajectory.
    Verify { traj_dir: PathBuf },
    /// Run a preset experiment (oseen_exact, two_bump_uniqueness,
    /// trotter_domination, entropy_decay).
    Scenario {
        name: String,
        /// Override a preset key, e.g. --set n=64.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

/// Output root: `$OSEEN_LAB_OUT`, else `./out`.
fn output_root() -> PathBuf {
    std::env::var_os("OSEEN_LAB_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn exit_for(e: &Error) -> ExitCode {
    match e {
        Error::Config { .. } | Error::InvalidArgument(_) | Error::InvalidGrid(_) | Error::GridMismatch { .. } => {
            ExitCode::from(2)
        }
        _ => ExitCode::from(1),
    }
}

fn finish(verdict: &Verdict, path: &Path) -> Result<ExitCode, Error> {
    let text = verdict.render();
    fs::write(path, &text)?;
    print!("{text}");
    println!("verdict written to {}", path.display());
    Ok(if verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn simulate(config: &Path) -> Result<ExitCode, Error> {
    let run = parse_config(config)?;
    let name = config
        .file_stem()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("run"));
    let dir = match run.out_dir {
        Some(ref d) if d.is_absolute() => d.clone(),
        Some(ref d) => output_root().join(d),
        None => output_root().join(name),
    };
    let cfg = &run.simulation;
    let w0 = initial_state(cfg, &run.init)?;
    let mut writer = TrajectoryWriter::create(&dir, cfg)?;
    let traj = solver::run_observed(cfg, &w0, &mut writer)?;
    writer.finish()?;
    let last = traj.records.last().expect("runs record their final state");
    println!(
        "{} snapshots written to {} (t = {}, mass = {}, H = {})",
        traj.len(),
        dir.display(),
        last.t,
        last.mass,
        last.entropy_h
    );
    Ok(ExitCode::SUCCESS)
}

fn rearrange(path: &Path) -> Result<ExitCode, Error> {
    let snap = read_snapshot(path)?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("snapshot");
    let root = output_root();
    fs::create_dir_all(&root)?;
    let sharp = symmetric_rearrangement(&snap.field);
    let out = root.join(format!("{stem}_sharp.osn"));
    write_snapshot(&out, &sharp, snap.alpha)?;
    let profile = decreasing_rearrangement(&snap.field);
    let mut csv = String::from("prefix_measure,cumulative_mass\n");
    for (k, c) in profile.cumulative().iter().enumerate() {
        let _ = writeln!(csv, "{},{}", (k + 1) as f64 * profile.cell_measure(), c);
    }
    let csv_path = root.join(format!("{stem}_profile.csv"));
    fs::write(&csv_path, csv)?;
    println!("wrote {} and {}", out.display(), csv_path.display());
    Ok(ExitCode::SUCCESS)
}

fn load(dir: &Path) -> Result<(scenario::StoredTrajectory, Vec<DiagnosticsRecord>), Error> {
    let traj = read_trajectory_dir(dir)?;
    if traj.snapshots.is_empty() {
        return Err(Error::InvalidArgument(format!("no snapshots in {}", dir.display())));
    }
    let records = recompute_records(&traj)?;
    fs::write(dir.join(CSV_FILE), records_csv(&records))?;
    fs::write(dir.join(PLOT_FILE), PLOT_SCRIPT)?;
    Ok((traj, records))
}

fn entropy(dir: &Path) -> Result<ExitCode, Error> {
    let (_, records) = load(dir)?;
    let mut verdict = Verdict::default();
    let pre = check_entropy_preconditions(&records);
    if !pre.passed {
        verdict.push(pre);
        return finish(&verdict, &dir.join("entropy_verdict.txt"));
    }
    verdict.push(pre);
    check_entropy_decay(&records, &mut verdict)?;
    let trusted = records.iter().filter(|r| r.trusted).count();
    verdict.push(Criterion::new(
        "tail_control",
        trusted == records.len(),
        format!("{trusted} of {} records with a trusted entropy tail", records.len()),
    ));
    finish(&verdict, &dir.join("entropy_verdict.txt"))
}

fn verify(dir: &Path) -> Result<ExitCode, Error> {
    let (traj, records) = load(dir)?;
    let alpha = traj.alpha.0;
    let mut verdict = Verdict::default();
    verdict.push(check_time_tags(&traj.snapshots));
    verdict.push(check_mass(&records, alpha));
    if records.len() >= 2 {
        verdict.push(check_moment_slope(&records, alpha));
    }
    if alpha > 0.0 {
        verdict.push(check_positivity(&traj.snapshots));
        let pre = check_entropy_preconditions(&records);
        let usable = pre.passed;
        verdict.push(pre);
        if !usable {
            return finish(&verdict, &dir.join("verify_verdict.txt"));
        }
        let ck = records.iter().map(|r| r.ck_slack).fold(f64::INFINITY, f64::min);
        let lsi = records.iter().map(|r| r.lsi_slack).fold(f64::INFINITY, f64::min);
        verdict.push(Criterion::new(
            "csiszar_kullback",
            ck >= -1e-6,
            format!("min slack {ck:.3e}"),
        ));
        verdict.push(Criterion::new(
            "log_sobolev",
            lsi >= -1e-6,
            format!("min slack {lsi:.3e}"),
        ));
        if traj.variables == Variables::SelfSimilar && records.len() >= 3 {
            check_entropy_decay(&records, &mut verdict)?;
        }
    }
    finish(&verdict, &dir.join("verify_verdict.txt"))
}

fn run_preset(name: &str, overrides: &[String]) -> Result<ExitCode, Error> {
    let preset_name = PresetName::parse(name).ok_or_else(|| {
        let names: Vec<&str> = PresetName::ALL.iter().map(|p| p.as_str()).collect();
        Error::InvalidArgument(format!(
            "unknown scenario '{name}', expected one of {}",
            names.join(", ")
        ))
    })?;
    let pairs = overrides
        .iter()
        .map(|o| {
            o.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidArgument(format!("override '{o}' is not KEY=VALUE")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let preset = ScenarioPreset::with_overrides(preset_name, &pairs)?;
    let dir = match preset.run.out_dir {
        Some(ref d) if d.is_absolute() => d.clone(),
        Some(ref d) => output_root().join(d),
        None => output_root().join(preset_name.as_str()),
    };
    let outcome = scenario::run_scenario(&preset, &dir)?;
    print!("{}", outcome.verdict.render());
    println!("artifacts in {}", dir.display());
    Ok(if outcome.verdict.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate { config } => simulate(config),
        Command::Rearrange { snapshot } => rearrange(snapshot),
        Command::Entropy { traj_dir } => entropy(traj_dir),
        Command::Verify { traj_dir } => verify(traj_dir),
        Command::Scenario { name, overrides } => run_preset(name, overrides),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("oseen-lab: {e}");
            exit_for(&e)
        }
    }
}
