//! Flat `key = value` run configuration.
//!
//! ```text
//! # Oseen benchmark
//! L = 12
//! n = 128
//! dt = 1e-3
//! t_start = 1
//! t_end = 2
//! splitting = strang
//! init = oseen
//! ```
//!
//! `L`, `n` and `dt` are required. Everything after `#` is a comment. Unknown
//! and repeated keys are rejected, as are values outside the solver's ranges;
//! every error carries the offending line.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::diagnostics::DiagnosticsOptions;
use crate::error::{Error, Result};
use crate::fields::GridSpec;
use crate::oseen::Circulation;
use crate::scenario::InitialData;
use crate::solver::{Remap, SimulationConfig, Splitting, Variables};

pub const KEYS: &[&str] = &[
    "L",
    "n",
    "t_start",
    "t_end",
    "dt",
    "alpha",
    "variables",
    "splitting",
    "remap",
    "record_every",
    "init",
    "bump_offset",
    "out_dir",
];

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFile {
    pub simulation: SimulationConfig,
    pub init: InitialData,
    /// As written; resolved against the output root by the caller.
    pub out_dir: Option<PathBuf>,
}

struct Entry {
    value: String,
    line: usize,
}

struct Parser<'a> {
    path: &'a Path,
    entries: HashMap<String, Entry>,
    last_line: usize,
}

impl Parser<'_> {
    fn err(&self, line: usize, msg: impl Into<String>) -> Error {
        Error::Config {
            path: self.path.to_path_buf(),
            line,
            msg: msg.into(),
        }
    }

    fn raw(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    fn number(&self, key: &str, default: Option<f64>) -> Result<(f64, usize)> {
        match self.raw(key) {
            Some(e) => e
                .value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(|v| (v, e.line))
                .ok_or_else(|| self.err(e.line, format!("{key}: expected a finite number, got '{}'", e.value))),
            None => default
                .map(|v| (v, 0))
                .ok_or_else(|| self.err(self.last_line, format!("missing required key '{key}'"))),
        }
    }

    fn integer(&self, key: &str, default: Option<usize>) -> Result<(usize, usize)> {
        match self.raw(key) {
            Some(e) => e.value.parse::<usize>().map(|v| (v, e.line)).map_err(|_| {
                self.err(
                    e.line,
                    format!("{key}: expected a nonnegative integer, got '{}'", e.value),
                )
            }),
            None => default
                .map(|v| (v, 0))
                .ok_or_else(|| self.err(self.last_line, format!("missing required key '{key}'"))),
        }
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)], default: T) -> Result<T> {
        let Some(e) = self.raw(key) else {
            return Ok(default);
        };
        options
            .iter()
            .find(|(name, _)| *name == e.value)
            .map(|(_, v)| *v)
            .ok_or_else(|| {
                let names: Vec<&str> = options.iter().map(|(n, _)| *n).collect();
                self.err(
                    e.line,
                    format!("{key}: expected one of {}, got '{}'", names.join("|"), e.value),
                )
            })
    }
}

fn tokenize<'a>(path: &'a Path, text: &str) -> Result<Parser<'a>> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    let mut last_line = 0;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| Error::Config {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected key = value, got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(err(format!("unknown key '{key}'")));
        }
        if value.is_empty() {
            return Err(err(format!("{key}: empty value")));
        }
        if let Some(prev) = entries.get(key) {
            return Err(err(format!("duplicate key '{key}' on lines {} and {line}", prev.line)));
        }
        entries.insert(
            key.to_string(),
            Entry {
                value: value.to_string(),
                line,
            },
        );
    }
    Ok(Parser {
        path,
        entries,
        last_line,
    })
}

/// Parses configuration text; `path` is used for messages and to resolve
/// relative snapshot paths.
pub fn parse_config_str(path: &Path, text: &str) -> Result<RunFile> {
    let p = tokenize(path, text)?;

    let (l, l_line) = p.number("L", None)?;
    if l <= 0.0 {
        return Err(p.err(l_line, format!("L must be > 0, got {l}")));
    }
    let (n, n_line) = p.integer("n", None)?;
    if n % 2 != 0 || n < 16 {
        return Err(p.err(n_line, format!("n must satisfy n even, ≥ 16; got {n}")));
    }
    let grid = GridSpec::new(l, n).map_err(|e| p.err(n_line, e.to_string()))?;

    let (dt, dt_line) = p.number("dt", None)?;
    if dt <= 0.0 {
        return Err(p.err(dt_line, format!("dt must be > 0, got {dt}")));
    }
    let (t_start, ts_line) = p.number("t_start", Some(1.0))?;
    if t_start <= 0.0 {
        return Err(p.err(ts_line, format!("t_start must be > 0, got {t_start}")));
    }
    let (t_end, te_line) = p.number("t_end", Some(2.0))?;
    if t_end <= t_start {
        return Err(p.err(te_line, format!("t_end must exceed t_start = {t_start}, got {t_end}")));
    }
    let (alpha, alpha_line) = p.number("alpha", Some(1.0))?;
    let variables = p.choice(
        "variables",
        &[
            ("physical", Variables::Physical),
            ("self_similar", Variables::SelfSimilar),
        ],
        Variables::Physical,
    )?;
    if variables == Variables::SelfSimilar && alpha <= 0.0 {
        return Err(p.err(
            alpha_line,
            format!("alpha must be > 0 in self-similar variables, got {alpha}"),
        ));
    }
    let splitting = p.choice(
        "splitting",
        &[("lie", Splitting::Lie), ("strang", Splitting::Strang)],
        Splitting::Strang,
    )?;
    let remap = p.choice(
        "remap",
        &[("bilinear", Remap::Bilinear), ("band_limited", Remap::BandLimited)],
        Remap::BandLimited,
    )?;
    let (record_every, re_line) = p.integer("record_every", Some(100))?;
    if record_every == 0 {
        return Err(p.err(re_line, "record_every must be ≥ 1"));
    }
    let (d, d_line) = p.number("bump_offset", Some(0.2))?;
    if d < 0.0 {
        return Err(p.err(d_line, format!("bump_offset must be ≥ 0, got {d}")));
    }

    let init = match p.raw("init") {
        None => InitialData::Oseen { t0: t_start, alpha },
        Some(e) => match e.value.as_str() {
            "oseen" => InitialData::Oseen { t0: t_start, alpha },
            "two_bump" => InitialData::TwoBump { t0: t_start, alpha, d },
            v => match v.strip_prefix("snapshot:") {
                Some(s) if !s.trim().is_empty() => {
                    let s = PathBuf::from(s.trim());
                    let base = path.parent().unwrap_or(Path::new(""));
                    InitialData::Snapshot(if s.is_absolute() { s } else { base.join(s) })
                }
                _ => {
                    return Err(p.err(
                        e.line,
                        format!("init: expected oseen|two_bump|snapshot:<path>, got '{v}'"),
                    ))
                }
            },
        },
    };

    let mut simulation = SimulationConfig::new(grid, t_start, t_end, dt, Circulation(alpha));
    simulation.variables = variables;
    simulation.splitting = splitting;
    simulation.remap = remap;
    simulation.record_every = record_every;
    simulation.diagnostics = DiagnosticsOptions {
        entropy: alpha > 0.0,
        ..DiagnosticsOptions::default()
    };

    Ok(RunFile {
        simulation,
        init,
        out_dir: p.raw("out_dir").map(|e| PathBuf::from(&e.value)),
    })
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.to_path_buf(),
        line: 0,
        msg: format!("cannot read: {e}"),
    })?;
    parse_config_str(path, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunFile> {
        parse_config_str(Path::new("run.cfg"), text)
    }

    fn message(text: &str) -> String {
        parse(text).unwrap_err().to_string()
    }

    #[test]
    fn minimal_file() {
        let r = parse("L=12\nn=128\ndt=1e-3\n").unwrap();
        let s = &r.simulation;
        assert_eq!(s.grid.half_width(), 12.0);
        assert_eq!(s.grid.n(), 128);
        assert_eq!(s.dt, 1e-3);
        assert_eq!((s.t_start, s.t_end), (1.0, 2.0));
        assert_eq!(s.splitting, Splitting::Strang);
        assert_eq!(r.init, InitialData::Oseen { t0: 1.0, alpha: 1.0 });
        assert_eq!(r.out_dir, None);
    }

    #[test]
    fn full_file_with_comments() {
        let text = "# header\nL = 14 # half width\nn = 192\ndt = 0.01\nt_start = 0.05\nt_end = 7.42\nalpha = 2\n\
                    variables = self_similar\nsplitting = lie\nremap = bilinear\nrecord_every = 25\ninit = two_bump\n\
                    bump_offset = 0.3\nout_dir = e3\n";
        let r = parse(text).unwrap();
        assert_eq!(r.simulation.variables, Variables::SelfSimilar);
        assert_eq!(r.simulation.splitting, Splitting::Lie);
        assert_eq!(r.simulation.remap, Remap::Bilinear);
        assert_eq!(r.simulation.record_every, 25);
        assert_eq!(
            r.init,
            InitialData::TwoBump {
                t0: 0.05,
                alpha: 2.0,
                d: 0.3
            }
        );
        assert_eq!(r.out_dir, Some(PathBuf::from("e3")));
    }

    #[test]
    fn snapshot_path_is_relative_to_config() {
        let r = parse_config_str(Path::new("/runs/a/run.cfg"), "L=1\nn=16\ndt=1\ninit=snapshot:w0.osn").unwrap();
        assert_eq!(r.init, InitialData::Snapshot(PathBuf::from("/runs/a/w0.osn")));
    }

    #[test]
    fn odd_n_is_rejected() {
        let m = message("L=12\nn=15\ndt=1e-3\n");
        assert!(m.contains("n even, ≥ 16"), "{m}");
        assert!(m.starts_with("run.cfg:2:"), "{m}");
    }

    #[test]
    fn duplicate_key_names_both_lines() {
        let m = message("L=12\nn=128\ndt=1e-3\n\ndt=2e-3\n");
        assert!(m.contains("duplicate key 'dt' on lines 3 and 5"), "{m}");
        assert!(m.starts_with("run.cfg:5:"), "{m}");
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(message("L=12\nn=128\ndt=1e-3\nnu=1\n").starts_with("run.cfg:4: unknown key 'nu'"));
        assert!(message("L=-1\nn=128\ndt=1\n").starts_with("run.cfg:1:"));
        assert!(message("L=1\nn=128\ndt=0\n").starts_with("run.cfg:3:"));
        assert!(message("L=1\nn=128\ndt=1\nt_start=2\nt_end=1\n").starts_with("run.cfg:5:"));
        assert!(message("L=1\nn=128\ndt=1\nsplitting=rk4\n").contains("lie|strang"));
        assert!(message("L=1\nn=128\ndt=abc\n").starts_with("run.cfg:3:"));
        assert!(message("L=1\nn=128\nrecord_every=0\ndt=1\n").starts_with("run.cfg:3:"));
        assert!(message("L=1\nn=128\ndt=1\nalpha=0\nvariables=self_similar\n").starts_with("run.cfg:4:"));
        assert!(message("L=1\nn=128\ndt=1\ninit=dirac\n").starts_with("run.cfg:4:"));
        assert!(message("L=1\njunk\n").starts_with("run.cfg:2:"));
        assert!(message("L=12\nn=128\n").contains("missing required key 'dt'"));
    }

    #[test]
    fn missing_file() {
        let e = parse_config("/nonexistent/run.cfg").unwrap_err();
        assert!(matches!(e, Error::Config { .. }));
    }
}
