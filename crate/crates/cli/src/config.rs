//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Every key is
//! optional; missing keys take the defaults of [`RunConfig::default`].

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use landau_core::exact::{BkwParams, ShellParams};
use landau_core::integrator::TimeConfig;
use landau_core::{CutoffShape, GridSpec, Padding};

use crate::error::{CliError, Result};

pub const KEYS: [&str; 19] = [
    "L",
    "P",
    "gamma",
    "R",
    "padding",
    "oversample",
    "cutoff_shape",
    "dt",
    "t_end",
    "sample_every",
    "init",
    "bkw_amplitude",
    "bkw_rate",
    "shell_sigma",
    "shell_sharpness",
    "output_dir",
    "snapshot_every",
    "threads",
    "kernel_cache",
];

#[derive(Debug, Clone, PartialEq)]
pub enum InitSpec {
    Bkw,
    Shell,
    File(PathBuf),
}

impl InitSpec {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "bkw" => Some(InitSpec::Bkw),
            "shell" => Some(InitSpec::Shell),
            _ => s
                .strip_prefix("file:")
                .filter(|p| !p.is_empty())
                .map(|p| InitSpec::File(PathBuf::from(p))),
        }
    }

    fn render(&self) -> String {
        match self {
            InitSpec::Bkw => "bkw".into(),
            InitSpec::Shell => "shell".into(),
            InitSpec::File(p) => format!("file:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub half_width: f64,
    pub points: usize,
    pub gamma: f64,
    /// `None` means `R = L`.
    pub cutoff_radius: Option<f64>,
    pub padding: Padding,
    pub oversample: usize,
    pub cutoff_shape: CutoffShape,
    pub dt: f64,
    pub t_end: f64,
    pub sample_every: usize,
    pub init: InitSpec,
    pub bkw: BkwParams,
    pub shell: ShellParams,
    pub output_dir: PathBuf,
    pub snapshot_every: usize,
    pub threads: usize,
    pub kernel_cache: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            half_width: 1.8,
            points: 32,
            gamma: -3.0,
            cutoff_radius: None,
            padding: Padding::Exact,
            oversample: 2,
            cutoff_shape: CutoffShape::Paper,
            dt: 0.05,
            t_end: 5.0,
            sample_every: 1,
            init: InitSpec::Shell,
            bkw: BkwParams::default(),
            shell: ShellParams::default(),
            output_dir: PathBuf::from("out"),
            snapshot_every: 0,
            threads: 0,
            kernel_cache: None,
        }
    }
}

fn number<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| CliError::Config {
        line,
        msg: format!("cannot parse value '{value}' for key '{key}'"),
    })
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(CliError::Config {
                    line,
                    msg: format!("expected 'key = value', got '{trimmed}'"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Config {
                    line,
                    msg: format!("unknown key '{key}'"),
                });
            }
            if !seen.insert(key.to_string()) {
                return Err(CliError::Config {
                    line,
                    msg: format!("duplicate key '{key}'"),
                });
            }
            cfg.set(line, key, value)?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| CliError::Config {
            line,
            msg: format!("invalid value '{value}' for key '{key}': expected {what}"),
        };
        match key {
            "L" => self.half_width = number(line, key, value)?,
            "P" => self.points = number(line, key, value)?,
            "gamma" => self.gamma = number(line, key, value)?,
            "R" => self.cutoff_radius = Some(number(line, key, value)?),
            "padding" => {
                self.padding = Padding::parse(value).ok_or_else(|| bad("exact or aliased"))?
            }
            "oversample" => self.oversample = number(line, key, value)?,
            "cutoff_shape" => {
                self.cutoff_shape =
                    CutoffShape::parse(value).ok_or_else(|| bad("paper, smooth or none"))?
            }
            "dt" => self.dt = number(line, key, value)?,
            "t_end" => self.t_end = number(line, key, value)?,
            "sample_every" => self.sample_every = number(line, key, value)?,
            "init" => {
                self.init =
                    InitSpec::parse(value).ok_or_else(|| bad("bkw, shell or file:<path>"))?
            }
            "bkw_amplitude" => self.bkw.amplitude = number(line, key, value)?,
            "bkw_rate" => self.bkw.rate = number(line, key, value)?,
            "shell_sigma" => self.shell.sigma = number(line, key, value)?,
            "shell_sharpness" => self.shell.sharpness = number(line, key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "snapshot_every" => self.snapshot_every = number(line, key, value)?,
            "threads" => self.threads = number(line, key, value)?,
            "kernel_cache" => {
                self.kernel_cache = match value {
                    "none" => None,
                    p => Some(PathBuf::from(p)),
                }
            }
            _ => unreachable!("key list checked by the caller"),
        }
        Ok(())
    }

    /// Text form accepted by [`RunConfig::parse`]; `R` is omitted when it
    /// defaults to `L`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("L", self.half_width.to_string());
        put("P", self.points.to_string());
        put("gamma", self.gamma.to_string());
        if let Some(r) = self.cutoff_radius {
            put("R", r.to_string());
        }
        put("padding", self.padding.as_str().into());
        put("oversample", self.oversample.to_string());
        put("cutoff_shape", self.cutoff_shape.as_str().into());
        put("dt", self.dt.to_string());
        put("t_end", self.t_end.to_string());
        put("sample_every", self.sample_every.to_string());
        put("init", self.init.render());
        put("bkw_amplitude", self.bkw.amplitude.to_string());
        put("bkw_rate", self.bkw.rate.to_string());
        put("shell_sigma", self.shell.sigma.to_string());
        put("shell_sharpness", self.shell.sharpness.to_string());
        put("output_dir", self.output_dir.display().to_string());
        put("snapshot_every", self.snapshot_every.to_string());
        put("threads", self.threads.to_string());
        put(
            "kernel_cache",
            self.kernel_cache
                .as_ref()
                .map_or("none".into(), |p| p.display().to_string()),
        );
        out
    }

    pub fn grid(&self) -> Result<GridSpec> {
        let grid = GridSpec::new(self.half_width, self.points, self.gamma)?
            .with_cutoff_radius(self.cutoff_radius.unwrap_or(self.half_width))
            .with_padding(self.padding)
            .with_oversample(self.oversample)
            .with_cutoff_shape(self.cutoff_shape);
        grid.validate()?;
        Ok(grid)
    }

    pub fn time(&self) -> Result<TimeConfig> {
        Ok(TimeConfig::new(self.dt, self.t_end, self.sample_every)?)
    }

    /// Check every component against its module preconditions.
    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.time()?;
        match self.init {
            InitSpec::Bkw => self.bkw.validate()?,
            InitSpec::Shell => {
                ShellParams::new(self.shell.sigma, self.shell.sharpness)?;
            }
            InitSpec::File(_) => {}
        }
        Ok(())
    }

    /// BKW is an exact solution only for Maxwellian molecules.
    pub fn has_exact_solution(&self) -> bool {
        self.init == InitSpec::Bkw && self.gamma == 0.0
    }
}
