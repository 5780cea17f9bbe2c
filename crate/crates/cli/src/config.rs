//! Run configuration: defaults, a flat `key = value` file, command-line
//! flags and `GRAPHNLS_OUT`, applied in that order of increasing priority.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;

use graphnls::GraphSpec;

pub const OUT_ENV: &str = "GRAPHNLS_OUT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub total_mass: f64,
    pub edges: usize,
    pub length: f64,
    pub points: usize,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            total_mass: 6.0,
            edges: 3,
            length: 30.0,
            points: 4096,
            dt: 1e-3,
            t_final: 1.0,
            seed: 42,
            out: PathBuf::from("."),
            format: Format::Csv,
        }
    }
}

/// Values given explicitly on the command line or in a file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub total_mass: Option<f64>,
    pub edges: Option<usize>,
    pub length: Option<f64>,
    pub points: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError(format!("line {line}: cannot parse {key} = {value:?}")))
}

impl Overrides {
    /// Parses `key = value` lines; `#` starts a comment. Keys match the long
    /// flag names (`t-final` and `t_final` are both accepted).
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut o = Overrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError(format!("line {line_no}: expected key = value")))?;
            let key = key.trim().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "mass" => o.total_mass = Some(parse_value(&key, value, line_no)?),
                "edges" => o.edges = Some(parse_value(&key, value, line_no)?),
                "length" => o.length = Some(parse_value(&key, value, line_no)?),
                "points" => o.points = Some(parse_value(&key, value, line_no)?),
                "dt" => o.dt = Some(parse_value(&key, value, line_no)?),
                "t_final" => o.t_final = Some(parse_value(&key, value, line_no)?),
                "seed" => o.seed = Some(parse_value(&key, value, line_no)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => {
                    o.format = Some(match value {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(ConfigError(format!("line {line_no}: format must be csv or json"))),
                    })
                }
                other => return Err(ConfigError(format!("line {line_no}: unknown key {other:?}"))),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = self.total_mass {
            c.total_mass = v;
        }
        if let Some(v) = self.edges {
            c.edges = v;
        }
        if let Some(v) = self.length {
            c.length = v;
        }
        if let Some(v) = self.points {
            c.points = v;
        }
        if let Some(v) = self.dt {
            c.dt = v;
        }
        if let Some(v) = self.t_final {
            c.t_final = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if let Some(v) = self.format {
            c.format = v;
        }
    }
}

impl RunConfig {
    /// Defaults, then the file, then the flags. `GRAPHNLS_OUT` replaces the
    /// output directory unless `--out` was given.
    pub fn resolve(
        file: Option<&Overrides>,
        flags: &Overrides,
        env_out: Option<PathBuf>,
    ) -> Result<Self, ConfigError> {
        let mut c = RunConfig::default();
        if let Some(f) = file {
            f.apply(&mut c);
        }
        if let Some(out) = env_out {
            c.out = out;
        }
        flags.apply(&mut c);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = [
            ("mass", self.total_mass),
            ("length", self.length),
            ("dt", self.dt),
            ("t-final", self.t_final),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(ConfigError(format!("{name} must be positive, got {v}")));
            }
        }
        if self.dt > self.t_final {
            return Err(ConfigError("dt must not exceed t-final".into()));
        }
        self.spec()?;
        Ok(())
    }

    pub fn spec(&self) -> Result<GraphSpec, ConfigError> {
        GraphSpec::new(self.edges, self.length, self.points).map_err(|e| ConfigError(e.to_string()))
    }

    /// `key=value` echo of everything that affects the numbers.
    pub fn echo(&self) -> String {
        format!(
            "mass={} edges={} length={} points={} dt={} t_final={} seed={} format={}",
            self.total_mass, self.edges, self.length, self.points, self.dt, self.t_final, self.seed, self.format
        )
    }
}

/// `a:b:n` (n evenly spaced values including both ends), `a,b,c`, or `a`.
pub fn parse_range(text: &str) -> Result<Vec<f64>, ConfigError> {
    let bad = || ConfigError(format!("cannot parse range {text:?}; use a:b:n or a,b,c"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        return match n {
            0 => Err(bad()),
            1 => Ok(vec![a]),
            _ => Ok((0..n)
                .map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
                .collect()),
        };
    }
    text.split(',').map(num).collect()
}
