use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;
use solenoid::group::Group;
use solenoid::twisted::{Algebra, Cocycle};
use solenoid::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Series {
    Eps,
    Spectral,
}

/// Every tunable knob. A `--config` JSON file fills the same fields; flags
/// given on the command line win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// Prime p
    #[arg(long, global = true)]
    pub p: Option<u64>,
    /// Rank d
    #[arg(long, global = true)]
    pub d: Option<usize>,
    /// Level n (truncation level, Fejér level or coarse level)
    #[arg(long, global = true)]
    pub n: Option<u32>,
    /// Proxy level m
    #[arg(long, global = true)]
    pub m: Option<u32>,
    /// Truncation radius R
    #[arg(long, global = true)]
    pub r: Option<f64>,
    /// Upper triangle of Θ, comma separated; entries are decimals or a/b
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<String>,
    /// Fejér order N
    #[arg(long = "N", global = true)]
    #[serde(rename = "N")]
    pub order: Option<u32>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long = "support-radius", global = true)]
    pub support_radius: Option<f64>,
    /// certified_lower or compressed
    #[arg(long, global = true)]
    pub mode: Option<String>,
    #[arg(long = "max-iter", global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Fejér orders for the convergence sweep, comma separated
    #[arg(long = "sweep-N", global = true, value_delimiter = ',')]
    #[serde(rename = "sweep_N")]
    pub sweep_n: Option<Vec<u32>>,
    /// Spectral comparison windows, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub window: Option<Vec<f64>>,
    /// Group element, e.g. 1/2,0
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub generator: Option<String>,
    /// Polynomial JSON file {"support": [{"g", "re", "im"}]}
    #[arg(long, global = true)]
    pub poly: Option<PathBuf>,
    /// trace, random:SEED or a state JSON file
    #[arg(long, global = true)]
    pub phi: Option<String>,
    #[arg(long, global = true)]
    pub psi: Option<String>,
    /// Also run the coset block comparison (lip)
    #[arg(long = "coset-check", global = true)]
    #[serde(default)]
    pub coset_check: bool,
    /// CSV series emitted by converge
    #[arg(long, global = true, value_enum)]
    pub series: Option<Series>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// JSON config file; command-line flags override its values
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
}

macro_rules! overlay {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field; } )*
    };
}

impl Params {
    /// Reads `--config` (if any) underneath the flags.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else {
            return Ok(self);
        };
        let file = read_config(&path)?;
        overlay!(self, file; p, d, n, m, r, theta, order, seed, format, tol, support_radius,
            mode, max_iter, samples, sweep_n, window, generator, poly, phi, psi, series);
        self.coset_check |= file.coset_check;
        Ok(self)
    }

    pub fn group(&self) -> Result<Group> {
        Group::new(self.p.unwrap_or(2), self.d.unwrap_or(2))
    }

    pub fn algebra(&self) -> Result<Algebra> {
        let group = self.group()?;
        let cocycle = match &self.theta {
            None => Cocycle::trivial(group.d()),
            Some(text) => parse_theta(group.d(), text)?,
        };
        Algebra::new(group, cocycle)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn radius(&self, default: f64) -> Result<f64> {
        positive("r", self.r.unwrap_or(default))
    }

    pub fn tol(&self, default: f64) -> Result<f64> {
        let t = self.tol.unwrap_or(default);
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid("tol must be a finite nonnegative number"));
        }
        Ok(t)
    }
}

pub fn positive(name: &str, v: f64) -> Result<f64> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::invalid(format!("{name} must be a positive finite number")));
    }
    Ok(v)
}

fn read_config(path: &Path) -> Result<Params> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::invalid(format!("config {} is not JSON: {e}", path.display())))?;
    // theta may be written as a number or a list in the file
    if let Some(t) = value.get_mut("theta") {
        *t = match t.take() {
            serde_json::Value::Number(x) => serde_json::Value::String(x.to_string()),
            serde_json::Value::Array(xs) => serde_json::Value::String(
                xs.iter()
                    .map(|x| x.as_str().map(str::to_string).unwrap_or_else(|| x.to_string()))
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            other => other,
        };
    }
    serde_json::from_value(value)
        .map_err(|e| Error::invalid(format!("bad config {}: {e}", path.display())))
}

/// `d(d-1)/2` comma-separated entries of the strict upper triangle. When
/// every entry is an integer or `a/b`, the cocycle uses exact phases.
pub fn parse_theta(d: usize, text: &str) -> Result<Cocycle> {
    let entries: Vec<&str> = text.split(',').map(str::trim).collect();
    let want = d * d.saturating_sub(1) / 2;
    if want == 0 {
        let zero = entries.iter().all(|e| e.parse::<f64>().is_ok_and(|v| v == 0.0));
        return if zero {
            Ok(Cocycle::trivial(d))
        } else {
            Err(Error::invalid("theta must be zero for d = 1"))
        };
    }
    if entries.len() != want {
        return Err(Error::invalid(format!(
            "theta needs {want} upper-triangle entries for d = {d}, got {}",
            entries.len()
        )));
    }
    let rational: Option<Vec<(i64, i64)>> = entries.iter().map(|e| parse_fraction(e)).collect();
    if let Some(upper) = rational {
        let mut full = vec![(0i64, 1i64); d * d];
        fill(d, &upper, &mut full, |(a, b)| (-a, b));
        return Cocycle::from_rational_matrix(d, &full);
    }
    let upper = entries
        .iter()
        .map(|e| {
            e.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid(format!("bad theta entry '{e}'")))
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut full = vec![0.0; d * d];
    fill(d, &upper, &mut full, |a| -a);
    Cocycle::from_matrix(d, &full)
}

fn fill<T: Copy>(d: usize, upper: &[T], full: &mut [T], neg: impl Fn(T) -> T) {
    let mut it = upper.iter();
    for j in 0..d {
        for k in j + 1..d {
            let v = *it.next().expect("length checked");
            full[j * d + k] = v;
            full[k * d + j] = neg(v);
        }
    }
}

fn parse_fraction(s: &str) -> Option<(i64, i64)> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse().ok()?, b.trim().parse::<i64>().ok()?);
            (b > 0).then_some((a, b))
        }
        None => Some((s.parse().ok()?, 1)),
    }
}
