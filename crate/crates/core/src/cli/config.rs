//! Flat `key = value` scenario configs.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Numbers may carry a `pi` factor (`27pi`, `27*pi`, `pi`). Keys that are
//! not recognized are rejected so typos do not silently fall back to
//! defaults.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::fidelity::{Alphabet, McSettings};
use crate::schedule::{build_protocol, MemoryProtocol, ProtocolParams, Strategy};

/// Quantity varied by `sweep` (and by multi-curve presets).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    StorageTime,
    Gamma,
    KappaS,
    Coupling,
    DeltaL,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::StorageTime => "T",
            SweepVar::Gamma => "gamma",
            SweepVar::KappaS => "kappa_s",
            SweepVar::Coupling => "g",
            SweepVar::DeltaL => "delta_l",
        }
    }
}

impl FromStr for SweepVar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "T" | "t" | "storage_time" => Ok(SweepVar::StorageTime),
            "gamma" => Ok(SweepVar::Gamma),
            "kappa_s" => Ok(SweepVar::KappaS),
            "g" => Ok(SweepVar::Coupling),
            "delta_l" => Ok(SweepVar::DeltaL),
            other => Err(Error::Config(format!("unknown sweep variable `{other}`"))),
        }
    }
}

/// Table layout for `benchmark`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchmarkMode {
    /// Required `sqrt(eta)` and classical bound against `n_bar`.
    Thresholds,
    /// `F_2` and `F_3` against `eta`.
    Arbitrary,
    /// Classical-benchmark comparison for the configured alphabet at `eta`.
    Table,
}

impl FromStr for BenchmarkMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "fig3" | "thresholds" => Ok(BenchmarkMode::Thresholds),
            "fig4" | "arbitrary" => Ok(BenchmarkMode::Arbitrary),
            "table" => Ok(BenchmarkMode::Table),
            other => Err(Error::Config(format!("unknown benchmark mode `{other}`"))),
        }
    }
}

/// Everything a subcommand needs, physical and numerical.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub label: String,
    pub strategy: Strategy,
    pub params: ProtocolParams,
    /// Resolve `g` to `(kappa - gamma) / 2` after all keys are applied.
    pub g_critical: bool,
    pub n_bar: f64,
    pub n_max: usize,
    pub alphabet_kind: AlphabetKind,
    pub dt: Option<f64>,
    pub mc_samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub benchmark_mode: BenchmarkMode,
    pub sweep: Option<SweepVar>,
    pub values: Option<Vec<f64>>,
    /// Reported values to compare measured efficiencies against, aligned
    /// with `values` (or a single entry for one run).
    pub reference: Vec<f64>,
    pub csv_stride: Option<usize>,
    pub laguerre_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphabetKind {
    Coherent,
    Bounded,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            label: "scenario".into(),
            strategy: Strategy::CouplingGate,
            params: ProtocolParams::default(),
            g_critical: false,
            n_bar: 20.0,
            n_max: 2,
            alphabet_kind: AlphabetKind::Coherent,
            dt: None,
            mc_samples: McSettings::default().samples,
            seed: McSettings::default().seed,
            out: None,
            benchmark_mode: BenchmarkMode::Table,
            sweep: None,
            values: None,
            reference: Vec::new(),
            csv_stride: None,
            laguerre_count: 0,
        }
    }
}

/// Parses a real number, allowing a `pi` factor.
pub fn parse_real(s: &str) -> Result<f64> {
    let t = s.trim();
    let bad = || Error::Config(format!("cannot parse number `{s}`"));
    let lower = t.to_ascii_lowercase();
    if let Some(head) = lower.strip_suffix("pi") {
        let head = head.trim().trim_end_matches('*').trim();
        let factor = if head.is_empty() {
            1.0
        } else if head == "-" {
            -1.0
        } else {
            head.parse::<f64>().map_err(|_| bad())?
        };
        return Ok(factor * PI);
    }
    t.parse::<f64>().map_err(|_| bad())
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(parse_real)
        .collect()
}

/// `start:stop:count`, inclusive of both ends.
fn parse_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(Error::Config(format!(
            "range must be start:stop:count, got `{s}`"
        )));
    };
    let (start, stop) = (parse_real(start)?, parse_real(stop)?);
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("bad range count in `{s}`")))?;
    Ok(match count {
        0 => Vec::new(),
        1 => vec![start],
        n => (0..n)
            .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
            .collect(),
    })
}

fn parse_int<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` expects an integer, got `{value}`")))
}

impl ScenarioConfig {
    /// Applies one `key = value` assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value.trim();
        let p = &mut self.params;
        match key.trim() {
            "label" | "name" => self.label = v.to_string(),
            "strategy" => self.strategy = v.parse()?,
            "kappa" => p.kappa = parse_real(v)?,
            "kappa_s" => p.kappa_s = parse_real(v)?,
            "g" => {
                if v.eq_ignore_ascii_case("critical") {
                    self.g_critical = true;
                } else {
                    self.g_critical = false;
                    p.g = parse_real(v)?;
                }
            }
            "gamma" => p.gamma = parse_real(v)?,
            "delta_l" => p.delta_l = parse_real(v)?,
            "T" | "storage_time" => p.storage_time = parse_real(v)?,
            "t_w" | "write_horizon" => p.write_horizon = Some(parse_real(v)?),
            "read_horizon" | "t_r" => p.read_horizon = Some(parse_real(v)?),
            "n_bar" => self.n_bar = parse_real(v)?,
            "n_max" | "n_m" => self.n_max = parse_int(key, v)?,
            "alphabet" => {
                self.alphabet_kind = match v {
                    "coherent" | "coherent_gaussian" => AlphabetKind::Coherent,
                    "bounded" | "bounded_arbitrary" => AlphabetKind::Bounded,
                    other => return Err(Error::Config(format!("unknown alphabet `{other}`"))),
                }
            }
            "dt" => self.dt = Some(parse_real(v)?),
            "mc_samples" => self.mc_samples = parse_int(key, v)?,
            "seed" => self.seed = parse_int(key, v)?,
            "out" => self.out = Some(PathBuf::from(v)),
            "mode" => self.benchmark_mode = v.parse()?,
            "sweep" => self.sweep = Some(v.parse()?),
            "values" => self.values = Some(parse_list(v)?),
            "range" => self.values = Some(parse_range(v)?),
            "reference" => self.reference = parse_list(v)?,
            "csv_stride" => self.csv_stride = Some(parse_int(key, v)?),
            "laguerre_count" => self.laguerre_count = parse_int(key, v)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies every assignment in a config file body.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got `{raw}`",
                    lineno + 1
                )));
            };
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Physical parameters with `g = critical` resolved.
    pub fn resolved_params(&self) -> ProtocolParams {
        let mut p = self.params.clone();
        if self.g_critical {
            p.g = ProtocolParams::critical_coupling(p.kappa, p.gamma);
        }
        p
    }

    pub fn protocol(&self) -> Result<MemoryProtocol> {
        build_protocol(self.strategy, &self.resolved_params())
    }

    /// Copy with the sweep variable set to `value`.
    pub fn with_sweep_value(&self, var: SweepVar, value: f64) -> Self {
        let mut c = self.clone();
        let p = &mut c.params;
        match var {
            SweepVar::StorageTime => p.storage_time = value,
            SweepVar::Gamma => p.gamma = value,
            SweepVar::KappaS => p.kappa_s = value,
            SweepVar::Coupling => {
                c.g_critical = false;
                p.g = value;
            }
            SweepVar::DeltaL => p.delta_l = value,
        }
        c
    }

    pub fn alphabet(&self) -> Alphabet {
        match self.alphabet_kind {
            AlphabetKind::Coherent => Alphabet::CoherentGaussian { n_bar: self.n_bar },
            AlphabetKind::Bounded => Alphabet::BoundedArbitrary { n_max: self.n_max },
        }
    }

    pub fn mc(&self) -> McSettings {
        McSettings {
            samples: self.mc_samples,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_config() {
        let cfg = ScenarioConfig::parse(
            "# detuning gate\nstrategy = detuning_gate\nkappa = 4\n\ngamma = 0.01 # loss\n\
             g = critical\ndelta_l = 27pi\nT = 4\nsweep = T\nvalues = 4, 8,15\n",
        )
        .unwrap();
        assert_eq!(cfg.strategy, Strategy::DetuningGate);
        assert!((cfg.params.delta_l - 27.0 * PI).abs() < 1e-12);
        assert!((cfg.resolved_params().g - 1.995).abs() < 1e-12);
        assert_eq!(cfg.values, Some(vec![4.0, 8.0, 15.0]));
        assert_eq!(cfg.sweep, Some(SweepVar::StorageTime));
    }

    #[test]
    fn pi_forms() {
        assert_eq!(parse_real("pi").unwrap(), PI);
        assert_eq!(parse_real("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_real("-pi").unwrap(), -PI);
        assert!(parse_real("pie").is_err());
    }

    #[test]
    fn ranges() {
        let mut c = ScenarioConfig::default();
        c.set("range", "0:1:5").unwrap();
        assert_eq!(c.values, Some(vec![0.0, 0.25, 0.5, 0.75, 1.0]));
        c.set("range", "0:1:0").unwrap();
        assert_eq!(c.values, Some(vec![]));
        c.set("values", "").unwrap();
        assert_eq!(c.values, Some(vec![]));
        assert!(c.set("range", "0:1").is_err());
    }

    #[test]
    fn rejects_unknown_keys_and_lines() {
        assert!(ScenarioConfig::parse("kapa = 3").is_err());
        assert!(ScenarioConfig::parse("kappa 3").is_err());
        assert!(ScenarioConfig::parse("strategy = warp").is_err());
    }

    #[test]
    fn sweep_override_clears_critical() {
        let mut c = ScenarioConfig::parse("g = critical\nkappa = 4").unwrap();
        let swept = c.with_sweep_value(SweepVar::Coupling, 1.0);
        assert!(!swept.g_critical);
        assert_eq!(swept.resolved_params().g, 1.0);
        c.set("gamma", "0.2").unwrap();
        assert!((c.resolved_params().g - 1.9).abs() < 1e-15);
    }
}
