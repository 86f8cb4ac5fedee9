//! Piecewise-constant control functions and the memory protocol presets.
//!
//! Times are in units of the reference inverse decay rate. Every control
//! (cavity decay `kappa`, coupling `g`, detunings) is right-open piecewise
//! constant: a switch instant belongs to the interval that starts there.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{param, Error, Result};

/// Piecewise-constant complex control value with ordered breakpoints.
///
/// `values[i]` holds on `[breakpoints[i-1], breakpoints[i])`, with the first
/// and last values extended to `-inf` and `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlSchedule {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

impl ControlSchedule {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::Schedule(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Schedule("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Schedule(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Self {
            breakpoints,
            values,
        })
    }

    /// Real-valued convenience constructor.
    pub fn real(breakpoints: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(breakpoints, values.iter().map(|&v| v.into()).collect())
    }

    pub fn constant(value: impl Into<Complex64>) -> Self {
        Self {
            breakpoints: Vec::new(),
            values: vec![value.into()],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value of the interval containing `t`.
    pub fn evaluate(&self, t: f64) -> Complex64 {
        let idx = self.breakpoints.partition_point(|&b| b <= t);
        self.values[idx]
    }

    /// Largest modulus over all intervals.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Gating strategy of a write/store/read experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Empty cavity whose decay rate is switched to a small storage value.
    QSwitch,
    /// Fixed detuning, cavity-oscillator coupling switched off during storage.
    CouplingGate,
    /// Fixed coupling, oscillator detuned by `+Delta_L` then `-Delta_L`.
    DetuningGate,
}

impl Strategy {
    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::QSwitch => "qswitch",
            Strategy::CouplingGate => "coupling_gate",
            Strategy::DetuningGate => "detuning_gate",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "qswitch" | "q_switch" => Ok(Strategy::QSwitch),
            "coupling_gate" => Ok(Strategy::CouplingGate),
            "detuning_gate" => Ok(Strategy::DetuningGate),
            _ => Err(Error::UnknownStrategy(s.to_string())),
        }
    }
}

/// Named physical parameters used to assemble a [`MemoryProtocol`].
///
/// Not every field is meaningful for every strategy: `kappa_s` only enters
/// the Q-switch, `delta_l` only the detuning gate, `g` and `gamma` only the
/// gated oscillator memories.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolParams {
    pub kappa: f64,
    pub kappa_s: f64,
    pub g: f64,
    pub gamma: f64,
    pub delta_l: f64,
    pub storage_time: f64,
    /// Defaults to `20 / (slowest decay rate during writing)`.
    pub write_horizon: Option<f64>,
    /// Defaults to the write horizon.
    pub read_horizon: Option<f64>,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            kappa_s: 0.0,
            g: 0.0,
            gamma: 0.0,
            delta_l: 0.0,
            storage_time: 0.0,
            write_horizon: None,
            read_horizon: None,
        }
    }
}

impl ProtocolParams {
    /// Coupling at critical damping, `g = (kappa - gamma) / 2`.
    pub fn critical_coupling(kappa: f64, gamma: f64) -> f64 {
        0.5 * (kappa - gamma)
    }
}

/// A full write/store/read experiment.
///
/// The write window is `[-write_horizon, 0]`, storage `[0, T]` and the read
/// window `[T, T + read_horizon]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryProtocol {
    pub strategy: Strategy,
    pub kappa: ControlSchedule,
    pub g: ControlSchedule,
    pub delta_cavity: ControlSchedule,
    pub delta_osc: ControlSchedule,
    pub gamma: f64,
    pub storage_time: f64,
    pub write_horizon: f64,
    pub read_horizon: f64,
    pub params: ProtocolParams,
}

impl MemoryProtocol {
    pub fn window(&self) -> (f64, f64) {
        (-self.write_horizon, self.storage_time + self.read_horizon)
    }

    /// Sorted union of all control breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut all: Vec<f64> = [&self.kappa, &self.g, &self.delta_cavity, &self.delta_osc]
            .iter()
            .flat_map(|s| s.breakpoints().iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
        all
    }

    /// Largest rate in the model, used for step-size guards.
    pub fn max_rate(&self) -> f64 {
        [
            self.kappa.max_abs(),
            self.g.max_abs(),
            self.delta_cavity.max_abs(),
            self.delta_osc.max_abs(),
            self.gamma,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Control values `(kappa, g, delta_cavity, delta_osc)` in force at `t`.
    pub fn controls_at(&self, t: f64) -> (f64, f64, f64, f64) {
        (
            self.kappa.evaluate(t).re,
            self.g.evaluate(t).re,
            self.delta_cavity.evaluate(t).re,
            self.delta_osc.evaluate(t).re,
        )
    }
}

/// Assembles one of the three preset protocols.
pub fn build_protocol(strategy: Strategy, params: &ProtocolParams) -> Result<MemoryProtocol> {
    let p = params;
    check_rate("kappa", p.kappa, false)?;
    check_rate("kappa_s", p.kappa_s, true)?;
    check_rate("g", p.g, true)?;
    check_rate("gamma", p.gamma, true)?;
    if !p.delta_l.is_finite() {
        return Err(param("delta_l", "must be finite"));
    }
    if !(p.storage_time.is_finite() && p.storage_time >= 0.0) {
        return Err(param(
            "storage_time",
            format!("must be >= 0, got {}", p.storage_time),
        ));
    }
    let t = p.storage_time;
    let stages = |write: f64, store: f64, read: f64| -> Result<ControlSchedule> {
        if t > 0.0 {
            ControlSchedule::real(vec![0.0, t], &[write, store, read])
        } else {
            Ok(ControlSchedule::constant(write))
        }
    };

    let (kappa, g, delta_osc, gamma) = match strategy {
        Strategy::QSwitch => (
            stages(p.kappa, p.kappa_s, p.kappa)?,
            ControlSchedule::constant(0.0),
            ControlSchedule::constant(0.0),
            p.gamma,
        ),
        Strategy::CouplingGate => (
            ControlSchedule::constant(p.kappa),
            stages(p.g, 0.0, p.g)?,
            ControlSchedule::constant(0.0),
            p.gamma,
        ),
        Strategy::DetuningGate => {
            if p.delta_l.abs() <= p.kappa.max(p.gamma) {
                log::warn!(
                    "detuning gate with |delta_l| = {} <= max(kappa, gamma) = {}; \
                     storage decoupling will be poor",
                    p.delta_l.abs(),
                    p.kappa.max(p.gamma)
                );
            }
            let delta = if t > 0.0 {
                ControlSchedule::real(vec![0.0, 0.5 * t, t], &[0.0, p.delta_l, -p.delta_l, 0.0])?
            } else {
                ControlSchedule::constant(0.0)
            };
            (
                ControlSchedule::constant(p.kappa),
                ControlSchedule::constant(p.g),
                delta,
                p.gamma,
            )
        }
    };

    let write_horizon = match p.write_horizon {
        Some(tw) if tw > 0.0 && tw.is_finite() => tw,
        Some(tw) => return Err(param("write_horizon", format!("must be > 0, got {tw}"))),
        None => 20.0 / slowest_write_rate(strategy, p),
    };
    let read_horizon = match p.read_horizon {
        Some(tr) if tr > 0.0 && tr.is_finite() => tr,
        Some(tr) => return Err(param("read_horizon", format!("must be > 0, got {tr}"))),
        None => write_horizon,
    };

    Ok(MemoryProtocol {
        strategy,
        kappa,
        g,
        delta_cavity: ControlSchedule::constant(0.0),
        delta_osc,
        gamma,
        storage_time: t,
        write_horizon,
        read_horizon,
        params: p.clone(),
    })
}

fn check_rate(name: &'static str, value: f64, allow_zero: bool) -> Result<()> {
    let ok = value.is_finite()
        && if allow_zero {
            value >= 0.0
        } else {
            value > 0.0
        };
    if ok {
        Ok(())
    } else {
        let bound = if allow_zero { ">= 0" } else { "> 0" };
        Err(param(name, format!("must be {bound}, got {value}")))
    }
}

/// Smallest positive real part among the write-stage eigenvalues of the
/// drift matrix. Falls back to `kappa` when the slow mode does not decay.
fn slowest_write_rate(strategy: Strategy, p: &ProtocolParams) -> f64 {
    if strategy == Strategy::QSwitch {
        return p.kappa;
    }
    let kp = 0.5 * (p.kappa + p.gamma);
    let km = 0.5 * (p.kappa - p.gamma);
    let m = Complex64::new(km * km - p.g * p.g, 0.0).sqrt();
    let rate = [kp + m.re, kp - m.re]
        .into_iter()
        .filter(|r| *r > 1e-9)
        .fold(f64::INFINITY, f64::min);
    if rate.is_finite() {
        rate
    } else {
        p.kappa
    }
}
