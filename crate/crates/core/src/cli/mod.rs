//! Command-line front end: `simulate`, `benchmark`, `sweep` and `modes`.
//!
//! Each subcommand resolves a [`ScenarioConfig`] from (in order) a
//! `--preset`, a `--config` file, `--set key=value` overrides and the
//! dedicated flags, then writes plot-ready CSV. With `--out <prefix>` the
//! tables go to `<prefix>*.csv` and summaries to stdout; without it the
//! tables go to stdout and summaries to stderr.
//!
//! Exit codes: 0 success, 2 usage or config error, 3 numerical guard.

pub mod config;
pub mod presets;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

pub use config::{AlphabetKind, BenchmarkMode, ScenarioConfig, SweepVar};
pub use presets::{preset, PRESET_NAMES};

use crate::dynamics::{
    analytic_efficiency, default_step, measured_retrieval, optimal_input_mode, simulation_grid,
    Retrieval,
};
use crate::error::{Error, Result};
use crate::fidelity::{
    arb_avg_fidelity, benchmark, classical_bound_arbitrary, classical_bound_coherent,
    coherent_avg_fidelity, threshold_efficiency,
};
use crate::modes::{laguerre_input_mode, time_reverse, TemporalMode, TimeGrid};

/// Tolerance for calling a measured efficiency consistent with a value
/// quoted to two decimals.
pub const REFERENCE_TOLERANCE: f64 = 0.005;

const MAX_AUTO_ROWS: usize = 5000;

#[derive(Debug, Parser)]
#[command(name = "qmem", version, about = "Dynamical quantum memory simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Time series of one or more write/store/read runs.
    Simulate(CommonArgs),
    /// Fidelity thresholds and benchmark tables.
    Benchmark(CommonArgs),
    /// Efficiency and fidelity against a swept parameter.
    Sweep(CommonArgs),
    /// Dump the input and time-reversed output mode functions.
    Modes(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// fig3 | fig4 | fig5 | fig6 | fig7 | fig8 | fig9
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path prefix.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step (default `min(1e-3, 1e-2 / max rate)`).
    #[arg(long)]
    dt: Option<f64>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long = "mc-samples")]
    mc_samples: Option<usize>,
    /// Extra `key=value` assignments, applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl CommonArgs {
    fn resolve(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.preset {
            Some(name) => preset(name)?,
            None => ScenarioConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k, v)?;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(dt) = self.dt {
            cfg.dt = Some(dt);
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(n) = self.mc_samples {
            cfg.mc_samples = n;
        }
        Ok(cfg)
    }
}

/// Exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numerical(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    let (args, which) = match &cli.command {
        Command::Simulate(a) => (a, "simulate"),
        Command::Benchmark(a) => (a, "benchmark"),
        Command::Sweep(a) => (a, "sweep"),
        Command::Modes(a) => (a, "modes"),
    };
    let cfg = args.resolve()?;
    let to_file = cfg.out.is_some();
    let stdout = io::stdout();
    let stderr = io::stderr();
    let mut summary: Box<dyn Write> = if to_file {
        Box::new(stdout.lock())
    } else {
        Box::new(stderr.lock())
    };
    match which {
        "simulate" => cmd_simulate(&cfg, &mut summary).map(drop),
        "benchmark" => cmd_benchmark(&cfg, &mut summary).map(drop),
        "sweep" => cmd_sweep(&cfg, &mut summary).map(drop),
        _ => cmd_modes(&cfg, &mut summary).map(drop),
    }
}

/// Formats a float with 12 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.11e}")
}

fn open_table(cfg: &ScenarioConfig, suffix: &str) -> Result<Box<dyn Write>> {
    match &cfg.out {
        Some(prefix) => {
            let mut name = prefix.as_os_str().to_owned();
            name.push(suffix);
            name.push(".csv");
            let path = PathBuf::from(name);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            Ok(Box::new(BufWriter::new(File::create(path)?)))
        }
        None => Ok(Box::new(io::stdout())),
    }
}

fn write_row(w: &mut dyn Write, cells: &[String]) -> Result<()> {
    writeln!(w, "{}", cells.join(","))?;
    Ok(())
}

fn num_row(w: &mut dyn Write, cells: &[f64]) -> Result<()> {
    let s: Vec<String> = cells.iter().map(|&x| fmt_num(x)).collect();
    write_row(w, &s)
}

/// Runs `f` on a pool capped by `QMEM_THREADS` when set.
fn with_pool<R: Send>(f: impl FnOnce() -> R + Send) -> Result<R> {
    match std::env::var("QMEM_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Config(format!("thread pool: {e}"))),
        _ => Ok(f()),
    }
}

/// Measured and analytic efficiency of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub label: String,
    pub measured: f64,
    pub analytic: f64,
    pub phase: f64,
    pub reference: Option<f64>,
}

impl RunSummary {
    fn line(&self, cfg: &ScenarioConfig) -> String {
        let p = cfg.resolved_params();
        let mut s = format!(
            "{}: strategy={} kappa={} g={} gamma={} T={} measured_sqrt_eta={:.6} \
             analytic_sqrt_eta={:.6} diff={:+.2e} phase={:+.2e}",
            self.label,
            cfg.strategy,
            p.kappa,
            p.g,
            p.gamma,
            p.storage_time,
            self.measured,
            self.analytic,
            self.measured - self.analytic,
            self.phase,
        );
        if let Some(r) = self.reference {
            s.push_str(&format!(
                " reference={r} flag={}",
                flag(self.measured, Some(r))
            ));
        }
        s
    }
}

fn flag(measured: f64, reference: Option<f64>) -> &'static str {
    match reference {
        Some(r) if (measured - r).abs() <= REFERENCE_TOLERANCE => "agrees",
        Some(_) => "discrepant",
        None => "",
    }
}

fn scenario_runs(cfg: &ScenarioConfig) -> Vec<(String, ScenarioConfig, Option<f64>)> {
    match (cfg.sweep, &cfg.values) {
        (Some(var), Some(values)) => values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                (
                    format!("_{}{}", var.name(), v),
                    cfg.with_sweep_value(var, v),
                    cfg.reference.get(i).copied(),
                )
            })
            .collect(),
        _ => vec![(String::new(), cfg.clone(), cfg.reference.first().copied())],
    }
}

fn retrieve(cfg: &ScenarioConfig) -> Result<(Retrieval, f64)> {
    let protocol = cfg.protocol()?;
    let dt = cfg.dt.unwrap_or_else(|| default_step(&protocol));
    Ok((
        measured_retrieval(&protocol, dt)?,
        analytic_efficiency(&protocol),
    ))
}

/// Writes the time series of every run and one summary line per run.
pub fn cmd_simulate(cfg: &ScenarioConfig, summary: &mut dyn Write) -> Result<Vec<RunSummary>> {
    let mut out = Vec::new();
    for (suffix, run_cfg, reference) in scenario_runs(cfg) {
        let (r, analytic) = retrieve(&run_cfg)?;
        let sim = &r.simulation;
        let stride = run_cfg
            .csv_stride
            .unwrap_or_else(|| sim.grid.len().div_ceil(MAX_AUTO_ROWS))
            .max(1);
        let mut w = open_table(cfg, &suffix)?;
        write_row(
            &mut w,
            &[
                "t", "re_in", "im_in", "re_a", "im_a", "re_b", "im_b", "re_out", "im_out",
                "abs_in", "abs_a", "abs_b", "abs_out",
            ]
            .map(String::from),
        )?;
        let last = sim.grid.len() - 1;
        for i in (0..sim.grid.len()).filter(|i| i % stride == 0 || *i == last) {
            let (inp, a, b, o) = (
                sim.input_series[i],
                sim.a_series[i],
                sim.b_series[i],
                sim.output_series[i],
            );
            num_row(
                &mut w,
                &[
                    sim.grid.time(i),
                    inp.re,
                    inp.im,
                    a.re,
                    a.im,
                    b.re,
                    b.im,
                    o.re,
                    o.im,
                    inp.norm(),
                    a.norm(),
                    b.norm(),
                    o.norm(),
                ],
            )?;
        }
        w.flush()?;
        let s = RunSummary {
            label: format!("{}{}", cfg.label, suffix),
            measured: r.sqrt_eta(),
            analytic,
            phase: r.phase(),
            reference,
        };
        writeln!(summary, "{}", s.line(&run_cfg))?;
        out.push(s);
    }
    Ok(out)
}

/// One row of a sweep table.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub analytic: f64,
    pub measured: f64,
    pub phase: f64,
    pub avg_fidelity: f64,
    pub classical_bound: f64,
    pub is_quantum: bool,
    pub reference: Option<f64>,
}

/// Efficiency and coherent-alphabet fidelity for each swept value. Rows may
/// be computed concurrently and are written in sweep order.
pub fn cmd_sweep(cfg: &ScenarioConfig, summary: &mut dyn Write) -> Result<Vec<SweepRow>> {
    let var = cfg
        .sweep
        .ok_or_else(|| Error::Config("sweep needs `sweep = <T|gamma|kappa_s|g|delta_l>`".into()))?;
    let values = cfg.values.clone().unwrap_or_default();
    let rows: Vec<Result<SweepRow>> = with_pool(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let run = cfg.with_sweep_value(var, v);
                let (r, analytic) = retrieve(&run)?;
                let measured = r.sqrt_eta();
                let fid = coherent_avg_fidelity(measured * measured, cfg.n_bar);
                let bound = classical_bound_coherent(cfg.n_bar);
                Ok(SweepRow {
                    value: v,
                    analytic,
                    measured,
                    phase: r.phase(),
                    avg_fidelity: fid,
                    classical_bound: bound,
                    is_quantum: fid > bound,
                    reference: cfg.reference.get(i).copied(),
                })
            })
            .collect()
    })?;
    let rows: Vec<SweepRow> = rows.into_iter().collect::<Result<_>>()?;

    let mut w = open_table(cfg, "")?;
    write_row(
        &mut w,
        &[
            var.name(),
            "analytic_sqrt_eta",
            "measured_sqrt_eta",
            "diff",
            "phase",
            "avg_fidelity",
            "classical_bound",
            "verdict",
            "reference",
            "flag",
        ]
        .map(String::from),
    )?;
    for r in &rows {
        write_row(
            &mut w,
            &[
                fmt_num(r.value),
                fmt_num(r.analytic),
                fmt_num(r.measured),
                fmt_num(r.measured - r.analytic),
                fmt_num(r.phase),
                fmt_num(r.avg_fidelity),
                fmt_num(r.classical_bound),
                verdict(r.is_quantum).to_string(),
                r.reference.map(fmt_num).unwrap_or_default(),
                flag(r.measured, r.reference).to_string(),
            ],
        )?;
    }
    w.flush()?;
    for r in &rows {
        writeln!(
            summary,
            "{}: {}={} measured_sqrt_eta={:.6} analytic_sqrt_eta={:.6} diff={:+.2e} \
             F={:.4} bound={:.4} {}{}",
            cfg.label,
            var.name(),
            r.value,
            r.measured,
            r.analytic,
            r.measured - r.analytic,
            r.avg_fidelity,
            r.classical_bound,
            verdict(r.is_quantum),
            r.reference
                .map(|x| format!(" reference={x} flag={}", flag(r.measured, Some(x))))
                .unwrap_or_default(),
        )?;
    }
    Ok(rows)
}

fn verdict(q: bool) -> &'static str {
    if q {
        "quantum"
    } else {
        "classical"
    }
}

/// Writes a benchmark table; returns the numeric rows as written.
pub fn cmd_benchmark(cfg: &ScenarioConfig, summary: &mut dyn Write) -> Result<Vec<Vec<f64>>> {
    let mut w = open_table(cfg, "")?;
    let mut rows = Vec::new();
    match cfg.benchmark_mode {
        BenchmarkMode::Thresholds => {
            let values = cfg
                .values
                .clone()
                .unwrap_or_else(|| (1..=500).map(|i| i as f64 / 10.0).collect());
            write_row(
                &mut w,
                &["n_bar", "threshold_sqrt_eta", "classical_bound"].map(String::from),
            )?;
            for n_bar in values {
                let row = vec![
                    n_bar,
                    threshold_efficiency(n_bar),
                    classical_bound_coherent(n_bar),
                ];
                num_row(&mut w, &row)?;
                rows.push(row);
            }
        }
        BenchmarkMode::Arbitrary => {
            let values = cfg
                .values
                .clone()
                .unwrap_or_else(|| (0..=100).map(|i| i as f64 / 100.0).collect());
            write_row(
                &mut w,
                &["eta", "f2", "f3", "bound2", "bound3"].map(String::from),
            )?;
            for eta in values {
                let row = vec![
                    eta,
                    arb_avg_fidelity(eta, 2)?,
                    arb_avg_fidelity(eta, 3)?,
                    classical_bound_arbitrary(2),
                    classical_bound_arbitrary(3),
                ];
                num_row(&mut w, &row)?;
                rows.push(row);
            }
        }
        BenchmarkMode::Table => {
            let values = cfg
                .values
                .clone()
                .unwrap_or_else(|| (0..=20).map(|i| i as f64 / 20.0).collect());
            let alphabet = cfg.alphabet();
            write_row(
                &mut w,
                &[
                    "eta",
                    "avg_fidelity",
                    "classical_bound",
                    "verdict",
                    "mc_stderr",
                ]
                .map(String::from),
            )?;
            let results: Vec<_> = with_pool(|| {
                values
                    .par_iter()
                    .map(|&eta| benchmark(eta, alphabet, cfg.mc()))
                    .collect::<Vec<_>>()
            })?;
            for (eta, res) in values.iter().zip(results) {
                let b = res?;
                write_row(
                    &mut w,
                    &[
                        fmt_num(*eta),
                        fmt_num(b.avg_fidelity),
                        fmt_num(b.classical_bound),
                        verdict(b.is_quantum).to_string(),
                        b.mc_stderr.map(fmt_num).unwrap_or_default(),
                    ],
                )?;
                rows.push(vec![
                    *eta,
                    b.avg_fidelity,
                    b.classical_bound,
                    f64::from(u8::from(b.is_quantum)),
                ]);
            }
        }
    }
    w.flush()?;
    writeln!(summary, "{}: {} benchmark rows", cfg.label, rows.len())?;
    Ok(rows)
}

fn write_mode(
    cfg: &ScenarioConfig,
    suffix: &str,
    mode: &TemporalMode,
    window: (f64, f64),
) -> Result<usize> {
    let mut w = open_table(cfg, suffix)?;
    write_row(&mut w, &["t", "re", "im"].map(String::from))?;
    let grid = mode.grid();
    let mut n = 0;
    for i in grid.index_range(window.0, window.1) {
        let u = mode.samples()[i];
        num_row(&mut w, &[grid.time(i), u.re, u.im])?;
        n += 1;
    }
    w.flush()?;
    Ok(n)
}

/// Writes the optimal input mode over the write window and its time reverse
/// over the read window, plus `laguerre_count` Laguerre past-time modes.
pub fn cmd_modes(cfg: &ScenarioConfig, summary: &mut dyn Write) -> Result<Vec<TemporalMode>> {
    let protocol = cfg.protocol()?;
    let dt = cfg.dt.unwrap_or_else(|| default_step(&protocol));
    let grid = simulation_grid(&protocol, dt)?;
    let (lo, hi) = (grid.t_start(), grid.t_end());
    let t = protocol.storage_time;
    let u_in = optimal_input_mode(&protocol, &grid)?;
    let u_out = time_reverse(&u_in, t).resample(&grid);
    let n_in = write_mode(cfg, "_in", &u_in, (lo, 0.0))?;
    let n_out = write_mode(cfg, "_out", &u_out, (t, hi))?;
    let mut modes = vec![u_in, u_out];
    if cfg.laguerre_count > 0 {
        let kappa = protocol.kappa.evaluate(lo).re;
        let steps = (-lo / grid.dt()).round() as usize;
        let past = TimeGrid::new(lo, 0.0, steps + 1)?;
        for n in 0..cfg.laguerre_count {
            let u = laguerre_input_mode(n, kappa, &past)?;
            write_mode(cfg, &format!("_laguerre{n}"), &u, (lo, 0.0))?;
            modes.push(u);
        }
    }
    let norm_in = modes[0].norm_sq();
    writeln!(
        summary,
        "{}: input mode {n_in} rows (norm {norm_in:.9}), output mode {n_out} rows, {} laguerre modes",
        cfg.label, cfg.laguerre_count
    )?;
    Ok(modes)
}
