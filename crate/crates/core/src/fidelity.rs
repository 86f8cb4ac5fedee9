//! Average-fidelity benchmarks for a beam-splitter memory.
//!
//! All functions take the transmission `eta` (the memory efficiency
//! `eta_M`, not its square root). Closed forms are cross-checked by Monte
//! Carlo estimators that push sampled input states through the Fock-space
//! loss channel.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::fock::{loss_fidelity, PureState};

/// Input alphabet over which fidelities are averaged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alphabet {
    /// Coherent states with Gaussian weight `exp(-|alpha|^2 / n_bar) / (pi n_bar)`.
    CoherentGaussian { n_bar: f64 },
    /// Haar-uniform pure states with at most `n_max - 1` photons.
    BoundedArbitrary { n_max: usize },
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alphabet::CoherentGaussian { n_bar } => write!(f, "coherent_gaussian(n_bar={n_bar})"),
            Alphabet::BoundedArbitrary { n_max } => write!(f, "bounded_arbitrary(n_max={n_max})"),
        }
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(param("eta", format!("must lie in [0, 1], got {eta}")))
    }
}

/// `F = 1 / (1 + n_bar (1 - sqrt(eta))^2)` for Gaussian-weighted coherent inputs.
pub fn coherent_avg_fidelity(eta: f64, n_bar: f64) -> f64 {
    let loss = 1.0 - eta.sqrt();
    1.0 / (1.0 + n_bar * loss * loss)
}

/// Best classical fidelity for the coherent alphabet, `(1 + n_bar) / (2 n_bar + 1)`.
pub fn classical_bound_coherent(n_bar: f64) -> f64 {
    (1.0 + n_bar) / (2.0 * n_bar + 1.0)
}

/// Smallest `sqrt(eta)` that beats the coherent classical bound,
/// `1 - 1 / sqrt(n_bar + 1)`.
pub fn threshold_efficiency(n_bar: f64) -> f64 {
    1.0 - 1.0 / (n_bar + 1.0).sqrt()
}

/// Closed-form average fidelity over Haar-random states with `n_max` levels.
/// Only `n_max` of 2 and 3 have one; otherwise use [`mc_avg_fidelity`].
pub fn arb_avg_fidelity(eta: f64, n_max: usize) -> Result<f64> {
    let s = eta.sqrt();
    match n_max {
        2 => Ok((eta + 2.0 * s + 3.0) / 6.0),
        3 => Ok((eta * eta + 2.0 * eta * s + 3.0 * eta + 2.0 * s + 4.0) / 12.0),
        n => Err(Error::NoClosedForm(n)),
    }
}

/// Infinite-copy cloning limit `2 / (n_max + 1)`.
pub fn classical_bound_arbitrary(n_max: usize) -> f64 {
    2.0 / (n_max as f64 + 1.0)
}

/// Monte Carlo mean and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// Number of independent RNG streams; fixed so results do not depend on the
/// worker count.
const SHARDS: usize = 16;

/// Monte Carlo average fidelity through the exact loss channel.
///
/// Each of the fixed shards draws from its own ChaCha stream derived from
/// `(seed, shard)`; partial sums are combined in shard order, so the result
/// is bit-reproducible for a given seed whatever the thread count.
pub fn mc_avg_fidelity(
    eta: f64,
    alphabet: Alphabet,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_eta(eta)?;
    if samples < 100 {
        return Err(param(
            "samples",
            format!("need at least 100, got {samples}"),
        ));
    }
    match alphabet {
        Alphabet::CoherentGaussian { n_bar } if !(n_bar.is_finite() && n_bar >= 0.0) => {
            return Err(param("n_bar", format!("must be >= 0, got {n_bar}")));
        }
        Alphabet::BoundedArbitrary { n_max: 0 } => {
            return Err(param("n_max", "must be >= 1"));
        }
        _ => {}
    }
    let partials: Vec<Result<(f64, f64)>> = (0..SHARDS)
        .into_par_iter()
        .map(|shard| {
            let count = samples / SHARDS + usize::from(shard < samples % SHARDS);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard as u64);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..count {
                let state = draw_state(&mut rng, alphabet)?;
                let f = loss_fidelity(&state, eta)?;
                sum += f;
                sum_sq += f * f;
            }
            Ok((sum, sum_sq))
        })
        .collect();
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for p in partials {
        let (s, q) = p?;
        sum += s;
        sum_sq += q;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(McEstimate {
        mean,
        stderr: (var / n).sqrt(),
        samples,
    })
}

fn complex_normal<R: Rng>(rng: &mut R) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y)
}

fn draw_state<R: Rng>(rng: &mut R, alphabet: Alphabet) -> Result<PureState> {
    match alphabet {
        Alphabet::CoherentGaussian { n_bar } => {
            let alpha = complex_normal(rng) * (0.5 * n_bar).sqrt();
            PureState::coherent(alpha, PureState::coherent_dim(alpha))
        }
        Alphabet::BoundedArbitrary { n_max } => {
            PureState::normalized((0..n_max).map(|_| complex_normal(rng)).collect())
        }
    }
}

/// Average fidelity of one memory and alphabet, with its classical bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkResult {
    pub avg_fidelity: f64,
    pub classical_bound: f64,
    pub is_quantum: bool,
    pub alphabet: Alphabet,
    /// Present when the fidelity came from Monte Carlo.
    pub mc_stderr: Option<f64>,
}

/// Monte Carlo controls used when no closed form exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McSettings {
    fn default() -> Self {
        Self {
            samples: 100_000,
            seed: 1,
        }
    }
}

/// Closed-form fidelity where available (Monte Carlo for `n_max > 3`), the
/// matching classical bound and the quantum-memory verdict.
pub fn benchmark(eta: f64, alphabet: Alphabet, mc: McSettings) -> Result<BenchmarkResult> {
    check_eta(eta)?;
    let (avg_fidelity, classical_bound, mc_stderr) = match alphabet {
        Alphabet::CoherentGaussian { n_bar } => {
            if !(n_bar.is_finite() && n_bar >= 0.0) {
                return Err(param("n_bar", format!("must be >= 0, got {n_bar}")));
            }
            (
                coherent_avg_fidelity(eta, n_bar),
                classical_bound_coherent(n_bar),
                None,
            )
        }
        Alphabet::BoundedArbitrary { n_max } => {
            if n_max == 0 {
                return Err(param("n_max", "must be >= 1"));
            }
            let bound = classical_bound_arbitrary(n_max);
            match n_max {
                // the vacuum is the only state
                1 => (1.0, bound, None),
                2 | 3 => (arb_avg_fidelity(eta, n_max)?, bound, None),
                _ => {
                    let est = mc_avg_fidelity(eta, alphabet, mc.samples, mc.seed)?;
                    (est.mean, bound, Some(est.stderr))
                }
            }
        }
    };
    Ok(BenchmarkResult {
        avg_fidelity,
        classical_bound,
        is_quantum: avg_fidelity > classical_bound,
        alphabet,
        mc_stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_closed_forms() {
        assert_eq!(coherent_avg_fidelity(1.0, 37.0), 1.0);
        assert!((coherent_avg_fidelity(0.9489f64.powi(2), 20.0) - 0.950).abs() < 1e-3);
        assert!((coherent_avg_fidelity(0.85f64.powi(2), 20.0) - 0.690).abs() < 1e-3);
        assert!((classical_bound_coherent(20.0) - 21.0 / 41.0).abs() < 1e-15);
        assert_eq!(classical_bound_coherent(0.0), 1.0);
        assert!((classical_bound_coherent(1e9) - 0.5).abs() < 1e-9);
        assert!((threshold_efficiency(1.0) - 0.293).abs() < 1e-3);
        assert!((threshold_efficiency(20.0) - 0.782).abs() < 1e-3);
        assert_eq!(threshold_efficiency(0.0), 0.0);
    }

    #[test]
    fn arbitrary_closed_forms() {
        assert_eq!(arb_avg_fidelity(1.0, 2).unwrap(), 1.0);
        assert_eq!(arb_avg_fidelity(1.0, 3).unwrap(), 1.0);
        assert_eq!(arb_avg_fidelity(0.0, 2).unwrap(), 0.5);
        assert!((arb_avg_fidelity(0.0, 3).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        let expect = (0.5 + 2f64.sqrt() + 3.0) / 6.0;
        assert!((arb_avg_fidelity(0.5, 2).unwrap() - expect).abs() < 1e-15);
        assert!(matches!(
            arb_avg_fidelity(0.5, 4),
            Err(Error::NoClosedForm(4))
        ));
        assert_eq!(classical_bound_arbitrary(1), 1.0);
        assert!((classical_bound_arbitrary(2) - 2.0 / 3.0).abs() < 1e-16);
        assert_eq!(classical_bound_arbitrary(3), 0.5);
    }

    #[test]
    fn perfect_memory_mc_is_one() {
        for alphabet in [
            Alphabet::CoherentGaussian { n_bar: 5.0 },
            Alphabet::BoundedArbitrary { n_max: 4 },
        ] {
            let est = mc_avg_fidelity(1.0, alphabet, 500, 3).unwrap();
            assert!((est.mean - 1.0).abs() < 1e-8, "{alphabet}: {}", est.mean);
        }
    }

    #[test]
    fn mc_is_reproducible() {
        let alphabet = Alphabet::BoundedArbitrary { n_max: 3 };
        let a = mc_avg_fidelity(0.4, alphabet, 2000, 11).unwrap();
        let b = mc_avg_fidelity(0.4, alphabet, 2000, 11).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        let c = mc_avg_fidelity(0.4, alphabet, 2000, 12).unwrap();
        assert_ne!(a.mean.to_bits(), c.mean.to_bits());
    }

    #[test]
    fn mc_rejects_tiny_sample_counts() {
        assert!(mc_avg_fidelity(0.5, Alphabet::BoundedArbitrary { n_max: 2 }, 99, 0).is_err());
    }

    #[test]
    fn verdicts() {
        let b = benchmark(
            (0.293f64 + 1e-6).powi(2),
            Alphabet::CoherentGaussian { n_bar: 1.0 },
            McSettings::default(),
        )
        .unwrap();
        assert!(b.is_quantum);
        let b = benchmark(
            0.0,
            Alphabet::BoundedArbitrary { n_max: 2 },
            McSettings::default(),
        )
        .unwrap();
        assert_eq!(b.avg_fidelity, 0.5);
        assert!(!b.is_quantum);
        for alphabet in [
            Alphabet::CoherentGaussian { n_bar: 3.0 },
            Alphabet::BoundedArbitrary { n_max: 2 },
            Alphabet::BoundedArbitrary { n_max: 3 },
        ] {
            assert!(
                benchmark(1.0, alphabet, McSettings::default())
                    .unwrap()
                    .is_quantum
            );
        }
    }

    #[test]
    fn large_alphabet_uses_monte_carlo() {
        let mc = McSettings {
            samples: 2000,
            seed: 5,
        };
        let b = benchmark(0.7, Alphabet::BoundedArbitrary { n_max: 5 }, mc).unwrap();
        assert!(b.mc_stderr.is_some());
        assert_eq!(b.classical_bound, 2.0 / 6.0);
        assert!(b.avg_fidelity > 0.0 && b.avg_fidelity < 1.0);
    }
}
