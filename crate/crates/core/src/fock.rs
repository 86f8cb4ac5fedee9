//! Exact truncated Fock-space loss channel.
//!
//! A memory that acts as a beam splitter of transmission `eta` maps a
//! single-mode state through the binomial loss channel
//!
//! ```text
//! rho -> sum_k K_k rho K_k^dag,   <n-k| K_k |n> = sqrt(C(n,k) eta^(n-k) (1-eta)^k)
//! ```
//!
//! Loss never raises the photon number, so a state supported on `|0>..|d-1>`
//! needs no extra truncation headroom. The channel is built two ways, from
//! the Kraus operators and from the explicit two-mode beam-splitter
//! expansion traced over the reservoir; both serve as the ground truth for
//! the closed-form fidelities in [`crate::fidelity`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{param, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Normalized pure state over number states `|0>..|d-1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Checks `sum |psi_n|^2 = 1` to 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(param("amplitudes", "state needs at least one level"));
        }
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(param("amplitudes", format!("norm^2 = {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(param("amplitudes", "cannot normalize a zero vector"));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    /// Number state `|n>` in dimension `dim`.
    pub fn number(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Dimension {
                expected: n + 1,
                got: dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes: amps })
    }

    /// Coherent state `|alpha>` truncated to `dim` levels and renormalized.
    pub fn coherent(alpha: Complex64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(param("dim", "must be >= 1"));
        }
        let mut amps = Vec::with_capacity(dim);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            amps.push(c);
            c = c * alpha / ((n + 1) as f64).sqrt();
        }
        Self::normalized(amps)
    }

    /// Truncation rule for coherent states: `ceil(|alpha|^2 + 8|alpha| + 10)`.
    pub fn coherent_dim(alpha: Complex64) -> usize {
        let r = alpha.norm();
        (r * r + 8.0 * r + 10.0).ceil() as usize
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn projector(&self) -> FockDensityMatrix {
        let v = DVector::from_column_slice(&self.amplitudes);
        FockDensityMatrix {
            entries: &v * v.adjoint(),
        }
    }
}

/// Truncated single-mode density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    entries: DMatrix<Complex64>,
}

impl FockDensityMatrix {
    /// Validates hermiticity (1e-12), unit trace (1e-10) and positivity
    /// (min eigenvalue > -1e-10).
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self { entries };
        rho.validate()?;
        Ok(rho)
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Mean field `<a> = tr(rho a)`.
    pub fn mean_annihilation(&self) -> Complex64 {
        (1..self.dim())
            .map(|n| (n as f64).sqrt() * self.entries[(n, n - 1)])
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.entries;
        if e.nrows() != e.ncols() {
            return Err(Error::Dimension {
                expected: e.nrows(),
                got: e.ncols(),
            });
        }
        let herm = (e - e.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(Error::Numerical(format!(
                "density matrix not Hermitian ({herm})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > 1e-10 {
            return Err(Error::Numerical(format!("density matrix trace {tr}")));
        }
        let lam = self.min_eigenvalue();
        if lam < -1e-10 {
            return Err(Error::Numerical(format!("negative eigenvalue {lam}")));
        }
        Ok(())
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(param("eta", format!("must lie in [0, 1], got {eta}")))
    }
}

/// `C(n, k)` as a float: exact integer arithmetic for `n <= 20`, log-factorials
/// beyond.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    if n <= 20 {
        let k = k.min(n - k);
        let mut c: u64 = 1;
        for i in 0..k {
            c = c * (n - i) as u64 / (i + 1) as u64;
        }
        return c as f64;
    }
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp()
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Kraus weight `sqrt(C(n,k) eta^(n-k) (1-eta)^k)` for losing `k` of `n` photons.
fn kraus_weight(n: usize, k: usize, eta: f64, ln_fact: &[f64]) -> f64 {
    if eta == 1.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if eta == 0.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    let ln_c = ln_fact[n] - ln_fact[k] - ln_fact[n - k];
    let ln_w = ln_c + (n - k) as f64 * eta.ln() + k as f64 * (1.0 - eta).ln();
    (0.5 * ln_w).exp()
}

fn ln_factorials(dim: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(dim + 1);
    out.push(0.0);
    for i in 1..=dim {
        out.push(out[i - 1] + (i as f64).ln());
    }
    out
}

/// Kraus operators `K_0..K_{d-1}` of the loss channel in dimension `dim`.
pub fn kraus_operators(eta: f64, dim: usize) -> Result<Vec<DMatrix<Complex64>>> {
    check_eta(eta)?;
    let lf = ln_factorials(dim);
    Ok((0..dim)
        .map(|k| {
            DMatrix::from_fn(dim, dim, |row, col| {
                if col >= k && row == col - k {
                    Complex64::new(kraus_weight(col, k, eta, &lf), 0.0)
                } else {
                    ZERO
                }
            })
        })
        .collect())
}

/// The vectors `K_k |psi>`, k = 0..d-1.
fn kraus_images(state: &PureState, eta: f64) -> Vec<Vec<Complex64>> {
    let psi = state.amplitudes();
    let d = psi.len();
    let lf = ln_factorials(d);
    (0..d)
        .map(|k| {
            (0..d - k)
                .map(|m| psi[m + k] * kraus_weight(m + k, k, eta, &lf))
                .collect()
        })
        .collect()
}

/// Output of the loss channel for a pure input, via Kraus operators.
pub fn loss_channel(state: &PureState, eta: f64) -> Result<FockDensityMatrix> {
    check_eta(eta)?;
    let d = state.dim();
    let mut rho = DMatrix::from_element(d, d, ZERO);
    for v in kraus_images(state, eta) {
        for (i, vi) in v.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                rho[(i, j)] += vi * vj.conj();
            }
        }
    }
    Ok(FockDensityMatrix { entries: rho })
}

/// Loss channel applied to a mixed state, `sum_k K_k rho K_k^dag`.
pub fn apply_loss(rho: &FockDensityMatrix, eta: f64) -> Result<FockDensityMatrix> {
    let kraus = kraus_operators(eta, rho.dim())?;
    let mut out = DMatrix::from_element(rho.dim(), rho.dim(), ZERO);
    for k in &kraus {
        out += k * rho.entries() * k.adjoint();
    }
    Ok(FockDensityMatrix { entries: out })
}

/// Output of the loss channel built from the two-mode expansion
/// `sum_n psi_n / sqrt(n!) (sqrt(eta) a^dag + sqrt(1-eta) r^dag)^n |0,0>`,
/// traced over the reservoir mode `r`.
///
/// The creation operators are applied one at a time on a `d x d` two-mode
/// amplitude table, independent of the binomial Kraus weights.
pub fn loss_channel_two_mode(state: &PureState, eta: f64) -> Result<FockDensityMatrix> {
    check_eta(eta)?;
    let d = state.dim();
    let (t, r) = (eta.sqrt(), (1.0 - eta).sqrt());
    // joint[(j, l)] is the amplitude of |j>_out |l>_res
    let mut joint = DMatrix::from_element(d, d, ZERO);
    // power[(j, l)] holds (t a^dag + r r^dag)^n |0,0> / sqrt(n!)
    let mut power = DMatrix::from_element(d, d, ZERO);
    power[(0, 0)] = Complex64::new(1.0, 0.0);
    for (n, psi_n) in state.amplitudes().iter().enumerate() {
        if n > 0 {
            let mut next = DMatrix::from_element(d, d, ZERO);
            for j in 0..n {
                let l = n - 1 - j;
                let c = power[(j, l)];
                if c == ZERO {
                    continue;
                }
                next[(j + 1, l)] += c * t * ((j + 1) as f64).sqrt();
                next[(j, l + 1)] += c * r * ((l + 1) as f64).sqrt();
            }
            power = next.unscale((n as f64).sqrt());
        }
        joint += &power * *psi_n;
    }
    let rho = &joint * joint.adjoint();
    Ok(FockDensityMatrix { entries: rho })
}

/// `<psi| rho |psi>`.
pub fn fidelity_pure_mixed(psi: &PureState, rho: &FockDensityMatrix) -> Result<f64> {
    if psi.dim() != rho.dim() {
        return Err(Error::Dimension {
            expected: rho.dim(),
            got: psi.dim(),
        });
    }
    let v = DVector::from_column_slice(psi.amplitudes());
    let f = (v.adjoint() * rho.entries() * &v)[(0, 0)];
    debug_assert!(f.im.abs() < 1e-12, "fidelity has imaginary part {}", f.im);
    Ok(f.re)
}

/// `<psi| L_eta(|psi><psi|) |psi> = sum_k |<psi|K_k|psi>|^2`, without forming
/// the density matrix. Used by the Monte Carlo estimators.
///
/// Kraus weights along each diagonal follow from
/// `w(n+1, k) = w(n, k) sqrt(eta (n+1) / (n+1-k))`, starting at
/// `w(k, k) = (1-eta)^(k/2)`.
pub fn loss_fidelity(state: &PureState, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let psi = state.amplitudes();
    let d = psi.len();
    let mut total = 0.0;
    for k in 0..d {
        let mut w = (1.0 - eta).powf(0.5 * k as f64);
        if w == 0.0 {
            break;
        }
        let mut s = ZERO;
        for m in 0..d - k {
            s += psi[m].conj() * psi[m + k] * w;
            let n = (m + k + 1) as f64;
            w *= (eta * n / (m + 1) as f64).sqrt();
        }
        total += s.norm_sqr();
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &FockDensityMatrix, b: &FockDensityMatrix) -> f64 {
        (a.entries() - b.entries())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn sample_state() -> PureState {
        PureState::normalized(vec![c(0.3, 0.1), c(-0.5, 0.2), c(0.1, -0.7), c(0.4, 0.0)]).unwrap()
    }

    #[test]
    fn identity_channel() {
        let psi = sample_state();
        let rho = loss_channel(&psi, 1.0).unwrap();
        assert_eq!(rho, psi.projector());
        assert!((fidelity_pure_mixed(&psi, &rho).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_photon_fixture() {
        for eta in [0.0, 0.2, 0.5, 0.93, 1.0] {
            let one = PureState::number(1, 2).unwrap();
            let rho = loss_channel(&one, eta).unwrap();
            assert!((rho.entries()[(0, 0)].re - (1.0 - eta)).abs() < 1e-15);
            assert!((rho.entries()[(1, 1)].re - eta).abs() < 1e-15);
            assert_eq!(rho.entries()[(0, 1)], ZERO);
            assert!((fidelity_pure_mixed(&one, &rho).unwrap() - eta).abs() < 1e-15);
        }
    }

    #[test]
    fn vacuum_is_invariant() {
        let vac = PureState::number(0, 3).unwrap();
        for eta in [0.0, 0.4, 1.0] {
            let rho = loss_channel(&vac, eta).unwrap();
            assert!((fidelity_pure_mixed(&vac, &rho).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn coherent_state_mean_scales() {
        for alpha in [c(0.5, 0.0), c(1.2, -0.7), c(-1.0, 1.7)] {
            let psi = PureState::coherent(alpha, 30).unwrap();
            for eta in [0.25, 0.8] {
                let rho = loss_channel(&psi, eta).unwrap();
                let mean = rho.mean_annihilation();
                assert!((mean - alpha * eta.sqrt()).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn kraus_and_two_mode_agree() {
        let psi = sample_state();
        for eta in [0.0, 0.3, 0.77, 1.0] {
            let a = loss_channel(&psi, eta).unwrap();
            let b = loss_channel_two_mode(&psi, eta).unwrap();
            assert!(max_diff(&a, &b) < 1e-12);
        }
    }

    #[test]
    fn output_is_valid_density_matrix() {
        let psi = sample_state();
        let rho = loss_channel(&psi, 0.6).unwrap();
        rho.validate().unwrap();
        assert!(FockDensityMatrix::new(rho.entries().clone()).is_ok());
    }

    #[test]
    fn kraus_completeness() {
        let ks = kraus_operators(0.35, 6).unwrap();
        let sum = ks.iter().fold(DMatrix::from_element(6, 6, ZERO), |acc, k| {
            acc + k.adjoint() * k
        });
        let err = (sum - DMatrix::identity(6, 6))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-12);
    }

    #[test]
    fn fast_fidelity_matches_matrix_route() {
        let psi = sample_state();
        for eta in [0.0, 0.1, 0.5, 0.99] {
            let rho = loss_channel(&psi, eta).unwrap();
            let slow = fidelity_pure_mixed(&psi, &rho).unwrap();
            let fast = loss_fidelity(&psi, eta).unwrap();
            assert!((slow - fast).abs() < 1e-13);
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(20, 10), 184756.0);
        assert_eq!(binomial(3, 5), 0.0);
        let big = binomial(30, 15);
        assert!((big - 155117520.0).abs() / 155117520.0 < 1e-12);
    }

    #[test]
    fn errors() {
        let psi = sample_state();
        assert!(loss_channel(&psi, 1.1).is_err());
        assert!(loss_channel(&psi, -0.1).is_err());
        let rho = loss_channel(&PureState::number(0, 2).unwrap(), 0.5).unwrap();
        assert!(matches!(
            fidelity_pure_mixed(&psi, &rho),
            Err(Error::Dimension { .. })
        ));
        assert!(PureState::new(vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
    }
}
