//! The beam-splitter loss channel on truncated Fock states, built from Kraus
//! operators and from the two-mode expansion, and the resulting fidelities.
//!
//! ```text
//! cargo run --example fock_loss_channel
//! ```

use qmem::fock::{fidelity_pure_mixed, loss_channel, loss_channel_two_mode, PureState};
use qmem::Complex64;

fn main() -> qmem::Result<()> {
    let eta = 0.7;
    let one = PureState::number(1, 2)?;
    let rho = loss_channel(&one, eta)?;
    println!(
        "|1> through eta = {eta}: diag = [{:.3}, {:.3}]",
        rho.entries()[(0, 0)].re,
        rho.entries()[(1, 1)].re
    );

    let alpha = Complex64::new(1.5, 0.5);
    let coh = PureState::coherent(alpha, PureState::coherent_dim(alpha))?;
    let kraus = loss_channel(&coh, eta)?;
    let two_mode = loss_channel_two_mode(&coh, eta)?;
    let diff = (kraus.entries() - two_mode.entries())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    println!(
        "coherent alpha = {alpha}: dim {}, max |Kraus - two-mode| = {diff:.1e}",
        coh.dim()
    );
    println!(
        "  <a> out = {:.6}, sqrt(eta) alpha = {:.6}",
        kraus.mean_annihilation(),
        alpha * eta.sqrt()
    );
    println!(
        "  fidelity {:.6}, exp(-|alpha|^2 (1 - sqrt(eta))^2) = {:.6}",
        fidelity_pure_mixed(&coh, &kraus)?,
        (-alpha.norm_sqr() * (1.0 - eta.sqrt()).powi(2)).exp()
    );
    Ok(())
}
