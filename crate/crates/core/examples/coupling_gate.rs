//! Cavity coupled to a lossy oscillator, with the exchange coupling `g`
//! switched off during storage. Compares the integrated retrieval with the
//! cooperativity formula and reports the coherent-state benchmark verdict.
//!
//! ```text
//! cargo run --example coupling_gate
//! ```

use qmem::dynamics::{analytic_efficiency, cooperativity, default_step, measured_retrieval};
use qmem::fidelity::{benchmark, Alphabet, McSettings};
use qmem::schedule::{build_protocol, ProtocolParams, Strategy};

fn main() -> qmem::Result<()> {
    let (kappa, g) = (4.0, 2.0);
    println!("kappa = {kappa}, g = {g}");
    println!(
        "{:>6} {:>6} {:>8} {:>10} {:>10} {:>8}  verdict (n_bar = 20)",
        "gamma", "T", "C", "measured", "analytic", "F"
    );
    for gamma in [0.01, 0.05] {
        for t in [4.0, 8.0, 15.0] {
            let protocol = build_protocol(
                Strategy::CouplingGate,
                &ProtocolParams {
                    kappa,
                    g,
                    gamma,
                    storage_time: t,
                    ..ProtocolParams::default()
                },
            )?;
            let r = measured_retrieval(&protocol, default_step(&protocol))?;
            let s = r.sqrt_eta();
            let b = benchmark(
                s * s,
                Alphabet::CoherentGaussian { n_bar: 20.0 },
                McSettings::default(),
            )?;
            println!(
                "{gamma:>6} {t:>6} {:>8.1} {s:>10.6} {:>10.6} {:>8.4}  {}",
                cooperativity(kappa, gamma, g),
                analytic_efficiency(&protocol),
                b.avg_fidelity,
                if b.is_quantum { "quantum" } else { "classical" },
            );
        }
    }
    Ok(())
}
