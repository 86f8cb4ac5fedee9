//! Classical benchmarks and the efficiency a memory needs to beat them, for
//! Gaussian-weighted coherent alphabets and bounded-photon-number alphabets.
//!
//! ```text
//! cargo run --release --example fidelity_benchmarks
//! ```

use qmem::fidelity::{
    arb_avg_fidelity, benchmark, classical_bound_arbitrary, classical_bound_coherent,
    threshold_efficiency, Alphabet, McSettings,
};

fn main() -> qmem::Result<()> {
    println!("coherent alphabet");
    println!("{:>6} {:>10} {:>14}", "n_bar", "bound", "sqrt(eta) > ");
    for n_bar in [0.5, 1.0, 5.0, 20.0, 50.0] {
        println!(
            "{n_bar:>6} {:>10.4} {:>14.4}",
            classical_bound_coherent(n_bar),
            threshold_efficiency(n_bar)
        );
    }

    println!("\nbounded alphabets, eta = 0.5");
    for n_max in [2, 3] {
        println!(
            "  n_max = {n_max}: F = {:.4}, cloning bound {:.4}",
            arb_avg_fidelity(0.5, n_max)?,
            classical_bound_arbitrary(n_max)
        );
    }
    // no closed form beyond three levels; the benchmark falls back to sampling
    let mc = McSettings {
        samples: 20_000,
        seed: 1,
    };
    let b = benchmark(0.5, Alphabet::BoundedArbitrary { n_max: 5 }, mc)?;
    println!(
        "  n_max = 5: F = {:.4} ± {:.4} (Monte Carlo), bound {:.4}, {}",
        b.avg_fidelity,
        b.mc_stderr.unwrap_or(0.0),
        b.classical_bound,
        if b.is_quantum { "quantum" } else { "classical" }
    );
    Ok(())
}
