//! Driving a memory with a pulse that is not mode matched: Gaussian inputs of
//! several widths through the coupling gate, filtered with the optimal
//! retrieval mode.
//!
//! ```text
//! cargo run --example custom_drive
//! ```

use qmem::dynamics::{filtered_output, integrate_on, optimal_input_mode, simulation_grid};
use qmem::modes::{inner_product, time_reverse, TemporalMode};
use qmem::schedule::{build_protocol, ProtocolParams, Strategy};
use qmem::Complex64;

fn main() -> qmem::Result<()> {
    let protocol = build_protocol(
        Strategy::CouplingGate,
        &ProtocolParams {
            kappa: 4.0,
            g: 2.0,
            gamma: 0.01,
            storage_time: 4.0,
            ..ProtocolParams::default()
        },
    )?;
    let grid = simulation_grid(&protocol, 1e-3)?;
    let matched = optimal_input_mode(&protocol, &grid)?;
    let retrieval = time_reverse(&matched, protocol.storage_time);

    for width in [0.25, 0.5, 1.0] {
        let centre = -1.0;
        let samples = grid
            .times()
            .map(|t| {
                let x = if t <= 0.0 {
                    (-(t - centre).powi(2) / (2.0 * width * width)).exp()
                } else {
                    0.0
                };
                Complex64::new(0.0, -x)
            })
            .collect();
        let pulse = TemporalMode::from_samples(grid, samples)?.normalized()?;
        let sim = integrate_on(&protocol, &pulse, Complex64::new(1.0, 0.0), &grid)?;
        let out = filtered_output(&sim, &retrieval);
        println!(
            "gaussian width {width:<4}: overlap with matched mode {:.4}, retrieved amplitude {:.4}",
            inner_product(&matched, &pulse).norm(),
            out.norm()
        );
    }
    Ok(())
}
