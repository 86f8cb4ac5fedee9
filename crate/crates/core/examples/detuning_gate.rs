//! Constant coupling at critical damping, with storage enforced by detuning
//! the oscillator to `+delta_l` then `-delta_l`. The sign flip cancels the
//! phase accumulated during storage.
//!
//! ```text
//! cargo run --release --example detuning_gate
//! ```

use std::f64::consts::PI;

use qmem::dynamics::{analytic_efficiency, default_step, measured_retrieval};
use qmem::schedule::{build_protocol, ProtocolParams, Strategy};

fn main() -> qmem::Result<()> {
    let (kappa, gamma) = (4.0, 0.01);
    let g = ProtocolParams::critical_coupling(kappa, gamma);
    println!("kappa = {kappa}, gamma = {gamma}, g = {g} (critical), T = 4");
    for factor in [9.0, 27.0, 81.0] {
        let protocol = build_protocol(
            Strategy::DetuningGate,
            &ProtocolParams {
                kappa,
                gamma,
                g,
                delta_l: factor * PI,
                storage_time: 4.0,
                ..ProtocolParams::default()
            },
        )?;
        let r = measured_retrieval(&protocol, default_step(&protocol))?;
        println!(
            "delta_l = {factor:>4} pi  measured {:.6}  critical-damping formula {:.6}  phase {:+.2e} rad",
            r.sqrt_eta(),
            analytic_efficiency(&protocol),
            r.phase(),
        );
    }
    Ok(())
}
