//! Q-switched cavity: write a Laguerre ground-mode pulse with the cavity
//! open, hold it with the mirror closed to `kappa_s`, then read it out.
//!
//! ```text
//! cargo run --example q_switch_memory
//! ```

use qmem::dynamics::{analytic_efficiency, default_step, measured_retrieval};
use qmem::schedule::{build_protocol, ProtocolParams, Strategy};

fn main() -> qmem::Result<()> {
    for kappa_s in [0.0, 0.05, 0.1, 0.2] {
        let protocol = build_protocol(
            Strategy::QSwitch,
            &ProtocolParams {
                kappa: 1.0,
                kappa_s,
                storage_time: 2.0,
                ..ProtocolParams::default()
            },
        )?;
        let r = measured_retrieval(&protocol, default_step(&protocol))?;
        let sim = &r.simulation;
        let peak = sim
            .output_series
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        println!(
            "kappa_s = {kappa_s:<5} sqrt(eta) measured {:.6}  e^(-kappa_s T) {:.6}  |a(T)| {:.6}  peak |A_out| {:.4}",
            r.sqrt_eta(),
            analytic_efficiency(&protocol),
            sim.a_series[sim.index_of(2.0)].norm(),
            peak,
        );
    }
    Ok(())
}
