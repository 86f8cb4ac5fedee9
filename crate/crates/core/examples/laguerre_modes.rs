//! The past-time Laguerre modes accepted by an open cavity, their Gram
//! matrix, and the time-reversed output mode of the ground state.
//!
//! ```text
//! cargo run --example laguerre_modes
//! ```

use qmem::modes::{gram_matrix, laguerre_input_mode, time_reverse, Limit, TimeGrid};

fn main() -> qmem::Result<()> {
    let kappa = 1.0;
    let grid = TimeGrid::new(-30.0, 0.0, 30_001)?;
    let modes = (0..5)
        .map(|n| laguerre_input_mode(n, kappa, &grid))
        .collect::<qmem::Result<Vec<_>>>()?;
    let gram = gram_matrix(&modes)?;
    println!("Gram matrix |<u_m|u_n>|:");
    for i in 0..modes.len() {
        let row: Vec<String> = (0..modes.len())
            .map(|j| format!("{:.6}", gram[(i, j)].norm()))
            .collect();
        println!("  {}", row.join("  "));
    }

    let storage = 2.0;
    let out = time_reverse(&modes[0], storage);
    println!("\nground mode and its time reverse about T = {storage}:");
    for t in [-3.0, -1.0, -0.25, 0.0] {
        let r = storage - t;
        println!(
            "  u_in({t:>5}) = {:.6}   u_out({r:>5}) = {:.6}",
            modes[0].value_at(t, Limit::Closed).re,
            out.value_at(r, Limit::Closed).re,
        );
    }
    Ok(())
}
