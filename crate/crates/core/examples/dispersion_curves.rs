//! Branch energies at the couplings 0.5 and 0, written as CSV to stdout.

use std::io;

use dirac8::dispersion::{dispersion_table, linspace, write_dispersion_csv};
use dirac8::QuantumParams;

fn main() -> io::Result<()> {
    let grid = linspace(-3.0, 3.0, 61);
    let params = QuantumParams::default();
    let mut out = io::stdout().lock();
    for epsilon in [0.5, 0.0] {
        println!("# epsilon={epsilon}");
        write_dispersion_csv(&mut out, &dispersion_table(epsilon, &grid, &params))?;
    }
    Ok(())
}
