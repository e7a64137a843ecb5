//! Spectrum and kernel of a two-component magnetic Hopf link.

use magdirac::hopf_spectrum::{assemble_spectrum, kernel_dimension, Branch, HopfConfig, HopfPoint, NumericalProvider};
use magdirac::link_geometry::{Flux, FluxVector};
use magdirac::s2_dirac::SolverParams;

fn main() -> magdirac::Result<()> {
    let fluxes = FluxVector::new(vec![Flux::exact(3, 10)?, Flux::exact(2, 5)?])?;
    let cfg = HopfConfig::new(fluxes, vec![HopfPoint::North, HopfPoint::South])?;
    let split = cfg.split();
    println!("c = {}, m = {}", split.c, split.m);

    let provider = NumericalProvider { params: SolverParams { n: 1000, tolerance: 1e-3 } };
    let kernel = kernel_dimension(&cfg, &provider, 1e-6)?;
    println!("kernel dimension {} (confident: {})", kernel.count, kernel.confident);

    let mut table = assemble_spectrum(&cfg, (-3.0, 3.0), &provider)?;
    table.sort();
    for r in &table.rows {
        let branch = match r.branch {
            Branch::Z => "Z_k",
            Branch::Continuous => "S2 ",
        };
        println!("{branch} k={:>3} {:>12.8} x{}", r.k, r.value, r.multiplicity);
    }
    Ok(())
}
