//! Positive spectrum on the radius-½ sphere with a uniform field and pole fluxes.

use magdirac::s2_dirac::{assemble_s2_spectrum, kernel_dim, Pole, PointFlux, S2FieldConfig, SolverParams};

fn main() -> magdirac::Result<()> {
    let params = SolverParams { n: 1000, tolerance: 1e-4 };
    let configs = [
        ("free", S2FieldConfig::free()),
        ("uniform, chern 2", S2FieldConfig::uniform(2)),
        (
            "fluxes 0.3 north, 0.6 south",
            S2FieldConfig::new(
                vec![
                    PointFlux { pole: Pole::North, alpha: 0.3 },
                    PointFlux { pole: Pole::South, alpha: 0.6 },
                ],
                2.0 * (1.0 - 0.9),
                1,
            )?,
        ),
    ];
    for (name, cfg) in configs {
        let spec = assemble_s2_spectrum(&cfg, 7.0, params)?;
        println!("{name}: kernel {} (pole rule {})", spec.kernel_dim, kernel_dim(&cfg)?);
        for e in &spec.eigenvalues {
            println!("  {:>12.8} x{} (+/- {:.1e})", e.value, e.multiplicity, e.error);
        }
    }
    Ok(())
}
