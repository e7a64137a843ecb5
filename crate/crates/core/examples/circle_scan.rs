//! Spectral gap around zero for a single magnetic circle as the flux varies.

use magdirac::hopf_spectrum::circle_zero_mode_scan;
use magdirac::s2_dirac::SolverParams;

fn main() -> magdirac::Result<()> {
    let alphas: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let rows = circle_zero_mode_scan(&alphas, SolverParams { n: 1000, tolerance: 1e-3 }, 1e-3)?;
    println!("{:>6} {:>10} {:>10} {:>12}", "alpha", "gap", "error", "status");
    for r in rows {
        println!("{:>6.2} {:>10.6} {:>10.1e} {:>12?}", r.alpha, r.gap, r.error_estimate, r.status);
    }
    Ok(())
}
