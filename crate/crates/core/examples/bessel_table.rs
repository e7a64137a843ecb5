//! Modified Bessel functions and the weighted integrals `C_α`.

use magdirac::special_functions::{bessel_i, bessel_k, c_alpha, c_alpha_closed_form};

fn main() -> magdirac::Result<()> {
    println!("{:>6} {:>8} {:>22} {:>22}", "nu", "x", "K_nu(x)", "I_nu(x)");
    for nu in [0.1, 0.25, 0.5, 0.75, 1.5] {
        for x in [0.01, 1.0, 10.0] {
            println!("{nu:>6} {x:>8} {:>22.15e} {:>22.15e}", bessel_k(nu, x)?, bessel_i(nu, x)?);
        }
    }
    println!();
    println!("{:>6} {:>20} {:>20}", "alpha", "C_alpha", "closed form");
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        println!("{alpha:>6} {:>20.15} {:>20.15}", c_alpha(alpha)?.value, c_alpha_closed_form(alpha));
    }
    Ok(())
}
