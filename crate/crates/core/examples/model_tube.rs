//! Deficiency elements and singular modes of the flat Aharonov–Bohm tube.

use magdirac::model_operator::{
    apply_extension_action, deficiency_element, graph_norm_lower_bound, graph_norm_sq, singular_l2_norm,
    DeficiencySign, Extension, ModelTube, RadialGrid, SingularMode,
};
use num_complex::Complex64;
use std::collections::BTreeMap;

fn main() -> magdirac::Result<()> {
    let grid = RadialGrid::default();
    let tube = ModelTube::new(2.0 * std::f64::consts::PI, 0.3)?;
    let coeffs = BTreeMap::from([(-1, Complex64::new(0.5, 0.2)), (0, Complex64::new(1.0, 0.0)), (2, Complex64::new(0.0, -0.7))]);

    for sign in [DeficiencySign::PlusI, DeficiencySign::MinusI] {
        let f = deficiency_element(tube, coeffs.clone(), sign)?;
        println!("{sign:?}: relative residual {:.2e}", f.relative_residual(&grid)?);
    }

    let bound = graph_norm_lower_bound(tube.alpha())?;
    for ext in [Extension::Plus, Extension::Minus] {
        let mode = SingularMode::new(tube, coeffs.clone(), ext)?;
        let exact = apply_extension_action(&mode).sample(&grid);
        let direct = mode.to_function().apply_dirac(&grid);
        let action = (exact.sub(&direct).norm_sq_on_grid(&grid)? / exact.norm_sq(&grid)?).sqrt();
        let norm = singular_l2_norm(&mode)?;
        let quad = mode.to_function().sample(&grid).norm_sq(&grid)?;
        let graph = graph_norm_sq(&mode.to_function(), &grid)?;
        println!(
            "{ext:?}: action error {action:.2e}, L2 {norm:.9} vs grid {quad:.9}, graph {graph:.6} >= {:.6}",
            bound * mode.l2_sq()
        );
    }
    Ok(())
}
