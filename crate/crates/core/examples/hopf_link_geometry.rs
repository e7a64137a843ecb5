//! Hopf fibers, their linking numbers and a tubular chart around a torus knot.

use magdirac::link_geometry::{
    delta_bound, hopf_preimage, linking_number, s2_from_angles, seifert_frame, slope_c_k, KnotCurve, TorusCurve,
    TorusNormal, TubeCoords, TubularChart,
};
use std::sync::Arc;

fn main() -> magdirac::Result<()> {
    let base = [(0.0, 0.0), (std::f64::consts::PI, 0.0), (1.2, 0.4)];
    let fibers = base
        .iter()
        .map(|&(t, p)| hopf_preimage(&s2_from_angles(t, p)))
        .collect::<magdirac::Result<Vec<_>>>()?;
    let n = fibers.len();
    let mut link = vec![vec![0; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            link[a][b] = linking_number(&fibers[a], &fibers[b])?;
            link[b][a] = link[a][b];
        }
    }
    println!("linking matrix: {link:?}");
    let alphas = [0.5, 0.3, 0.2];
    for k in 0..n {
        println!("slope c_{k} = {}", slope_c_k(&alphas, &link, k)?);
    }

    let (latitude, p, q) = (0.6, 2, 3);
    let curve = Arc::new(KnotCurve::new(Arc::new(TorusCurve { latitude, p, q }))?);
    let frame = seifert_frame(curve, Arc::new(TorusNormal { latitude, p, q }))?;
    println!("(2,3) torus knot: length {:.6}, max curvature {:.6}", frame.curve().length(), frame.max_curvature());
    println!("Darboux residual {:.2e}, delta bound {:.6}", frame.darboux_residual(1e-3)?, delta_bound(&frame, 0.1));
    let chart = TubularChart::new(frame, 0.1)?;
    let c = TubeCoords { s: 1.0, rho: 0.05, theta: 2.0 };
    let x = chart.coords_to_point(c)?;
    println!("chart point {x:?} -> {:?}", chart.tubular_coords(&x)?);
    println!("h = {:.9}, volume factor = {:.9}", chart.h_factor(c.s, c.rho, c.theta)?, chart.volume_factor(c)?);
    Ok(())
}
