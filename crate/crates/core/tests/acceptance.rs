//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use magdirac::hopf_spectrum::{
    assemble_spectrum, circle_zero_mode_scan, free_s3_spectrum, kernel_dimension, HopfConfig, HopfPoint,
    NumericalProvider, ScanStatus,
};
use magdirac::link_geometry::{
    flux_distance, hopf_preimage, linking_number, s2_from_angles, seifert_frame, Flux, FluxVector, KnotCurve,
    TorusCurve, TorusNormal, TubeCoords, TubularChart,
};
use magdirac::model_operator::{
    apply_extension_action, deficiency_element, graph_norm_lower_bound, graph_norm_sq, singular_l2_norm,
    DeficiencySign, Extension, ModelTube, RadialGrid, SingularMode,
};
use magdirac::s2_dirac::{assemble_s2_spectrum, observed_order, RadialSector, S2FieldConfig, SolverParams};
use magdirac::special_functions::c_alpha;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact(fracs: &[(i64, i64)]) -> FluxVector {
    FluxVector::new(fracs.iter().map(|&(n, d)| Flux::exact(n, d).unwrap()).collect()).unwrap()
}

fn random_seq(rng: &mut ChaCha8Rng, width: i64) -> BTreeMap<i64, Complex64> {
    (-width..=width)
        .map(|m| (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect()
}

fn kernel_dimension_criterion() -> Outcome {
    let start = Instant::now();
    let sets: [(&[(i64, i64)], usize); 4] = [
        (&[(1, 2)], 0),
        (&[(7, 10), (8, 10)], 1),
        (&[(9, 10), (8, 10), (8, 10)], 2),
        (&[(9, 10), (9, 10), (9, 10), (8, 10)], 3),
    ];
    let provider = NumericalProvider { params: SolverParams::default() };
    let mut got = Vec::new();
    for (fracs, _) in sets {
        let fluxes = exact(fracs);
        let points = (0..fluxes.len())
            .map(|i| HopfPoint::Angles {
                colatitude: PI * (i as f64 + 0.5) / fluxes.len() as f64,
                longitude: 0.3 * i as f64,
            })
            .collect();
        let k = kernel_dimension(&HopfConfig::new(fluxes, points).map_err(|e| e.to_string())?, &provider, 1e-6)
            .map_err(|e| e.to_string())?;
        got.push((k.count, k.exact));
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = got.iter().zip(&sets).all(|((c, e), (_, m))| c == m && *e) && secs < 1.0;
    check(ok, format!("dims {:?} expected [0, 1, 2, 3] exact, {secs:.3}s (< 1s)", got.iter().map(|g| g.0).collect::<Vec<_>>()))
}

fn circle_scan_criterion() -> Outcome {
    let start = Instant::now();
    let alphas: Vec<f64> = (1..=19).map(|i| i as f64 * 0.05).collect();
    let rows = circle_zero_mode_scan(&alphas, SolverParams { n: 4000, tolerance: 1e-3 }, 1e-3).map_err(|e| e.to_string())?;
    let worst = rows
        .iter()
        .map(|r| r.gap - r.error_estimate)
        .fold(f64::INFINITY, f64::min);
    let ok = rows.len() == alphas.len() && rows.iter().all(|r| r.status == ScanStatus::Pass && r.gap - r.error_estimate > 1e-3);
    check(
        ok,
        format!("min(gap - error) = {worst:.6} over 19 alphas (> 1e-3), {:.1}s", start.elapsed().as_secs_f64()),
    )
}

fn free_limit_criterion() -> Outcome {
    let cfg = HopfConfig::circle(Flux::exact(1, 1000).unwrap()).map_err(|e| e.to_string())?;
    let provider = NumericalProvider {
        params: SolverParams { n: 4000, tolerance: 1e-3 },
    };
    let table = assemble_spectrum(&cfg, (-5.0, 5.0), &provider).map_err(|e| e.to_string())?;
    let free = free_s3_spectrum(4);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut counts = vec![0usize; free.len()];
    for r in &table.rows {
        let (i, (x, _)) = free
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 .0 - r.value).abs().total_cmp(&(b.1 .0 - r.value).abs()))
            .unwrap();
        let tol = (5.0 * r.error_estimate.unwrap_or(0.0)).max(1e-2);
        let d = (r.value - x).abs();
        worst = worst.max(d);
        ok &= d <= tol;
        counts[i] += r.multiplicity;
    }
    let mults_ok = counts.iter().zip(&free).all(|(c, (_, m))| c == m);
    check(
        ok && mults_ok,
        format!("max deviation {worst:.2e} (<= max(5 err, 1e-2)), multiplicities {counts:?}"),
    )
}

fn deficiency_criterion() -> Outcome {
    let grid = RadialGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        for sign in [DeficiencySign::PlusI, DeficiencySign::MinusI] {
            for _ in 0..5 {
                let tube = ModelTube::new(rng.gen_range(1.0..8.0), alpha).map_err(|e| e.to_string())?;
                let f = deficiency_element(tube, random_seq(&mut rng, 4), sign).map_err(|e| e.to_string())?;
                worst = worst.max(f.relative_residual(&grid).map_err(|e| e.to_string())?);
            }
        }
    }
    check(worst <= 1e-5, format!("max relative residual {worst:.2e} (<= 1e-5)"))
}

fn extension_action_criterion() -> Outcome {
    let grid = RadialGrid::default();
    let mut worst: f64 = 0.0;
    for alpha in [0.25, 0.5, 0.75] {
        let tube = ModelTube::new(2.0 * PI, alpha).map_err(|e| e.to_string())?;
        for ext in [Extension::Plus, Extension::Minus] {
            for m in -9..=9 {
                if tube.j(m).abs() > 8.0 {
                    continue;
                }
                let mode = SingularMode::new(tube, BTreeMap::from([(m, Complex64::new(1.0, 0.0))]), ext)
                    .map_err(|e| e.to_string())?;
                let exact = apply_extension_action(&mode).sample(&grid);
                let direct = mode.to_function().apply_dirac(&grid);
                let num = exact.sub(&direct).norm_sq_on_grid(&grid).map_err(|e| e.to_string())?;
                let den = exact.norm_sq(&grid).map_err(|e| e.to_string())?;
                worst = worst.max((num / den).sqrt());
            }
        }
    }
    check(worst <= 1e-5, format!("max relative error {worst:.2e} for |j| <= 8 (<= 1e-5)"))
}

fn norms_criterion() -> Outcome {
    let grid = RadialGrid::default();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut norm_err: f64 = 0.0;
    let mut margin = f64::INFINITY;
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let bound = graph_norm_lower_bound(alpha).map_err(|e| e.to_string())?;
        for ext in [Extension::Plus, Extension::Minus] {
            for _ in 0..3 {
                let tube = ModelTube::new(rng.gen_range(1.0..8.0), alpha).map_err(|e| e.to_string())?;
                let mode = SingularMode::new(tube, random_seq(&mut rng, 3), ext).map_err(|e| e.to_string())?;
                let exact = singular_l2_norm(&mode).map_err(|e| e.to_string())?;
                let quad = mode.to_function().sample(&grid).norm_sq(&grid).map_err(|e| e.to_string())?;
                norm_err = norm_err.max((quad - exact).abs() / exact);
                let g = graph_norm_sq(&mode.to_function(), &grid).map_err(|e| e.to_string())?;
                margin = margin.min(g - bound * mode.l2_sq());
            }
        }
    }
    let c_half = (c_alpha(0.5).map_err(|e| e.to_string())?.value - PI / 4.0).abs();
    check(
        norm_err <= 1e-5 && margin >= -1e-6 && c_half <= 1e-8,
        format!(
            "L2 identity {norm_err:.2e} (<= 1e-5), graph margin {margin:.2e} (>= -1e-6), |C_1/2 - pi/4| {c_half:.2e} (<= 1e-8)"
        ),
    )
}

fn geometry_criterion() -> Outcome {
    let points = [(0.0, 0.0), (PI, 0.0), (1.1, 0.4), (2.0, -2.5), (0.5, 3.0)];
    let fibers: Vec<KnotCurve> = points
        .iter()
        .map(|&(t, p)| hopf_preimage(&s2_from_angles(t, p)))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let mut links = Vec::new();
    for a in 0..fibers.len() {
        for b in a + 1..fibers.len() {
            links.push(linking_number(&fibers[a], &fibers[b]).map_err(|e| e.to_string())?);
        }
    }
    let link_ok = links.iter().all(|&l| l == 1);

    let (lat, p, q) = (0.6, 2, 3);
    let curve = Arc::new(
        KnotCurve::new(Arc::new(TorusCurve { latitude: lat, p, q })).map_err(|e| e.to_string())?,
    );
    let frame = seifert_frame(curve, Arc::new(TorusNormal { latitude: lat, p, q })).map_err(|e| e.to_string())?;
    let darboux = frame.darboux_residual(1e-3).map_err(|e| e.to_string())?;
    let chart = TubularChart::new(frame, 0.1).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut roundtrip: f64 = 0.0;
    let mut volume: f64 = 0.0;
    for _ in 0..1000 {
        let c = TubeCoords {
            s: rng.gen_range(0.0..chart.length()),
            rho: rng.gen_range(1e-3..chart.epsilon() * 0.99),
            theta: rng.gen_range(0.0..2.0 * PI),
        };
        let x = chart.coords_to_point(c).map_err(|e| e.to_string())?;
        let back = chart.tubular_coords(&x).map_err(|e| e.to_string())?;
        let y = chart.coords_to_point(back).map_err(|e| e.to_string())?;
        roundtrip = roundtrip.max((x - y).norm());
        let h = chart.h_factor(c.s, c.rho, c.theta).map_err(|e| e.to_string())?;
        let v = chart.volume_factor(c).map_err(|e| e.to_string())?;
        volume = volume.max((v - h * c.rho.sin()).abs());
    }
    let d = flux_distance(Flux::exact(9, 10).unwrap(), Flux::exact(1, 10).unwrap());
    let dist_ok = d == Flux::exact(1, 5).unwrap();
    check(
        link_ok && darboux <= 1e-6 && roundtrip <= 1e-9 && volume <= 1e-8 && dist_ok,
        format!(
            "linking {links:?} (all 1), Darboux {darboux:.2e} (<= 1e-6), roundtrip {roundtrip:.2e} (<= 1e-9), \
             volume {volume:.2e} (<= 1e-8), dist(0.9, 0.1) = {d}"
        ),
    )
}

fn s2_criterion() -> Outcome {
    let spec = assemble_s2_spectrum(&S2FieldConfig::free(), 8.5, SolverParams { n: 4000, tolerance: 1e-3 })
        .map_err(|e| e.to_string())?;
    let mut free_err: f64 = 0.0;
    let mut free_ok = spec.eigenvalues.len() == 4;
    for (i, e) in spec.eigenvalues.iter().enumerate() {
        let k = 2.0 * (i + 1) as f64;
        free_err = free_err.max((e.value - k).abs());
        free_ok &= e.multiplicity == 2 * (i + 1);
    }
    free_ok &= free_err <= 1e-3;

    let mut kernels = Vec::new();
    for chern in -3..=3 {
        let cfg = S2FieldConfig::uniform(chern);
        let mut dim = 0;
        for q in -12..=12 {
            dim += RadialSector::build(&cfg, q, 200).map_err(|e| e.to_string())?.kernel_dim();
        }
        kernels.push(dim);
    }
    let kernel_ok = kernels.iter().zip(-3i64..=3).all(|(&d, c)| d as i64 == c.abs());

    let mut order = f64::INFINITY;
    for (cfg, q) in [(S2FieldConfig::free(), 0), (S2FieldConfig::uniform(2), 1)] {
        for p in observed_order(&cfg, q, 250, 12.0).map_err(|e| e.to_string())? {
            order = order.min(p);
        }
    }
    check(
        free_ok && kernel_ok && order >= 1.8,
        format!(
            "free spectrum max error {free_err:.2e} (<= 1e-3), uniform kernels {kernels:?} (= |chern|), \
             convergence order {order:.3} (>= 1.8)"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("kernel dimension", kernel_dimension_criterion),
        ("no zero modes for circles", circle_scan_criterion),
        ("free limit", free_limit_criterion),
        ("deficiency residual", deficiency_criterion),
        ("extension actions", extension_action_criterion),
        ("singular norms and bounds", norms_criterion),
        ("geometry suite", geometry_criterion),
        ("S2 solver validation", s2_criterion),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
