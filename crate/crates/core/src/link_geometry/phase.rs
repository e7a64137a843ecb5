//! Linking slopes and the phase-jump functions that remove surface cuts.

use super::curve::KnotCurve;
use super::frame::FrameField;
use super::s3::Point4;
use super::tubular::TubularChart;
use crate::error::{domain, Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// `c_k = Σ_{k'≠k} 2π α_{k'} link(γ_{k'}, γ_k)`.
pub fn slope_c_k(alphas: &[f64], link: &[Vec<i64>], k: usize) -> Result<f64> {
    let n = alphas.len();
    if link.len() != n || link.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: link.len(),
        });
    }
    for i in 0..n {
        if link[i][i] != 0 {
            return Err(Error::InvalidInput(format!("link matrix has nonzero diagonal at {i}")));
        }
        for j in 0..i {
            if link[i][j] != link[j][i] {
                return Err(Error::InvalidInput("link matrix is not symmetric".into()));
            }
        }
    }
    if k >= n {
        return Err(domain("slope_c_k", format!("component index {k} out of range 0..{n}")));
    }
    Ok((0..n)
        .filter(|&j| j != k)
        .map(|j| 2.0 * PI * alphas[j] * link[j][k] as f64)
        .sum())
}

/// The flat hemisphere spanning a great circle, described by its constant
/// unit normal `N` and inward direction `S`.
#[derive(Debug, Clone, Copy)]
pub struct DiskSurface {
    pub normal: Point4,
    pub inward: Point4,
}

/// A transverse intersection of a knot with a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Arclength on the crossing knot.
    pub s: f64,
    /// `sign⟨T, N⟩` at the intersection.
    pub sign: i32,
}

impl DiskSurface {
    /// The disk of a great circle whose Seifert frame has constant `N` and `S`.
    pub fn from_frame(frame: &FrameField) -> Result<Self> {
        let f0 = frame.samples()[0];
        for f in frame.samples() {
            if (f.normal - f0.normal).norm() > 1e-9 || (f.inward - f0.inward).norm() > 1e-9 {
                return Err(Error::InvalidInput(
                    "only flat disks spanning great circles are supported".into(),
                ));
            }
        }
        Ok(Self {
            normal: f0.normal,
            inward: f0.inward,
        })
    }

    /// Signed height `⟨p, N⟩` above the 3-plane of the disk.
    pub fn height(&self, p: &Point4) -> f64 {
        p.dot(&self.normal)
    }

    pub fn contains_in_plane(&self, p: &Point4) -> bool {
        p.dot(&self.inward) > 0.0
    }

    /// All transverse crossings of `curve` through the disk.
    pub fn crossings(&self, curve: &KnotCurve) -> Vec<Crossing> {
        let n = curve.samples().len();
        let h = curve.sample_spacing();
        let mut out = Vec::new();
        for i in 0..n {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            let (fa, fb) = (self.height(&curve.point(a)), self.height(&curve.point(b)));
            if fa == 0.0 || fa.signum() == fb.signum() {
                if fa != 0.0 || fb == 0.0 {
                    continue;
                }
            }
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = self.height(&curve.point(mid));
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
                if hi - lo < 1e-15 * curve.length() {
                    break;
                }
            }
            let s = curve.wrap(0.5 * (lo + hi));
            let j = curve.jet(s);
            if self.contains_in_plane(&j.pos) {
                let slope = j.d1.dot(&self.normal);
                if slope != 0.0 {
                    out.push(Crossing {
                        s,
                        sign: slope.signum() as i32,
                    });
                }
            }
        }
        out
    }
}

/// A cut of the tube around `γ_k` by the spanning surface of `γ_{k'}`.
#[derive(Debug, Clone, Copy)]
pub struct Cut {
    pub surface: DiskSurface,
    pub crossing: Crossing,
}

impl Cut {
    /// Lift of the arclength coordinate to `(0, ℓ)` measured from the cut.
    ///
    /// Near the cut the side is decided by the surface height, so the lift is
    /// continuous off the surface and jumps by `ℓ` across it.
    pub fn lift(&self, chart: &TubularChart, p: &Point4) -> Result<f64> {
        let ell = chart.length();
        let c = chart.tubular_coords(p)?;
        let rel = (c.s - self.crossing.s).rem_euclid(ell);
        let near = rel.min(ell - rel) < 0.25 * ell;
        if !near {
            return Ok(rel);
        }
        let h = self.surface.height(p) * self.crossing.sign as f64;
        if h.abs() < 1e-13 && self.surface.contains_in_plane(p) {
            return Err(domain("phase_jump", "point lies on the cut surface"));
        }
        // past the surface in the crossing direction means a small lift
        Ok(if h > 0.0 {
            if rel > 0.5 * ell {
                rel - ell
            } else {
                rel
            }
        } else if rel < 0.5 * ell {
            rel + ell
        } else {
            rel
        })
    }
}

/// `b₁ = −2π α σ` for a crossing of sign `σ`.
pub fn jump_exponent(alpha: f64, crossing_sign: i32) -> f64 {
    -2.0 * PI * alpha * crossing_sign as f64
}

/// `E_{k,k'}(p) = exp(−i b₁ s_{k,k'}(p)/ℓ_k)` for a single crossing.
pub fn phase_jump_single(chart: &TubularChart, cut: &Cut, alpha: f64, p: &Point4) -> Result<Complex64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(domain("phase_jump_single", format!("flux {alpha} outside [0, 1)")));
    }
    if cut.crossing.sign.abs() != 1 {
        return Err(domain("phase_jump_single", "crossing sign must be ±1"));
    }
    let b1 = jump_exponent(alpha, cut.crossing.sign);
    let s = cut.lift(chart, p)?;
    Ok(Complex64::from_polar(1.0, -b1 * s / chart.length()))
}

/// Product of single-crossing phases over several crossings of the same surface.
///
/// Agrees with the many-crossing construction up to a constant phase.
pub fn phase_jump_multi(chart: &TubularChart, cuts: &[Cut], alpha: f64, p: &Point4) -> Result<Complex64> {
    let mut e = Complex64::new(1.0, 0.0);
    for cut in cuts {
        e *= phase_jump_single(chart, cut, alpha, p)?;
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::frame::seifert_frame;
    use super::super::hopf::{fiber_disk_normal, hopf_preimage, s2_from_angles, S2Point};
    use super::super::linking::linking_number;
    use super::super::tubular::TubeCoords;
    use super::*;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn fiber_frame(v: &S2Point) -> FrameField {
        let curve = Arc::new(hopf_preimage(v).unwrap());
        seifert_frame(curve, Arc::new(fiber_disk_normal(v).unwrap())).unwrap()
    }

    #[test]
    fn slopes() {
        let link = vec![vec![0, 1], vec![1, 0]];
        assert_relative_eq!(slope_c_k(&[0.3, 0.7], &link, 0).unwrap(), 2.0 * PI * 0.7);
        assert_relative_eq!(slope_c_k(&[0.3, 0.7], &link, 1).unwrap(), 2.0 * PI * 0.3);
        assert_eq!(slope_c_k(&[0.0, 0.0], &link, 0).unwrap(), 0.0);
        let l3 = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        assert_relative_eq!(slope_c_k(&[0.2, 0.3, 0.4], &l3, 0).unwrap(), 2.0 * PI * 0.7, epsilon = 1e-14);
        assert!(slope_c_k(&[0.2, 0.3, 0.4], &l3, 3).is_err());
        assert!(slope_c_k(&[0.2, 0.3], &vec![vec![0, 1], vec![2, 0]], 0).is_err());
        assert!(slope_c_k(&[0.2, 0.3], &vec![vec![1, 1], vec![1, 0]], 0).is_err());
    }

    #[test]
    fn disk_crossings_count_the_linking_number() {
        let vs = [S2Point::new(1.0, 0.0, 0.0), s2_from_angles(1.2, 0.5), s2_from_angles(2.5, -2.0)];
        for a in &vs {
            for b in &vs {
                if a == b {
                    continue;
                }
                let disk = DiskSurface::from_frame(&fiber_frame(b)).unwrap();
                let curve = hopf_preimage(a).unwrap();
                let cr = disk.crossings(&curve);
                let algebraic: i64 = cr.iter().map(|c| c.sign as i64).sum();
                assert_eq!(cr.len(), 1);
                assert_eq!(algebraic, linking_number(&curve, &hopf_preimage(b).unwrap()).unwrap());
            }
        }
    }

    fn setup() -> (TubularChart, Cut) {
        let a = S2Point::new(1.0, 0.0, 0.0);
        let b = s2_from_angles(1.3, 0.4);
        let chart = TubularChart::new(fiber_frame(&a), 0.3).unwrap();
        let disk = DiskSurface::from_frame(&fiber_frame(&b)).unwrap();
        let crossing = disk.crossings(chart.frame().curve())[0];
        (chart, Cut { surface: disk, crossing })
    }

    #[test]
    fn plug_in_values() {
        let (chart, cut) = setup();
        let ell = chart.length();
        let mid = chart
            .coords_to_point(TubeCoords { s: cut.crossing.s + ell / 2.0, rho: 0.1, theta: 0.3 })
            .unwrap();
        assert_eq!(phase_jump_single(&chart, &cut, 0.0, &mid).unwrap(), Complex64::new(1.0, 0.0));
        let forced = Cut { crossing: Crossing { sign: 1, ..cut.crossing }, ..cut };
        let e = phase_jump_single(&chart, &forced, 0.5, &mid).unwrap();
        assert!((e - Complex64::from_polar(1.0, PI / 2.0)).norm() < 1e-9);
    }

    #[test]
    fn jump_across_the_cut_and_winding() {
        let (chart, cut) = setup();
        let alpha = 0.37;
        let b1 = jump_exponent(alpha, cut.crossing.sign);
        // closed loop at fixed (ρ, θ); the tilted surface meets it once
        let n = 4000;
        let ell = chart.length();
        let ds = ell / n as f64;
        let smooth = Complex64::from_polar(1.0, -b1 * ds / ell);
        let at = |i: usize| {
            let s = cut.crossing.s + ell / 2.0 + ds * (i as f64 + 0.5);
            let p = chart.coords_to_point(TubeCoords { s, rho: 0.05, theta: 1.0 }).unwrap();
            phase_jump_single(&chart, &cut, alpha, &p).unwrap()
        };
        let values: Vec<Complex64> = (0..=n).map(at).collect();
        let mut continued = 0.0;
        let mut jumps = Vec::new();
        for w in values.windows(2) {
            assert_relative_eq!(w[1].norm(), 1.0, epsilon = 1e-14);
            let r = w[1] / w[0];
            if (r - smooth).norm() > 1e-9 {
                jumps.push(r / smooth);
                continued += smooth.arg();
            } else {
                continued += r.arg();
            }
        }
        // continuing the lift once around multiplies by e^{−i b₁}
        assert_relative_eq!(continued, -b1, epsilon = 1e-9);
        // so the single-valued function jumps by e^{i b₁} across the cut
        assert_eq!(jumps.len(), 1);
        assert!((jumps[0] - Complex64::from_polar(1.0, b1)).norm() < 1e-9);
        assert!((values[n] - values[0]).norm() < 1e-9);
    }

    #[test]
    fn rejects_points_on_the_cut() {
        let (chart, cut) = setup();
        let f = chart.frame().at(cut.crossing.s).unwrap();
        // move off the axis inside the disk plane
        let v = cut.surface.inward - f.tangent * f.tangent.dot(&cut.surface.inward);
        let v = (v - f.point * f.point.dot(&v)).normalize();
        let p = (f.point * 0.05f64.cos() + v * 0.05f64.sin()).normalize();
        let p = p - cut.surface.normal * cut.surface.height(&p);
        let p = p.normalize();
        assert!(phase_jump_single(&chart, &cut, 0.3, &p).is_err());
    }

    #[test]
    fn multi_crossing_product_matches_explicit_formula() {
        let (chart, cut) = setup();
        let ell = chart.length();
        let disk2 = DiskSurface::from_frame(&fiber_frame(&s2_from_angles(2.2, -1.4))).unwrap();
        let crossing2 = disk2.crossings(chart.frame().curve())[0];
        let second = Cut { surface: disk2, crossing: crossing2 };
        let alpha = 0.3;
        let cuts = [cut, second];
        let b: Vec<f64> = cuts.iter().map(|c| jump_exponent(alpha, c.crossing.sign)).collect();
        let d2 = (crossing2.s - cut.crossing.s).rem_euclid(ell);
        let mut offset = None;
        let mut checked = 0;
        for i in 0..64 {
            let rel = ell * (i as f64 + 0.5) / 64.0;
            if (rel - d2).abs() < 0.3 || rel < 0.3 || rel > ell - 0.3 {
                continue;
            }
            let p = chart
                .coords_to_point(TubeCoords { s: cut.crossing.s + rel, rho: 0.02, theta: 2.0 })
                .unwrap();
            let past_second = if rel > d2 { 1.0 } else { 0.0 };
            let explicit = Complex64::from_polar(1.0, -(b[0] + b[1]) * rel / ell + b[1] * past_second);
            let ratio = phase_jump_multi(&chart, &cuts, alpha, &p).unwrap() / explicit;
            match offset {
                None => offset = Some(ratio),
                Some(o) => assert!((ratio - o).norm() < 1e-9),
            }
            checked += 1;
        }
        assert!(checked > 40);
    }
}
