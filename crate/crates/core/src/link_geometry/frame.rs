//! Seifert (Darboux) frames `(T, S, N)` along knots.
//!
//! `T` is the unit tangent, `N` the oriented surface normal and `S = N × T`
//! the inward surface direction, so that `det(p, T, S, N) = +1`. With `D/ds`
//! the covariant derivative on S³ the frame obeys
//!
//! ```text
//! DT/ds =          κ_g S + κ_n N
//! DS/ds = −κ_g T         + τ_r N
//! DN/ds = −κ_n T − τ_r S
//! ```

use super::curve::{CurveJet, KnotCurve};
use super::s3::{cross, det4, from_complex, Point4};
use num_complex::Complex64;
use crate::error::{Error, Result};
use std::sync::Arc;

/// Surface normal along the curve and its arclength derivative (ambient).
#[derive(Debug, Clone, Copy)]
pub struct NormalJet {
    pub n: Point4,
    pub dn: Point4,
}

/// Oriented surface normal along a knot.
pub trait NormalField: Send + Sync {
    fn normal(&self, s: f64, jet: &CurveJet) -> NormalJet;
}

/// A normal that is constant in R⁴, as for flat disks bounded by great circles.
#[derive(Debug, Clone, Copy)]
pub struct ConstantNormal(pub Point4);

impl NormalField for ConstantNormal {
    fn normal(&self, _s: f64, _jet: &CurveJet) -> NormalJet {
        NormalJet {
            n: self.0,
            dn: Point4::zeros(),
        }
    }
}

/// A normal field given by a closure in arclength.
pub struct FnNormal<F: Fn(f64, &CurveJet) -> NormalJet + Send + Sync>(pub F);

impl<F: Fn(f64, &CurveJet) -> NormalJet + Send + Sync> NormalField for FnNormal<F> {
    fn normal(&self, s: f64, jet: &CurveJet) -> NormalJet {
        (self.0)(s, jet)
    }
}

/// Normal of the Clifford torus `|z₀| = cos a` along the `(p, q)` torus curve
/// on it, parametrised by arclength.
#[derive(Debug, Clone, Copy)]
pub struct TorusNormal {
    pub latitude: f64,
    pub p: i32,
    pub q: i32,
}

impl NormalField for TorusNormal {
    fn normal(&self, s: f64, _jet: &CurveJet) -> NormalJet {
        let (a, p, q) = (self.latitude, self.p as f64, self.q as f64);
        let v = (p * p * a.cos().powi(2) + q * q * a.sin().powi(2)).sqrt();
        let t = s / v;
        let e0 = Complex64::from_polar(1.0, p * t);
        let e1 = Complex64::from_polar(1.0, q * t);
        let i = Complex64::i();
        NormalJet {
            n: from_complex(-a.sin() * e0, a.cos() * e1),
            dn: from_complex(-a.sin() * i * p * e0, a.cos() * i * q * e1) / v,
        }
    }
}

/// The opposite orientation of another normal field.
pub struct FlippedNormal(pub Arc<dyn NormalField>);

impl NormalField for FlippedNormal {
    fn normal(&self, s: f64, jet: &CurveJet) -> NormalJet {
        let j = self.0.normal(s, jet);
        NormalJet { n: -j.n, dn: -j.dn }
    }
}

/// The frame and Darboux coefficients at one arclength value.
#[derive(Debug, Clone, Copy)]
pub struct FrameSample {
    pub s: f64,
    pub point: Point4,
    pub tangent: Point4,
    pub inward: Point4,
    pub normal: Point4,
    /// Ambient derivatives `dT/ds`, `dS/ds`, `dN/ds`.
    pub d_tangent: Point4,
    pub d_inward: Point4,
    pub d_normal: Point4,
    pub kappa_g: f64,
    pub kappa_n: f64,
    pub tau_r: f64,
}

impl FrameSample {
    /// Covariant derivatives `(DT, DS, DN)` obtained by removing the radial part.
    pub fn covariant_derivatives(&self) -> [Point4; 3] {
        let p = self.point;
        let proj = |v: Point4| v - p * v.dot(&p);
        [proj(self.d_tangent), proj(self.d_inward), proj(self.d_normal)]
    }

    /// `(DT, DS, DN)` predicted by the Darboux matrix.
    pub fn darboux_derivatives(&self) -> [Point4; 3] {
        let (t, s, n) = (self.tangent, self.inward, self.normal);
        [
            self.kappa_g * s + self.kappa_n * n,
            -self.kappa_g * t + self.tau_r * n,
            -self.kappa_n * t - self.tau_r * s,
        ]
    }
}

/// Seifert frame along a knot.
#[derive(Clone)]
pub struct FrameField {
    curve: Arc<KnotCurve>,
    normal: Arc<dyn NormalField>,
    samples: Vec<FrameSample>,
}

impl std::fmt::Debug for FrameField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrameField")
            .field("curve", &self.curve)
            .field("samples", &self.samples.len())
            .finish()
    }
}

const NORMAL_TOL: f64 = 1e-9;

fn frame_at(curve: &KnotCurve, normal: &dyn NormalField, s: f64) -> Result<FrameSample> {
    let jet = curve.jet(s);
    let NormalJet { n, dn } = normal.normal(s, &jet);
    let (p, t, dt) = (jet.pos, jet.d1, jet.d2);
    if (n.norm() - 1.0).abs() > NORMAL_TOL || n.dot(&t).abs() > NORMAL_TOL || n.dot(&p).abs() > NORMAL_TOL
    {
        return Err(Error::InvalidInput(format!(
            "surface normal at s = {s} is not a unit tangent vector orthogonal to T \
             (|N| = {}, <N,T> = {:e}, <N,p> = {:e})",
            n.norm(),
            n.dot(&t),
            n.dot(&p)
        )));
    }
    let inward = cross(&p, &n, &t);
    // d/ds of det(p, N, T, ·): the p' = T slot repeats T and drops out
    let d_inward = cross(&p, &dn, &t) + cross(&p, &n, &dt);
    let cov_t = dt + p; // DT = T' − <T', p> p and <T', p> = −1
    let cov_s = d_inward - p * d_inward.dot(&p);
    Ok(FrameSample {
        s,
        point: p,
        tangent: t,
        inward,
        normal: n,
        d_tangent: dt,
        d_inward,
        d_normal: dn,
        kappa_g: cov_t.dot(&inward),
        kappa_n: cov_t.dot(&n),
        tau_r: cov_s.dot(&n),
    })
}

/// Builds the Seifert frame of `curve` for the surface normal `normal`.
pub fn seifert_frame(curve: Arc<KnotCurve>, normal: Arc<dyn NormalField>) -> Result<FrameField> {
    let n = curve.samples().len();
    let h = curve.sample_spacing();
    let samples = (0..n)
        .map(|i| frame_at(&curve, normal.as_ref(), i as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameField {
        curve,
        normal,
        samples,
    })
}

impl FrameField {
    pub fn curve(&self) -> &Arc<KnotCurve> {
        &self.curve
    }

    pub fn normal_field(&self) -> &Arc<dyn NormalField> {
        &self.normal
    }

    /// Frame at the uniform arclength samples of the curve.
    pub fn samples(&self) -> &[FrameSample] {
        &self.samples
    }

    /// Frame at an arbitrary arclength value.
    pub fn at(&self, s: f64) -> Result<FrameSample> {
        frame_at(&self.curve, self.normal.as_ref(), self.curve.wrap(s))
    }

    /// The frame of the same curve with the surface orientation reversed.
    pub fn with_flipped_normal(&self) -> Result<FrameField> {
        seifert_frame(self.curve.clone(), Arc::new(FlippedNormal(self.normal.clone())))
    }

    /// `sup_s √(κ_g² + κ_n²)` over the samples.
    pub fn max_curvature(&self) -> f64 {
        self.samples
            .iter()
            .map(|f| f.kappa_g.hypot(f.kappa_n))
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `(T, S, N)` from orthonormality or positive orientation.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for f in &self.samples {
            let v = [f.tangent, f.inward, f.normal];
            for a in 0..3 {
                worst = worst.max(v[a].dot(&f.point).abs());
                for b in 0..3 {
                    let e = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((v[a].dot(&v[b]) - e).abs());
                }
            }
            worst = worst.max((det4(&f.point, &f.tangent, &f.inward, &f.normal) - 1.0).abs());
        }
        worst
    }

    /// Max over samples of `‖(D/ds)(T,S,N) − Darboux·(T,S,N)‖`, the left side by
    /// a five-point central difference of the frame with step `h`.
    pub fn darboux_residual(&self, h: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for f in &self.samples {
            let fr = |d: f64| self.at(f.s + d);
            let (m2, m1, p1, p2) = (fr(-2.0 * h)?, fr(-h)?, fr(h)?, fr(2.0 * h)?);
            let diff = |a: fn(&FrameSample) -> Point4| {
                (a(&m2) - 8.0 * a(&m1) + 8.0 * a(&p1) - a(&p2)) / (12.0 * h)
            };
            let fd = [diff(|x| x.tangent), diff(|x| x.inward), diff(|x| x.normal)];
            let predicted = f.darboux_derivatives();
            for k in 0..3 {
                let cov = fd[k] - f.point * fd[k].dot(&f.point);
                worst = worst.max((cov - predicted[k]).norm());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::super::curve::{GreatCircle, TorusCurve};
    use super::super::s3::{to_complex, u_frame};
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn torus_normal(a: f64, p: f64, q: f64) -> impl Fn(f64, &CurveJet) -> NormalJet {
        let n = TorusNormal { latitude: a, p: p as i32, q: q as i32 };
        move |s: f64, jet: &CurveJet| n.normal(s, jet)
    }

    fn torus_frame(a: f64, p: i32, q: i32) -> FrameField {
        let curve = Arc::new(
            KnotCurve::new(Arc::new(TorusCurve {
                latitude: a,
                p,
                q,
            }))
            .unwrap(),
        );
        seifert_frame(curve, Arc::new(FnNormal(torus_normal(a, p as f64, q as f64)))).unwrap()
    }

    #[test]
    fn great_circle_with_flat_disk_is_geodesic() {
        let p0 = Point4::new(0.6, 0.0, 0.0, 0.8);
        let u = u_frame(&p0);
        let curve = Arc::new(KnotCurve::new(Arc::new(GreatCircle::new(p0, u[2]).unwrap())).unwrap());
        let frame = seifert_frame(curve, Arc::new(ConstantNormal(u[1]))).unwrap();
        assert!(frame.orthonormality_defect() < 1e-12);
        for f in frame.samples() {
            assert!(f.kappa_g.abs() < 1e-12 && f.kappa_n.abs() < 1e-12);
            assert!(f.tau_r.abs() < 1e-12);
            // the inward direction is the other constant vector of the disk
            assert!((f.inward - frame.samples()[0].inward).norm() < 1e-12);
        }
        assert!(frame.darboux_residual(1e-3).unwrap() < 1e-10);
    }

    #[test]
    fn torus_knot_frame_matches_finite_differences() {
        for &(a, p, q) in &[(0.7, 1, 1), (0.4, 2, 3), (1.1, 3, -2)] {
            let frame = torus_frame(a, p, q);
            assert!(frame.orthonormality_defect() < 1e-12);
            assert!(frame.darboux_residual(1e-3).unwrap() < 1e-6);
            let f0 = frame.samples()[0];
            assert!(f0.kappa_g.hypot(f0.kappa_n) > 1e-3 || (p, q) == (1, 1));
            // the coefficients are constant along these symmetric curves
            for f in frame.samples() {
                assert_relative_eq!(f.kappa_g, f0.kappa_g, epsilon = 1e-9);
                assert_relative_eq!(f.kappa_n, f0.kappa_n, epsilon = 1e-9);
                assert_relative_eq!(f.tau_r, f0.tau_r, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn hopf_fiber_on_torus_has_torsion() {
        let frame = torus_frame(0.7, 1, 1);
        let f = frame.samples()[0];
        assert!(f.kappa_g.abs() < 1e-12 && f.kappa_n.abs() < 1e-12);
        assert!(f.tau_r.abs() > 0.5);
    }

    #[test]
    fn small_circle_geodesic_curvature() {
        // (cos a·e^{it}, sin a, 0) with N = e₄ has |κ_g| = tan a
        let a: f64 = 0.5;
        let raw = super::super::curve::FnCurve {
            period: 2.0 * std::f64::consts::PI,
            f: move |t: f64| {
                let e = Complex64::from_polar(a.cos(), t);
                let i = Complex64::i();
                CurveJet {
                    pos: from_complex(e, Complex64::new(a.sin(), 0.0)),
                    d1: from_complex(i * e, Complex64::new(0.0, 0.0)),
                    d2: from_complex(-e, Complex64::new(0.0, 0.0)),
                }
            },
        };
        let curve = Arc::new(KnotCurve::new(Arc::new(raw)).unwrap());
        let frame = seifert_frame(curve, Arc::new(ConstantNormal(Point4::new(0.0, 0.0, 0.0, 1.0))))
            .unwrap();
        for f in frame.samples() {
            assert_relative_eq!(f.kappa_g.abs(), a.tan(), epsilon = 1e-12);
            assert!(f.kappa_n.abs() < 1e-12);
            let (z0, _) = to_complex(&f.point);
            assert_relative_eq!(z0.norm(), a.cos(), epsilon = 1e-12);
        }
        assert!(frame.darboux_residual(1e-3).unwrap() < 1e-8);
    }

    #[test]
    fn flipping_the_normal_flips_both_curvatures_and_keeps_torsion() {
        let frame = torus_frame(0.4, 2, 3);
        let flipped = frame.with_flipped_normal().unwrap();
        for (f, g) in frame.samples().iter().zip(flipped.samples()) {
            assert_relative_eq!(g.kappa_n, -f.kappa_n, epsilon = 1e-12);
            assert_relative_eq!(g.kappa_g, -f.kappa_g, epsilon = 1e-12);
            assert_relative_eq!(g.tau_r, f.tau_r, epsilon = 1e-12);
            assert!((g.inward + f.inward).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_orthogonal_normal() {
        let p0 = Point4::new(1.0, 0.0, 0.0, 0.0);
        let u = u_frame(&p0);
        let curve = Arc::new(KnotCurve::new(Arc::new(GreatCircle::new(p0, u[2]).unwrap())).unwrap());
        assert!(seifert_frame(curve, Arc::new(ConstantNormal(u[2]))).is_err());
    }
}
