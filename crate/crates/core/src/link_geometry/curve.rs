//! Closed curves on S³ and their arclength reparametrization.

use super::s3::{check_unit, from_complex, Point4};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

/// Position and first two derivatives of a curve at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveJet {
    pub pos: Point4,
    pub d1: Point4,
    pub d2: Point4,
}

/// A smooth closed curve on S³ given analytically on `[0, period)`.
pub trait ParametrizedCurve: Send + Sync {
    fn period(&self) -> f64;
    fn jet(&self, t: f64) -> CurveJet;
}

/// `t ↦ cos t·a + sin t·b` for orthonormal `a`, `b`.
#[derive(Debug, Clone, Copy)]
pub struct GreatCircle {
    pub a: Point4,
    pub b: Point4,
}

impl GreatCircle {
    pub fn new(a: Point4, b: Point4) -> Result<Self> {
        check_unit(&a, "great circle point")?;
        check_unit(&b, "great circle direction")?;
        if a.dot(&b).abs() > 1e-10 {
            return Err(Error::InvalidInput("great circle vectors not orthogonal".into()));
        }
        Ok(Self { a, b })
    }
}

impl ParametrizedCurve for GreatCircle {
    fn period(&self) -> f64 {
        2.0 * PI
    }
    fn jet(&self, t: f64) -> CurveJet {
        let (s, c) = t.sin_cos();
        CurveJet {
            pos: c * self.a + s * self.b,
            d1: -s * self.a + c * self.b,
            d2: -c * self.a - s * self.b,
        }
    }
}

/// `t ↦ (cos a·e^{ipt}, sin a·e^{iqt})` on the Clifford torus of latitude `a`.
#[derive(Debug, Clone, Copy)]
pub struct TorusCurve {
    pub latitude: f64,
    pub p: i32,
    pub q: i32,
}

impl ParametrizedCurve for TorusCurve {
    fn period(&self) -> f64 {
        2.0 * PI
    }
    fn jet(&self, t: f64) -> CurveJet {
        let (ca, sa) = (self.latitude.cos(), self.latitude.sin());
        let (p, q) = (self.p as f64, self.q as f64);
        let e0 = Complex64::from_polar(1.0, p * t);
        let e1 = Complex64::from_polar(1.0, q * t);
        let i = Complex64::i();
        CurveJet {
            pos: from_complex(ca * e0, sa * e1),
            d1: from_complex(ca * i * p * e0, sa * i * q * e1),
            d2: from_complex(-ca * p * p * e0, -sa * q * q * e1),
        }
    }
}

/// A curve given by a closure returning its jet.
pub struct FnCurve<F: Fn(f64) -> CurveJet + Send + Sync> {
    pub period: f64,
    pub f: F,
}

impl<F: Fn(f64) -> CurveJet + Send + Sync> ParametrizedCurve for FnCurve<F> {
    fn period(&self) -> f64 {
        self.period
    }
    fn jet(&self, t: f64) -> CurveJet {
        (self.f)(t)
    }
}

/// The same curve traversed backwards.
pub struct Reversed(pub Arc<dyn ParametrizedCurve>);

impl ParametrizedCurve for Reversed {
    fn period(&self) -> f64 {
        self.0.period()
    }
    fn jet(&self, t: f64) -> CurveJet {
        let j = self.0.jet(-t);
        CurveJet {
            pos: j.pos,
            d1: -j.d1,
            d2: j.d2,
        }
    }
}

/// An arclength-parametrized closed curve on S³.
#[derive(Clone)]
pub struct KnotCurve {
    raw: Arc<dyn ParametrizedCurve>,
    length: f64,
    table_t: Vec<f64>,
    table_s: Vec<f64>,
    constant_speed: Option<f64>,
    samples: Vec<Point4>,
    base_index: usize,
}

impl fmt::Debug for KnotCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KnotCurve")
            .field("length", &self.length)
            .field("samples", &self.samples.len())
            .field("constant_speed", &self.constant_speed)
            .finish()
    }
}

pub const DEFAULT_SAMPLES: usize = 2048;

// 15-point Kronrod rule on one panel; the speed is smooth, so one panel per
// table interval is well below the required accuracy.
fn panel_length(raw: &dyn ParametrizedCurve, a: f64, b: f64) -> f64 {
    const X: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const W: [f64; 8] = [
        0.022_935_322_010_529_225,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_18,
        0.140_653_259_715_525_92,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_727_83,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = W[7] * raw.jet(c).d1.norm();
    for j in 0..7 {
        sum += W[j] * (raw.jet(c - h * X[j]).d1.norm() + raw.jet(c + h * X[j]).d1.norm());
    }
    sum * h
}

/// Reparametrizes a raw closed curve by arclength with `n_samples` uniform samples.
pub fn arclength_reparametrize(
    raw: Arc<dyn ParametrizedCurve>,
    n_samples: usize,
) -> Result<KnotCurve> {
    if n_samples < 8 {
        return Err(Error::InvalidInput("at least 8 samples required".into()));
    }
    let period = raw.period();
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidInput(format!("invalid period {period}")));
    }
    let n = n_samples;
    let table_t: Vec<f64> = (0..=n).map(|i| period * i as f64 / n as f64).collect();
    let mut speeds = Vec::with_capacity(n + 1);
    for &t in &table_t {
        let j = raw.jet(t);
        if (j.pos.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!(
                "curve leaves the unit sphere at t = {t}: |γ| = {}",
                j.pos.norm()
            )));
        }
        let v = j.d1.norm();
        if v < 1e-8 {
            return Err(Error::InvalidInput(format!(
                "degenerate parametrization at t = {t}: |γ'| = {v:e}"
            )));
        }
        speeds.push(v);
    }
    let closing = (raw.jet(0.0).pos - raw.jet(period).pos).norm();
    if closing > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "curve is not closed: |γ(0) − γ(T)| = {closing:e}"
        )));
    }
    let mean = speeds.iter().sum::<f64>() / speeds.len() as f64;
    let constant = speeds.iter().all(|v| (v - mean).abs() <= 1e-13 * mean);

    let mut table_s = vec![0.0; n + 1];
    if constant {
        for i in 0..=n {
            table_s[i] = mean * table_t[i];
        }
    } else {
        for i in 0..n {
            table_s[i + 1] = table_s[i] + panel_length(raw.as_ref(), table_t[i], table_t[i + 1]);
        }
    }
    let length = table_s[n];
    let mut curve = KnotCurve {
        raw,
        length,
        table_t,
        table_s,
        constant_speed: constant.then_some(mean),
        samples: Vec::new(),
        base_index: 0,
    };
    curve.samples = (0..n)
        .map(|i| curve.point(length * i as f64 / n as f64))
        .collect();
    Ok(curve)
}

impl KnotCurve {
    pub fn new(raw: Arc<dyn ParametrizedCurve>) -> Result<Self> {
        arclength_reparametrize(raw, DEFAULT_SAMPLES)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Uniform arclength samples `γ(iℓ/n)`.
    pub fn samples(&self) -> &[Point4] {
        &self.samples
    }

    pub fn sample_spacing(&self) -> f64 {
        self.length / self.samples.len() as f64
    }

    pub fn base_index(&self) -> usize {
        self.base_index
    }

    pub fn raw(&self) -> &Arc<dyn ParametrizedCurve> {
        &self.raw
    }

    /// Reduces an arclength value to `[0, ℓ)`.
    pub fn wrap(&self, s: f64) -> f64 {
        s.rem_euclid(self.length)
    }

    /// Raw parameter `t(s)`.
    pub fn param_at(&self, s: f64) -> f64 {
        let s = self.wrap(s);
        if let Some(v) = self.constant_speed {
            return s / v;
        }
        let idx = match self
            .table_s
            .binary_search_by(|x| x.partial_cmp(&s).expect("finite table"))
        {
            Ok(i) => return self.table_t[i],
            Err(i) => i - 1,
        };
        let (t0, s0) = (self.table_t[idx], self.table_s[idx]);
        let (t1, s1) = (self.table_t[idx + 1], self.table_s[idx + 1]);
        let mut t = t0 + (t1 - t0) * (s - s0) / (s1 - s0);
        for _ in 0..20 {
            let f = s0 + panel_length(self.raw.as_ref(), t0, t) - s;
            let dt = f / self.raw.jet(t).d1.norm();
            t -= dt;
            if dt.abs() < 1e-15 * (1.0 + t.abs()) {
                break;
            }
        }
        t
    }

    /// Position and arclength derivatives `γ'`, `γ''` at `s`.
    pub fn jet(&self, s: f64) -> CurveJet {
        let j = self.raw.jet(self.param_at(s));
        let v = j.d1.norm();
        let tangent = j.d1 / v;
        let d2 = (j.d2 - tangent * tangent.dot(&j.d2)) / (v * v);
        CurveJet {
            pos: j.pos,
            d1: tangent,
            d2,
        }
    }

    pub fn point(&self, s: f64) -> Point4 {
        self.raw.jet(self.param_at(s)).pos
    }

    pub fn tangent(&self, s: f64) -> Point4 {
        self.jet(s).d1
    }

    /// The curve with opposite orientation.
    pub fn reversed(&self) -> Result<KnotCurve> {
        arclength_reparametrize(Arc::new(Reversed(self.raw.clone())), self.samples.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature;
    use approx::assert_relative_eq;

    fn fiber() -> Arc<dyn ParametrizedCurve> {
        Arc::new(
            GreatCircle::new(Point4::new(1.0, 0.0, 0.0, 0.0), Point4::new(0.0, 1.0, 0.0, 0.0)).unwrap(),
        )
    }

    // the great circle with a non-uniform speed φ(t) = t + 0.3 sin t
    fn wobbly() -> Arc<dyn ParametrizedCurve> {
        Arc::new(FnCurve {
            period: 2.0 * PI,
            f: |t: f64| {
                let phi = t + 0.3 * t.sin();
                let dphi = 1.0 + 0.3 * t.cos();
                let ddphi = -0.3 * t.sin();
                let (s, c) = phi.sin_cos();
                CurveJet {
                    pos: Point4::new(c, 0.0, s, 0.0),
                    d1: Point4::new(-s, 0.0, c, 0.0) * dphi,
                    d2: Point4::new(-c, 0.0, -s, 0.0) * dphi * dphi
                        + Point4::new(-s, 0.0, c, 0.0) * ddphi,
                }
            },
        })
    }

    #[test]
    fn great_circle_length() {
        let k = KnotCurve::new(fiber()).unwrap();
        assert_relative_eq!(k.length(), 2.0 * PI, epsilon = 1e-14);
    }

    #[test]
    fn unit_speed_input_is_left_alone() {
        let raw = fiber();
        let k = KnotCurve::new(raw.clone()).unwrap();
        for (i, p) in k.samples().iter().enumerate() {
            let t = k.length() * i as f64 / k.samples().len() as f64;
            assert_eq!(*p, raw.jet(t).pos);
        }
    }

    #[test]
    fn wobbly_circle_length_matches_quadrature() {
        let raw = wobbly();
        let k = KnotCurve::new(raw.clone()).unwrap();
        let oracle = quadrature::integrate(|t| raw.jet(t).d1.norm(), 0.0, 2.0 * PI, 1e-14, 1e-14)
            .unwrap()
            .value;
        assert_relative_eq!(k.length(), oracle, epsilon = 1e-12);
        assert_relative_eq!(k.length(), 2.0 * PI, epsilon = 1e-8);
        // the samples are now equally spaced along the circle
        let n = k.samples().len();
        for i in 0..n {
            let d = super::super::s3::geodesic_distance(&k.samples()[i], &k.samples()[(i + 1) % n]);
            assert_relative_eq!(d, k.sample_spacing(), epsilon = 1e-9);
        }
        for &s in &[0.1, 1.7, 4.0] {
            let j = k.jet(s);
            assert_relative_eq!(j.d1.norm(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(j.d1.dot(&j.d2), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_and_off_sphere_curves() {
        let stalled = Arc::new(FnCurve {
            period: 2.0 * PI,
            f: |t: f64| {
                let phi = t - t.sin();
                let dphi = 1.0 - t.cos();
                let (s, c) = phi.sin_cos();
                CurveJet {
                    pos: Point4::new(c, s, 0.0, 0.0),
                    d1: Point4::new(-s, c, 0.0, 0.0) * dphi,
                    d2: Point4::zeros(),
                }
            },
        });
        assert!(KnotCurve::new(stalled).is_err());
        let off = Arc::new(FnCurve {
            period: 2.0 * PI,
            f: |t: f64| CurveJet {
                pos: Point4::new(2.0 * t.cos(), 2.0 * t.sin(), 0.0, 0.0),
                d1: Point4::new(-2.0 * t.sin(), 2.0 * t.cos(), 0.0, 0.0),
                d2: Point4::zeros(),
            },
        });
        assert!(KnotCurve::new(off).is_err());
    }

    #[test]
    fn reversal_flips_tangent() {
        let k = KnotCurve::new(wobbly()).unwrap();
        let r = k.reversed().unwrap();
        assert_relative_eq!(k.length(), r.length(), epsilon = 1e-12);
        let s = 1.3;
        let p = r.point(s);
        let j = r.jet(s);
        let back = k.jet(k.length() - s);
        assert!((p - back.pos).norm() < 1e-9);
        assert!((j.d1 + back.d1).norm() < 1e-9);
    }
}
