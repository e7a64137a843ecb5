//! Linking numbers by the Gauss integral after stereographic projection.

use super::curve::KnotCurve;
use super::s3::{det4, Point4};
use crate::error::{Error, Result};
use nalgebra::Vector3;
use std::f64::consts::PI;

/// Stereographic projection `S³ \ {P} → R³` in an oriented basis of `P^⊥`.
#[derive(Debug, Clone, Copy)]
pub struct Stereographic {
    pole: Point4,
    basis: [Point4; 3],
}

impl Stereographic {
    /// Projection from `pole`; the basis `(f₁, f₂, f₃)` of `P^⊥` satisfies
    /// `det(−P, f₁, f₂, f₃) > 0`, which for `P = (0, i)` gives the usual
    /// `(Re z₀, Im z₀, Re z₁)/(1 − Im z₁)`.
    pub fn new(pole: Point4) -> Self {
        let pole = pole.normalize();
        let mut basis: Vec<Point4> = Vec::with_capacity(3);
        for k in 0..4 {
            let mut e = Point4::zeros();
            e[k] = 1.0;
            let mut v = e - pole * pole.dot(&e);
            for b in &basis {
                v -= b * b.dot(&v);
            }
            if v.norm() > 0.3 && basis.len() < 3 {
                basis.push(v.normalize());
            }
        }
        let mut basis = [basis[0], basis[1], basis[2]];
        if det4(&(-pole), &basis[0], &basis[1], &basis[2]) < 0.0 {
            basis[2] = -basis[2];
        }
        Self { pole, basis }
    }

    pub fn pole(&self) -> Point4 {
        self.pole
    }

    pub fn project(&self, x: &Point4) -> Vector3<f64> {
        let c = 1.0 - x.dot(&self.pole);
        Vector3::new(
            self.basis[0].dot(x) / c,
            self.basis[1].dot(x) / c,
            self.basis[2].dot(x) / c,
        )
    }

    /// Differential of the projection applied to a tangent vector `v` at `x`.
    pub fn project_tangent(&self, x: &Point4, v: &Point4) -> Vector3<f64> {
        let c = 1.0 - x.dot(&self.pole);
        let cp = v.dot(&self.pole);
        let q = |f: &Point4| f.dot(v) / c + f.dot(x) * cp / (c * c);
        Vector3::new(q(&self.basis[0]), q(&self.basis[1]), q(&self.basis[2]))
    }
}

fn min_distance_to(curves: &[&KnotCurve], p: &Point4, step: usize) -> f64 {
    curves
        .iter()
        .flat_map(|c| c.samples().iter().step_by(step))
        .map(|q| (q - p).norm())
        .fold(f64::INFINITY, f64::min)
}

/// Candidate projection poles ranked by distance to the curves, farthest first.
pub fn projection_poles(curves: &[&KnotCurve]) -> Vec<(Point4, f64)> {
    let mut cands: Vec<Point4> = Vec::new();
    for k in 0..4 {
        for sign in [-1.0, 1.0] {
            let mut e = Point4::zeros();
            e[k] = sign;
            cands.push(e);
        }
    }
    for m in 0..16u32 {
        let v = Point4::from_fn(|i, _| if m >> i & 1 == 1 { -0.5 } else { 0.5 });
        cands.push(v);
    }
    // a deterministic low-discrepancy set on S³
    let n = 256;
    for i in 0..n {
        let u = (i as f64 + 0.5) / n as f64;
        let a = 2.0 * PI * (i as f64 * 0.618_033_988_749_894_9).fract();
        let b = 2.0 * PI * (i as f64 * 0.754_877_666_246_692_7).fract();
        let (r0, r1) = (u.sqrt(), (1.0 - u).sqrt());
        cands.push(Point4::new(r0 * a.cos(), r0 * a.sin(), r1 * b.cos(), r1 * b.sin()));
    }
    let mut ranked: Vec<(Point4, f64)> = cands
        .into_iter()
        .map(|p| {
            let d = min_distance_to(curves, &p, 4);
            (p, d)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    ranked
}

/// The Gauss double integral of two curves after projection from `pole`.
///
/// Periodic trapezoid rule on the uniform arclength samples with analytic tangents.
pub fn gauss_linking_integral(gamma1: &KnotCurve, gamma2: &KnotCurve, pole: &Point4) -> f64 {
    gauss_integral_strided(gamma1, gamma2, pole, 1)
}

fn gauss_integral_strided(gamma1: &KnotCurve, gamma2: &KnotCurve, pole: &Point4, stride: usize) -> f64 {
    let st = Stereographic::new(*pole);
    let pts = |c: &KnotCurve| -> Vec<(Vector3<f64>, Vector3<f64>)> {
        let n = c.samples().len() / stride;
        let h = c.length() / n as f64;
        (0..n)
            .map(|i| {
                let j = c.jet(i as f64 * h);
                (st.project(&j.pos), st.project_tangent(&j.pos, &j.d1) * h)
            })
            .collect()
    };
    let a = pts(gamma1);
    let b = pts(gamma2);
    let mut sum = 0.0;
    for (r1, d1) in &a {
        for (r2, d2) in &b {
            let r = r1 - r2;
            let n = r.norm();
            sum += r.dot(&d1.cross(d2)) / (n * n * n);
        }
    }
    sum / (4.0 * PI)
}

/// Trapezoid values on successively finer samples until two agree.
fn converged_integral(gamma1: &KnotCurve, gamma2: &KnotCurve, pole: &Point4) -> f64 {
    let n = gamma1.samples().len().min(gamma2.samples().len());
    let mut stride = (n / 128).max(1);
    let mut prev = gauss_integral_strided(gamma1, gamma2, pole, stride);
    while stride > 1 {
        stride /= 2;
        let v = gauss_integral_strided(gamma1, gamma2, pole, stride);
        if (v - prev).abs() < 1e-8 {
            return v;
        }
        prev = v;
    }
    prev
}

fn separation(gamma1: &KnotCurve, gamma2: &KnotCurve) -> f64 {
    // coarse pass first: chords between neighbouring samples bound the error
    let stride = 16;
    let coarse = |c: &KnotCurve| -> Vec<Point4> { c.samples().iter().step_by(stride).copied().collect() };
    let (a, b) = (coarse(gamma1), coarse(gamma2));
    let slack = stride as f64 * (gamma1.sample_spacing() + gamma2.sample_spacing());
    let d = a
        .iter()
        .flat_map(|p| b.iter().map(move |q| (p - q).norm()))
        .fold(f64::INFINITY, f64::min);
    if d > slack {
        return d - slack;
    }
    gamma1
        .samples()
        .iter()
        .map(|p| min_distance_to(&[gamma2], p, 1))
        .fold(f64::INFINITY, f64::min)
}

/// Linking number of two disjoint closed curves.
///
/// Tries the best few projection poles until the Gauss integral lands within
/// 0.05 of an integer.
pub fn linking_number(gamma1: &KnotCurve, gamma2: &KnotCurve) -> Result<i64> {
    let sep = separation(gamma1, gamma2);
    if sep < 1e-6 {
        return Err(Error::InvalidInput(format!(
            "curves are not disjoint (separation {sep:e})"
        )));
    }
    let mut tried = Vec::new();
    for (pole, dist) in projection_poles(&[gamma1, gamma2]).into_iter().take(4) {
        let v = converged_integral(gamma1, gamma2, &pole);
        let r = v.round();
        if (v - r).abs() <= 0.05 {
            return Ok(r as i64);
        }
        tried.push(format!("pole distance {dist:.3}: integral {v:.6}"));
    }
    Err(Error::Numerical(format!(
        "Gauss integral did not converge to an integer ({})",
        tried.join("; ")
    )))
}
