//! The Hopf fibration `S³ → S²` and its fibers.

use super::curve::{GreatCircle, KnotCurve};
use super::frame::ConstantNormal;
use super::s3::{check_unit, from_complex, mul_i, u_frame, Point4};
use crate::error::{Error, Result};
use nalgebra::Vector3;
use num_complex::Complex64;
use std::sync::Arc;

pub type S2Point = Vector3<f64>;

/// `(|z₀|² − |z₁|², 2 Re(z₀ z̄₁), 2 Im(z₀ z̄₁))`.
pub fn hopf_map(z0: Complex64, z1: Complex64) -> Result<S2Point> {
    let r = z0.norm_sqr() + z1.norm_sqr();
    if (r - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!(
            "hopf_map expects |z₀|² + |z₁|² = 1, got {r}"
        )));
    }
    let w = z0 * z1.conj();
    Ok(S2Point::new(z0.norm_sqr() - z1.norm_sqr(), 2.0 * w.re, 2.0 * w.im))
}

/// A point of the fiber over `v`.
pub fn fiber_base_point(v: &S2Point) -> Result<Point4> {
    if (v.norm() - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidInput(format!("|v| = {} is not 1", v.norm())));
    }
    let (z0, z1) = if v[0] > -0.5 {
        let z0 = ((1.0 + v[0]) / 2.0).sqrt();
        (Complex64::new(z0, 0.0), Complex64::new(v[1], -v[2]) / (2.0 * z0))
    } else {
        let z1 = ((1.0 - v[0]) / 2.0).sqrt();
        (Complex64::new(v[1], v[2]) / (2.0 * z1), Complex64::new(z1, 0.0))
    };
    Ok(from_complex(z0, z1))
}

/// The fiber `t ↦ e^{it}(z₀, z₁)` over `v`, oriented along `u₃ = (iz₀, iz₁)`.
pub fn hopf_preimage(v: &S2Point) -> Result<KnotCurve> {
    let p0 = fiber_base_point(v)?;
    KnotCurve::new(Arc::new(GreatCircle::new(p0, mul_i(&p0))?))
}

/// Normal of the flat disk spanning the fiber over `v`: the constant vector `u₂(p₀)`.
///
/// The disk is the hemisphere of the great 2-sphere through the fiber in the
/// direction of the inward vector `S = N × T`.
pub fn fiber_disk_normal(v: &S2Point) -> Result<ConstantNormal> {
    let p0 = fiber_base_point(v)?;
    check_unit(&p0, "fiber base point")?;
    Ok(ConstantNormal(u_frame(&p0)[1]))
}

/// `(colatitude, longitude)` to a unit vector, with the north pole `(1, 0, 0)`.
pub fn s2_from_angles(colatitude: f64, longitude: f64) -> S2Point {
    S2Point::new(
        colatitude.cos(),
        colatitude.sin() * longitude.cos(),
        colatitude.sin() * longitude.sin(),
    )
}
