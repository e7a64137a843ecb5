//! Points and tangent vectors of S³ ⊂ C² ≅ R⁴.
//!
//! A point `(z₀, z₁)` is stored as `(Re z₀, Im z₀, Re z₁, Im z₁)`. A tangent
//! basis `(a, b, c)` at `p` is positively oriented when `det(p, a, b, c) > 0`;
//! this agrees with the standard orientation of R³ under stereographic
//! projection from `(0, i)`.

use crate::error::{Error, Result};
use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;

pub type Point4 = Vector4<f64>;

const TANGENT_TOL: f64 = 1e-10;

pub fn from_complex(z0: Complex64, z1: Complex64) -> Point4 {
    Point4::new(z0.re, z0.im, z1.re, z1.im)
}

pub fn to_complex(p: &Point4) -> (Complex64, Complex64) {
    (Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3]))
}

/// Multiplication by `i` on C².
pub fn mul_i(p: &Point4) -> Point4 {
    Point4::new(-p[1], p[0], -p[3], p[2])
}

pub fn det4(a: &Point4, b: &Point4, c: &Point4, d: &Point4) -> f64 {
    Matrix4::from_columns(&[*a, *b, *c, *d]).determinant()
}

/// Cross product in `T_p S³`: the vector `w` with `⟨w, x⟩ = det(p, a, b, x)`.
pub fn cross(p: &Point4, a: &Point4, b: &Point4) -> Point4 {
    let m = Matrix4::from_columns(&[*p, *a, *b, Point4::zeros()]);
    let mut out = Point4::zeros();
    for w in 0..4 {
        let mut mm = m;
        mm[(w, 3)] = 1.0;
        out[w] = mm.determinant();
    }
    out
}

pub fn is_positive_frame(p: &Point4, a: &Point4, b: &Point4, c: &Point4) -> bool {
    det4(p, a, b, c) > 0.0
}

/// The global frame `u₁ = (−i z̄₁, i z̄₀)`, `u₂ = (z̄₁, −z̄₀)`, `u₃ = (i z₀, i z₁)`.
///
/// The frame is orthonormal, tangent and positively oriented at every point.
pub fn u_frame(p: &Point4) -> [Point4; 3] {
    let (z0, z1) = to_complex(p);
    let i = Complex64::i();
    [
        from_complex(-i * z1.conj(), i * z0.conj()),
        from_complex(z1.conj(), -z0.conj()),
        from_complex(i * z0, i * z1),
    ]
}

pub fn check_unit(p: &Point4, what: &str) -> Result<()> {
    if (p.norm() - 1.0).abs() > TANGENT_TOL {
        return Err(Error::InvalidInput(format!(
            "{what} must have unit norm, |·| = {}",
            p.norm()
        )));
    }
    Ok(())
}

/// `cos(t)·p + sin(t)·v`, the unit-speed great circle through `p` with velocity `v`.
pub fn exp_geodesic(p: &Point4, v: &Point4, t: f64) -> Result<Point4> {
    check_unit(p, "base point")?;
    check_unit(v, "direction")?;
    if p.dot(v).abs() > TANGENT_TOL {
        return Err(Error::InvalidInput(format!(
            "direction is not tangent: <p, v> = {:e}",
            p.dot(v)
        )));
    }
    Ok(t.cos() * p + t.sin() * v)
}

/// Great-circle distance on the unit sphere.
pub fn geodesic_distance(p: &Point4, q: &Point4) -> f64 {
    2.0 * (0.5 * (p - q).norm()).min(1.0).asin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit(v: [f64; 4]) -> Point4 {
        Point4::from(v).normalize()
    }

    #[test]
    fn geodesic_endpoints() {
        let p = Point4::new(1.0, 0.0, 0.0, 0.0);
        let v = Point4::new(0.0, 0.0, 1.0, 0.0);
        assert_eq!(exp_geodesic(&p, &v, 0.0).unwrap(), p);
        assert!((exp_geodesic(&p, &v, std::f64::consts::FRAC_PI_2).unwrap() - v).norm() < 1e-16);
        assert!(exp_geodesic(&p, &Point4::new(0.6, 0.8, 0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn u_frame_is_positive_orthonormal() {
        let p = unit([0.3, -0.2, 0.8, 0.4]);
        let u = u_frame(&p);
        for a in 0..3 {
            assert_relative_eq!(u[a].dot(&p), 0.0, epsilon = 1e-15);
            for b in 0..3 {
                let e = if a == b { 1.0 } else { 0.0 };
                assert_relative_eq!(u[a].dot(&u[b]), e, epsilon = 1e-15);
            }
        }
        assert_relative_eq!(det4(&p, &u[0], &u[1], &u[2]), 1.0, epsilon = 1e-14);
        // u₁ × u₂ = u₃ with the orientation above
        assert!((cross(&p, &u[0], &u[1]) - u[2]).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn geodesic_distance_is_parameter(a in prop::array::uniform4(-1.0f64..1.0),
                                          b in prop::array::uniform4(-1.0f64..1.0),
                                          t in 0.0f64..3.0) {
            let p = Point4::from(a);
            prop_assume!(p.norm() > 0.1);
            let p = p.normalize();
            let b = Point4::from(b);
            let v = b - p * p.dot(&b);
            prop_assume!(v.norm() > 0.1);
            let v = v.normalize();
            let q = exp_geodesic(&p, &v, t).unwrap();
            prop_assert!((q.norm() - 1.0).abs() < 1e-15);
            prop_assert!((geodesic_distance(&p, &q) - t).abs() < 1e-12);
        }
    }
}
