//! Tubular coordinates `(s, ρ, θ)` around a knot.
//!
//! `p = cos ρ·γ(s) + sin ρ·(cos θ·S(s) + sin θ·N(s))`.

use super::frame::FrameField;
use super::s3::{det4, Point4};
use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

/// Tubular chart of radius `epsilon` with working radius `delta`.
#[derive(Debug, Clone)]
pub struct TubularChart {
    frame: FrameField,
    epsilon: f64,
    delta: f64,
}

/// Tubular coordinates of a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeCoords {
    pub s: f64,
    pub rho: f64,
    pub theta: f64,
}

/// Images of the coordinate vector fields at a point.
#[derive(Debug, Clone, Copy)]
pub struct Pushforward {
    pub point: Point4,
    pub d_s: Point4,
    pub d_rho: Point4,
    pub d_theta: Point4,
}

/// `ε·min{1, 1/(‖κ‖ + √(ε + ‖κ‖²))}` with `‖κ‖ = sup_s √(κ_g² + κ_n²)`.
pub fn delta_bound(frame: &FrameField, epsilon: f64) -> f64 {
    delta_bound_from_curvature(frame.max_curvature(), epsilon)
}

pub fn delta_bound_from_curvature(kappa: f64, epsilon: f64) -> f64 {
    epsilon * (1.0f64).min(1.0 / (kappa + (epsilon + kappa * kappa).sqrt()))
}

impl TubularChart {
    /// Chart of radius `epsilon`; the working radius is set just inside [`delta_bound`].
    pub fn new(frame: FrameField, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < PI / 2.0) {
            return Err(domain("TubularChart::new", format!("epsilon {epsilon} outside (0, π/2)")));
        }
        let delta = delta_bound(&frame, epsilon) * (1.0 - 1e-9);
        Ok(Self {
            frame,
            epsilon,
            delta,
        })
    }

    pub fn frame(&self) -> &FrameField {
        &self.frame
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn length(&self) -> f64 {
        self.frame.curve().length()
    }

    pub fn coords_to_point(&self, c: TubeCoords) -> Result<Point4> {
        let f = self.frame.at(c.s)?;
        let (st, ct) = c.theta.sin_cos();
        let (sr, cr) = c.rho.sin_cos();
        Ok(cr * f.point + sr * (ct * f.inward + st * f.normal))
    }

    /// Inverts [`coords_to_point`](Self::coords_to_point) for `0 < dist(p, γ) < ε`.
    pub fn tubular_coords(&self, p: &Point4) -> Result<TubeCoords> {
        if (p.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("point is not on the unit sphere".into()));
        }
        let curve = self.frame.curve();
        let (best, _) = curve
            .samples()
            .iter()
            .enumerate()
            .map(|(i, q)| (i, q.dot(p)))
            .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        let mut s = best as f64 * curve.sample_spacing();
        // maximise <p, γ(s)>: Newton on <p, T(s)> = 0
        let mut converged = false;
        for _ in 0..50 {
            let j = curve.jet(s);
            let g = p.dot(&j.d1);
            let dg = p.dot(&j.d2);
            if dg >= 0.0 {
                break;
            }
            let step = g / dg;
            s -= step;
            if step.abs() < 1e-15 * curve.length() {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Numerical(format!(
                "projection onto the curve did not converge near s = {s}"
            )));
        }
        let s = curve.wrap(s);
        let f = self.frame.at(s)?;
        let c = p.dot(&f.point);
        let v = p - c * f.point;
        let vn = v.norm();
        if vn < 1e-14 {
            return Err(domain("tubular_coords", "point lies on the curve; θ is undefined"));
        }
        let rho = vn.atan2(c);
        if rho >= self.epsilon {
            return Err(domain(
                "tubular_coords",
                format!("point at distance {rho} lies outside the tube of radius {}", self.epsilon),
            ));
        }
        let theta = v.dot(&f.normal).atan2(v.dot(&f.inward)).rem_euclid(2.0 * PI);
        Ok(TubeCoords { s, rho, theta })
    }

    /// `h = cos ρ − sin ρ (κ_g(s) cos θ + κ_n(s) sin θ)`.
    ///
    /// Inside the working radius the bound `h ≥ 1 − ε` is checked.
    pub fn h_factor(&self, s: f64, rho: f64, theta: f64) -> Result<f64> {
        if !(rho >= 0.0 && rho < self.epsilon) {
            return Err(domain("h_factor", format!("rho {rho} outside [0, ε)")));
        }
        let f = self.frame.at(s)?;
        let h = rho.cos() - rho.sin() * (f.kappa_g * theta.cos() + f.kappa_n * theta.sin());
        if rho < self.delta && h < 1.0 - self.epsilon {
            return Err(Error::Numerical(format!(
                "h = {h} below 1 − ε inside the working radius (ρ = {rho})"
            )));
        }
        Ok(h)
    }

    /// Images of `∂_s`, `∂_ρ`, `∂_θ`, with `∂_s` from the ambient frame derivatives.
    pub fn pushforward(&self, c: TubeCoords) -> Result<Pushforward> {
        let f = self.frame.at(c.s)?;
        let (st, ct) = c.theta.sin_cos();
        let (sr, cr) = c.rho.sin_cos();
        let radial = ct * f.inward + st * f.normal;
        Ok(Pushforward {
            point: cr * f.point + sr * radial,
            d_s: cr * f.tangent + sr * (ct * f.d_inward + st * f.d_normal),
            d_rho: -sr * f.point + cr * radial,
            d_theta: sr * (-st * f.inward + ct * f.normal),
        })
    }

    /// `|det[p, ∂_s, ∂_ρ, ∂_θ]|`, the volume density of the chart.
    pub fn volume_factor(&self, c: TubeCoords) -> Result<f64> {
        let pf = self.pushforward(c)?;
        Ok(det4(&pf.point, &pf.d_s, &pf.d_rho, &pf.d_theta).abs())
    }
}
