//! Distances between sampled submanifolds and between fluxed link configurations.
//!
//! A submanifold is represented by a point cloud carrying, at each point, the
//! derivatives of its Gauss map up to a fixed order. For a curve the Gauss map
//! is the unit tangent in R⁴; for a surface lying on a round 2-sphere it is the
//! unit 2-vector `ν ∧ n` in Λ²R⁴ ≅ R⁶, which is isometric to the tangent
//! 2-plane up to Hodge duality. Derivatives are taken in geodesic normal
//! coordinates and stored as `rows × 4^k` matrices acting on `v₁ ⊗ … ⊗ v_k`.

use super::curve::KnotCurve;
use super::flux::{flux_distance, Flux};
use super::s3::Point4;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use rayon::prelude::*;
use std::f64::consts::PI;

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn max(self, o: Self) -> Self {
        Self::new(self.lo.max(o.lo), self.hi.max(o.hi))
    }

    pub fn min(self, o: Self) -> Self {
        Self::new(self.lo.min(o.lo), self.hi.min(o.hi))
    }
}

impl std::ops::Add for Interval {
    type Output = Interval;
    fn add(self, o: Self) -> Self {
        Self::new(self.lo + o.lo, self.hi + o.hi)
    }
}

/// One sample point with its Gauss-map jets `d^k N`, `k = 0..order`.
#[derive(Debug, Clone)]
pub struct JetPoint {
    pub point: Point4,
    /// Orthonormal basis of the tangent space, used as probing directions.
    pub tangents: Vec<Point4>,
    pub jets: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone)]
pub struct SubmanifoldSample {
    dim: usize,
    measure: f64,
    points: Vec<JetPoint>,
}

fn e(i: usize) -> Point4 {
    let mut v = Point4::zeros();
    v[i] = 1.0;
    v
}

/// Matrix of a `k`-linear map `(R⁴)^k → R^rows` on the tensor basis.
fn tensor<F: Fn(&[Point4]) -> DVector<f64>>(k: usize, rows: usize, f: F) -> DMatrix<f64> {
    let cols = 4usize.pow(k as u32);
    let mut m = DMatrix::zeros(rows, cols);
    let mut args = vec![Point4::zeros(); k];
    for c in 0..cols {
        let mut idx = c;
        for a in args.iter_mut().rev() {
            *a = e(idx % 4);
            idx /= 4;
        }
        m.set_column(c, &f(&args));
    }
    m
}

fn power(v: &Point4, k: usize) -> DVector<f64> {
    let mut out = DVector::from_element(1, 1.0);
    for _ in 0..k {
        let mut next = DVector::zeros(out.len() * 4);
        for (i, x) in out.iter().enumerate() {
            for j in 0..4 {
                next[4 * i + j] = x * v[j];
            }
        }
        out = next;
    }
    out
}

/// `a ∧ b` in the basis `e_i ∧ e_j`, `i < j`.
fn wedge(a: &Point4, b: &Point4) -> DVector<f64> {
    let mut w = DVector::zeros(6);
    let mut n = 0;
    for i in 0..4 {
        for j in i + 1..4 {
            w[n] = a[i] * b[j] - a[j] * b[i];
            n += 1;
        }
    }
    w
}

fn to_dvec(v: &Point4) -> DVector<f64> {
    DVector::from_column_slice(v.as_slice())
}

impl SubmanifoldSample {
    pub fn new(dim: usize, measure: f64, points: Vec<JetPoint>) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidInput(format!("submanifold dimension {dim} not in {{1, 2}}")));
        }
        if !(measure >= 0.0) {
            return Err(Error::InvalidInput(format!("negative Hausdorff measure {measure}")));
        }
        if points.is_empty() {
            return Err(Error::InvalidInput("empty submanifold sample".into()));
        }
        let order = points[0].jets.len();
        if points.iter().any(|p| p.jets.len() != order) {
            return Err(Error::InvalidInput("jet orders differ between sample points".into()));
        }
        Ok(Self { dim, measure, points })
    }

    /// `n` equally spaced points of a knot with tangent jets of orders `0..k_max`.
    pub fn from_curve(curve: &KnotCurve, n: usize, k_max: usize) -> Result<Self> {
        if !(1..=4).contains(&k_max) {
            return Err(Error::InvalidInput(format!("curve jets available for 1 ≤ K ≤ 4, got {k_max}")));
        }
        let ell = curve.length();
        let h = 1e-3 * ell / (2.0 * PI);
        let points = (0..n)
            .into_par_iter()
            .map(|i| {
                let s = ell * i as f64 / n as f64;
                let j = curve.jet(s);
                let t = j.d1;
                let dd = |x: f64| curve.jet(s + x).d2;
                let (m2, m1, p1, p2) = (dd(-2.0 * h), dd(-h), dd(h), dd(2.0 * h));
                // T^{(k)}: analytic T', five-point differences of T'
                let derivs = [
                    t,
                    j.d2,
                    (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h),
                    (-m2 + 16.0 * m1 - 30.0 * j.d2 + 16.0 * p1 - p2) / (12.0 * h * h),
                ];
                let jets = (0..k_max)
                    .map(|k| {
                        tensor(k, 4, |v| {
                            let w: f64 = v.iter().map(|x| x.dot(&t)).product();
                            to_dvec(&(derivs[k] * w))
                        })
                    })
                    .collect();
                JetPoint { point: j.pos, tangents: vec![t], jets }
            })
            .collect();
        Self::new(1, ell, points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measure(&self) -> f64 {
        self.measure
    }

    pub fn points(&self) -> &[JetPoint] {
        &self.points
    }

    pub fn order(&self) -> usize {
        self.points[0].jets.len()
    }
}

/// A cap `{x ∈ S³ : ⟨x, n⟩ = d, ⟨x − d n, w⟩ ≥ R cos φ_max}` of the round
/// 2-sphere cut out by the hyperplane `⟨x, n⟩ = d`, where `R = √(1 − d²)`.
#[derive(Debug, Clone, Copy)]
pub struct SphericalCap {
    pub normal: Point4,
    pub offset: f64,
    pub axis: Point4,
    pub aperture: f64,
}

impl SphericalCap {
    /// The flat disk spanning a great circle: the hemisphere in direction `inward`.
    pub fn flat_disk(normal: Point4, inward: Point4) -> Self {
        Self {
            normal,
            offset: 0.0,
            axis: inward,
            aperture: PI / 2.0,
        }
    }

    pub fn radius(&self) -> f64 {
        (1.0 - self.offset * self.offset).sqrt()
    }

    pub fn area(&self) -> f64 {
        let r = self.radius();
        2.0 * PI * r * r * (1.0 - self.aperture.cos())
    }

    fn check(&self) -> Result<(Point4, Point4)> {
        if (self.normal.norm() - 1.0).abs() > 1e-10 || (self.axis.norm() - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidInput("cap normal and axis must be unit vectors".into()));
        }
        if self.normal.dot(&self.axis).abs() > 1e-10 {
            return Err(Error::InvalidInput("cap axis must be orthogonal to the normal".into()));
        }
        if !(self.offset.abs() < 1.0) || !(self.aperture > 0.0 && self.aperture <= PI) {
            return Err(Error::InvalidInput("cap offset or aperture out of range".into()));
        }
        // completion of (n, w) to an orthonormal basis of R⁴
        let mut basis = vec![self.normal, self.axis];
        for i in 0..4 {
            let mut v = e(i);
            for b in &basis {
                v -= b * b.dot(&v);
            }
            if v.norm() > 1e-6 {
                basis.push(v.normalize());
            }
            if basis.len() == 4 {
                break;
            }
        }
        Ok((basis[2], basis[3]))
    }

    /// Point at polar angle `φ` from the axis and azimuth `ψ`.
    pub fn point(&self, phi: f64, psi: f64) -> Result<Point4> {
        let (a, b) = self.check()?;
        let r = self.radius();
        Ok(self.normal * self.offset + (self.axis * phi.cos() + (a * psi.cos() + b * psi.sin()) * phi.sin()) * r)
    }

    /// Samples on `rings` latitude circles, with `per_ring` points on the widest.
    pub fn sample(&self, rings: usize, per_ring: usize, k_max: usize) -> Result<SubmanifoldSample> {
        if !(1..=4).contains(&k_max) {
            return Err(Error::InvalidInput(format!("cap jets available for 1 ≤ K ≤ 4, got {k_max}")));
        }
        let (a, b) = self.check()?;
        let r = self.radius();
        let n = self.normal;
        let c = n * self.offset;
        let mut sites = vec![(0.0, 0.0)];
        for i in 1..=rings {
            let phi = self.aperture * i as f64 / rings as f64;
            let m = ((per_ring as f64 * phi.sin() / self.aperture.sin().max(1e-300).min(1.0)).ceil() as usize)
                .clamp(4, per_ring.max(4));
            sites.extend((0..m).map(|j| (phi, 2.0 * PI * j as f64 / m as f64)));
        }
        let points = sites
            .into_par_iter()
            .map(|(phi, psi)| {
                let radial = a * psi.cos() + b * psi.sin();
                let nu = self.axis * phi.cos() + radial * phi.sin();
                let x = c + nu * r;
                let t1 = -self.axis * phi.sin() + radial * phi.cos();
                let t2 = -a * psi.sin() + b * psi.cos();
                let proj = |v: &Point4| t1 * t1.dot(v) + t2 * t2.dot(v);
                let jets = (0..k_max)
                    .map(|k| {
                        tensor(k, 6, |v| {
                            let dnu = match k {
                                0 => nu,
                                1 => proj(&v[0]) / r,
                                2 => -nu * proj(&v[0]).dot(&proj(&v[1])) / (r * r),
                                _ => {
                                    let (p, q, s) = (proj(&v[0]), proj(&v[1]), proj(&v[2]));
                                    -(p * q.dot(&s) + q * p.dot(&s) + s * p.dot(&q)) / (3.0 * r * r * r)
                                }
                            };
                            wedge(&dnu, &n)
                        })
                    })
                    .collect();
                JetPoint { point: x, tangents: vec![t1, t2], jets }
            })
            .collect();
        SubmanifoldSample::new(2, self.area(), points)
    }
}

/// Lower and upper bounds for the operator norm of a `k`-linear map.
fn norm_bounds(d: &DMatrix<f64>, k: usize, probes: &[Point4]) -> (f64, f64) {
    match k {
        0 => {
            let n = d.norm();
            (n, n)
        }
        1 => {
            let g = d.transpose() * d;
            let g4 = Matrix4::from_iterator(g.iter().copied());
            let n = SymmetricEigen::new(g4).eigenvalues.max().max(0.0).sqrt();
            (n, n)
        }
        _ => {
            let lo = probes
                .iter()
                .map(|v| (d * power(v, k)).norm())
                .fold(0.0, f64::max);
            (lo, d.norm().max(lo))
        }
    }
}

fn probes(a: &JetPoint, b: &JetPoint) -> Vec<Point4> {
    let mut base: Vec<Point4> = (0..4).map(e).collect();
    base.extend(a.tangents.iter().chain(&b.tangents).copied());
    let mut out = base.clone();
    for i in 0..base.len() {
        for j in i + 1..base.len() {
            for s in [1.0, -1.0] {
                let v = base[i] + base[j] * s;
                if v.norm() > 1e-8 {
                    out.push(v.normalize());
                }
            }
        }
    }
    out
}

/// Bounds for `|p₁ − p₂| + Σ_{k<K} 2^{−k} min(‖d^kN₁ − d^kN₂‖, 1)`.
fn pair_distance(a: &JetPoint, b: &JetPoint) -> Interval {
    let base = (a.point - b.point).norm();
    let mut iv = Interval::point(base);
    let pr = probes(a, b);
    for (k, (ja, jb)) in a.jets.iter().zip(&b.jets).enumerate() {
        let (lo, hi) = norm_bounds(&(ja - jb), k, &pr);
        let w = 0.5f64.powi(k as i32);
        iv = iv + Interval::new(w * lo.min(1.0), w * hi.min(1.0));
    }
    iv
}

fn directed(m1: &SubmanifoldSample, m2: &SubmanifoldSample) -> Interval {
    m1.points
        .par_iter()
        .map(|a| {
            m2.points
                .iter()
                .map(|b| pair_distance(a, b))
                .fold(Interval::point(f64::INFINITY), Interval::min)
        })
        .reduce(|| Interval::point(0.0), Interval::max)
}

/// Interval enclosing the jet distance of two sampled submanifolds.
///
/// Orders `0..K` are summed exactly up to norm bounds; the remaining terms are
/// covered by adding `2·2^{−K}` to the upper end.
pub fn dist_submanifold(m1: &SubmanifoldSample, m2: &SubmanifoldSample, k_max: usize) -> Result<Interval> {
    if m1.dim != m2.dim {
        return Err(Error::DimensionMismatch {
            expected: m1.dim,
            got: m2.dim,
        });
    }
    if k_max == 0 || m1.order() < k_max || m2.order() < k_max {
        return Err(Error::InvalidInput(format!(
            "jets of order {k_max} requested, samples carry {} and {}",
            m1.order(),
            m2.order()
        )));
    }
    let trim = |m: &SubmanifoldSample| -> SubmanifoldSample {
        if m.order() == k_max {
            return m.clone();
        }
        let points = m
            .points
            .iter()
            .map(|p| JetPoint { jets: p.jets[..k_max].to_vec(), ..p.clone() })
            .collect();
        SubmanifoldSample { points, ..*m }
    };
    let (a, b) = (trim(m1), trim(m2));
    let h = Interval::point((a.measure - b.measure).abs());
    let sup_inf = directed(&a, &b).max(directed(&b, &a));
    let tail = 2.0 * 0.5f64.powi(k_max as i32);
    let total = h + sup_inf;
    Ok(Interval::new(total.lo, total.hi + tail))
}

/// One link component: a spanning surface, its boundary knot and its flux.
#[derive(Debug, Clone)]
pub struct SeifertComponent {
    pub surface: SubmanifoldSample,
    pub boundary: SubmanifoldSample,
    pub flux: Flux,
}

/// `max_k [dist₂(S_k, S'_k) + dist₁(∂S_k, ∂S'_k) + dist_per(α_k, α'_k)]`.
pub fn dist_config(c1: &[SeifertComponent], c2: &[SeifertComponent], k_max: usize) -> Result<Interval> {
    if c1.len() != c2.len() {
        return Err(Error::DimensionMismatch {
            expected: c1.len(),
            got: c2.len(),
        });
    }
    let mut best = Interval::point(0.0);
    for (a, b) in c1.iter().zip(c2) {
        if a.surface.dim != 2 || a.boundary.dim != 1 {
            return Err(Error::InvalidInput("components need a surface and a boundary curve".into()));
        }
        let d = dist_submanifold(&a.surface, &b.surface, k_max)?
            + dist_submanifold(&a.boundary, &b.boundary, k_max)?
            + Interval::point(flux_distance(a.flux, b.flux).to_f64());
        best = best.max(d);
    }
    Ok(best)
}
