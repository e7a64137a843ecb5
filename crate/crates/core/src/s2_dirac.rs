//! Dirac operators on the radius-½ sphere with a uniform field and
//! Aharonov–Bohm fluxes sitting at the poles.
//!
//! In the azimuthal sector `e^{i(q+½)φ}` the operator reduces to the pair
//! `A = −∂_u + W`, `A*` in the colatitude `u`, with `W = F'` and
//!
//! ```text
//! F(u) = P ln tan(u/2) − b ln sin u,   b = (chern − α_N − α_S)/2,   P = q + ½ + α_N + b.
//! ```
//!
//! Near the poles `F ~ ν_N ln u` and `F ~ −ν_S ln(π − u)` with
//! `ν_N = q + ½ + α_N`, `ν_S = q + ½ + chern − α_S`.
//!
//! Each sector is discretised on a uniform staggered grid whose nodes alternate
//! between the two spin components. Node masses are cell integrals of
//! `e^{±2F}` and neighbouring nodes couple through `1/√(m_i m_{i+1})`, so
//! the scheme reproduces zero modes exactly and is second order elsewhere.
//! Which component sits next to a pole encodes the boundary condition there.
//! Physical eigenvalues are twice the chain eigenvalues (radius ½).

use crate::error::{domain, Error, Result};
use crate::model_operator::Extension;
use crate::quadrature::{gauss_legendre, integrate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::OnceLock;

const GL_POINTS: usize = 8;

fn gl_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    North,
    South,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointFlux {
    pub pole: Pole,
    pub alpha: f64,
}

/// Axisymmetric field: point fluxes at the poles plus a uniform part
/// `uniform_coefficient · vol/4`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2FieldConfig {
    pub point_fluxes: Vec<PointFlux>,
    pub uniform_coefficient: f64,
    pub chern: i64,
    #[serde(skip)]
    pub extension: Extension,
}

impl S2FieldConfig {
    pub fn new(point_fluxes: Vec<PointFlux>, uniform_coefficient: f64, chern: i64) -> Result<Self> {
        for p in &point_fluxes {
            if !(p.alpha > 0.0 && p.alpha < 1.0) {
                return Err(domain("S2FieldConfig::new", format!("point flux {} outside (0, 1)", p.alpha)));
            }
        }
        let cfg = Self {
            point_fluxes,
            uniform_coefficient,
            chern,
            extension: Extension::Minus,
        };
        for pole in [Pole::North, Pole::South] {
            if cfg.pole_flux(pole) >= 1.0 {
                return Err(domain("S2FieldConfig::new", format!("total flux at {pole:?} pole is not below 1")));
            }
        }
        let total = cfg.point_fluxes.iter().map(|p| p.alpha).sum::<f64>() + uniform_coefficient / 2.0;
        if (total - chern as f64).abs() > 1e-9 {
            return Err(domain(
                "S2FieldConfig::new",
                format!("total flux {total} does not match chern number {chern}"),
            ));
        }
        Ok(cfg)
    }

    /// No field at all.
    pub fn free() -> Self {
        Self::uniform(0)
    }

    /// Uniform field with the given Chern number and no point fluxes.
    pub fn uniform(chern: i64) -> Self {
        Self {
            point_fluxes: Vec::new(),
            uniform_coefficient: 2.0 * chern as f64,
            chern,
            extension: Extension::Minus,
        }
    }

    pub fn with_extension(mut self, extension: Extension) -> Self {
        self.extension = extension;
        self
    }

    pub fn pole_flux(&self, pole: Pole) -> f64 {
        self.point_fluxes.iter().filter(|p| p.pole == pole).map(|p| p.alpha).sum()
    }

    pub fn b(&self) -> f64 {
        self.uniform_coefficient / 4.0
    }

    /// `(2π)^{-1} ∫ β`, with the uniform part integrated numerically.
    pub fn flux_integral(&self) -> Result<f64> {
        let density = |u: f64| self.uniform_coefficient / 4.0 * u.sin() * 2.0 * PI;
        let uniform = integrate(density, 0.0, PI, 1e-13, 1e-13)?.value;
        let points: f64 = self.point_fluxes.iter().map(|p| 2.0 * PI * p.alpha).sum();
        Ok((uniform + points) / (2.0 * PI))
    }

    fn sector(&self, q: i64) -> SectorParams {
        let half = q as f64 + 0.5;
        let an = self.pole_flux(Pole::North);
        let as_ = self.pole_flux(Pole::South);
        let b = self.b();
        SectorParams {
            b,
            p: half + an + b,
            nu_north: half + an,
            nu_south: half + self.chern as f64 - as_,
        }
    }
}

/// Field for the `k`-th S² factor of a Hopf link with fluxes at the poles.
pub fn build_beta(points: &[PointFlux], c: f64, k: i64) -> Result<S2FieldConfig> {
    let total: f64 = points.iter().map(|p| p.alpha).sum::<f64>() - (c + k as f64);
    let chern = total.round();
    if (total - chern).abs() > 1e-9 {
        return Err(domain(
            "build_beta",
            format!("flux identity gives non-integer Chern number {total}"),
        ));
    }
    S2FieldConfig::new(points.to_vec(), -2.0 * (c + k as f64), chern as i64)
}

#[derive(Debug, Clone, Copy)]
struct SectorParams {
    b: f64,
    p: f64,
    nu_north: f64,
    nu_south: f64,
}

impl SectorParams {
    /// `F(u) − ν_N ln u`, smooth at the north pole.
    fn g_north(&self, u: f64) -> f64 {
        let h = 0.5 * u;
        self.p * ((h.tan() / h).ln() - std::f64::consts::LN_2) - self.b * (u.sin() / u).ln()
    }

    /// `F(u) + ν_S ln(π − u)` written in `d = π − u`, smooth at the south pole.
    fn g_south(&self, d: f64) -> f64 {
        let h = 0.5 * d;
        -self.p * ((h.tan() / h).ln() - std::f64::consts::LN_2) - self.b * (d.sin() / d).ln()
    }

    fn f(&self, u: f64) -> f64 {
        if u < 0.5 * PI {
            self.nu_north * u.ln() + self.g_north(u)
        } else {
            let d = PI - u;
            -self.nu_south * d.ln() + self.g_south(d)
        }
    }
}

/// Spin component carried by a grid node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    /// Mass density `e^{2F}`.
    Upper,
    /// Mass density `e^{−2F}`.
    Lower,
}

impl Component {
    fn flip(self) -> Self {
        match self {
            Component::Upper => Component::Lower,
            Component::Lower => Component::Upper,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Component::Upper => 1.0,
            Component::Lower => -1.0,
        }
    }
}

/// Component of the virtual node at each pole, i.e. the one that is
/// suppressed there.
fn pole_components(nu_north: f64, nu_south: f64, ext: Extension) -> (Component, Component) {
    let pick = |lower: bool| if lower { Component::Lower } else { Component::Upper };
    match ext {
        Extension::Minus => (pick(nu_north >= 0.5), pick(nu_south <= -0.5)),
        Extension::Plus => (pick(nu_north > -0.5), pick(nu_south < 0.5)),
    }
}

fn log_sum_exp(vals: &[f64], weights: &[f64]) -> f64 {
    let m = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + vals.iter().zip(weights).map(|(v, w)| w * (v - m).exp()).sum::<f64>().ln()
}

/// Number of pole-adjacent nodes dropped when the local exponent is large.
fn pole_cut(nu: f64) -> usize {
    if nu.abs() > 2.0 {
        2 * (2.0 * nu.abs()).ceil() as usize
    } else {
        0
    }
}

/// One azimuthal sector on a staggered grid.
#[derive(Debug, Clone)]
pub struct RadialSector {
    pub q: i64,
    pub n: usize,
    pub h: f64,
    pub nu_north: f64,
    pub nu_south: f64,
    components: Vec<Component>,
    log_mass: Vec<f64>,
    cut: (usize, usize),
}

impl RadialSector {
    pub fn build(config: &S2FieldConfig, q: i64, n: usize) -> Result<Self> {
        if n < 8 {
            return Err(domain("RadialSector::build", format!("grid size {n} too small")));
        }
        let sp = config.sector(q);
        let (north, south) = pole_components(sp.nu_north, sp.nu_south, config.extension);
        let (h, m) = if north == south {
            (PI / n as f64, 2 * n - 1)
        } else {
            (PI / (n as f64 + 0.5), 2 * n)
        };
        let cut = (pole_cut(sp.nu_north), pole_cut(sp.nu_south));
        if cut.0 + cut.1 + 8 > m {
            return Err(domain(
                "RadialSector::build",
                format!("grid size {n} too coarse for sector q = {q}"),
            ));
        }
        let mut components = Vec::with_capacity(m);
        let mut t = north;
        for _ in 0..m {
            t = t.flip();
            components.push(t);
        }
        let (gx, gw) = gl_rule();
        let log_mass = (0..m)
            .map(|i| {
                if i < cut.0 || i >= m - cut.1 {
                    return f64::NAN;
                }
                let s = components[i].sign();
                let u = (i + 1) as f64 * h / 2.0;
                if i == 0 {
                    pole_cell(h, 2.0 * sp.nu_north * s, |d| 2.0 * s * sp.g_north(d), gx, gw)
                } else if i == m - 1 {
                    pole_cell(PI - (u - h / 2.0), -2.0 * sp.nu_south * s, |d| 2.0 * s * sp.g_south(d), gx, gw)
                } else {
                    let vals: Vec<f64> = gx.iter().map(|x| 2.0 * s * sp.f(u + 0.5 * h * x)).collect();
                    (0.5 * h).ln() + log_sum_exp(&vals, gw)
                }
            })
            .collect();
        Ok(Self {
            q,
            n,
            h,
            nu_north: sp.nu_north,
            nu_south: sp.nu_south,
            components,
            log_mass,
            cut,
        })
    }

    /// Number of nodes including dropped ones.
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// Nodes removed next to the (north, south) pole.
    pub fn cut(&self) -> (usize, usize) {
        self.cut
    }

    /// Colatitude of node `i`.
    pub fn node(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.h / 2.0
    }

    /// Zero modes: imbalance between the two components.
    pub fn kernel_dim(&self) -> usize {
        let up = self.components.iter().filter(|c| **c == Component::Upper).count();
        up.abs_diff(self.components.len() - up)
    }

    fn active(&self) -> std::ops::Range<usize> {
        self.cut.0..self.len() - self.cut.1
    }

    /// Log masses of the active nodes.
    pub fn log_masses(&self) -> &[f64] {
        &self.log_mass[self.active()]
    }

    /// Unsymmetrised couplings `(upper, lower)`: node `i` sees `upper[i]·x_{i+1}`
    /// and node `i+1` sees `lower[i]·x_i`.
    pub fn raw_couplings(&self) -> (Vec<f64>, Vec<f64>) {
        let r = self.active();
        let mut up = Vec::with_capacity(r.len() - 1);
        let mut lo = Vec::with_capacity(r.len() - 1);
        for i in r.start..r.end - 1 {
            let s = self.components[i].sign();
            up.push(s * (-self.log_mass[i]).exp());
            lo.push(s * (-self.log_mass[i + 1]).exp());
        }
        (up, lo)
    }

    /// Off-diagonal of the symmetric chain matrix (zero diagonal).
    pub fn off_diagonal(&self) -> Vec<f64> {
        let r = self.active();
        (r.start..r.end - 1)
            .map(|i| self.components[i].sign() * (-(self.log_mass[i] + self.log_mass[i + 1]) / 2.0).exp())
            .collect()
    }

    /// Positive eigenvalues (physical scale) not exceeding `max`.
    pub fn positive_eigenvalues(&self, max: f64) -> Vec<f64> {
        let off = self.off_diagonal();
        chain_positive_eigenvalues(&off, max / 2.0).into_iter().map(|x| 2.0 * x).collect()
    }
}

/// `log ∫_0^L d^p e^{g(d)} dd` via `t = (d/L)^{p+1}`.
fn pole_cell(l: f64, p: f64, g: impl Fn(f64) -> f64, gx: &[f64], gw: &[f64]) -> f64 {
    let e = 1.0 / (p + 1.0);
    let vals: Vec<f64> = gx
        .iter()
        .map(|x| g((l * (0.5 * (x + 1.0)).powf(e)).max(f64::MIN_POSITIVE)))
        .collect();
    let w: Vec<f64> = gw.iter().map(|w| 0.5 * w).collect();
    (p + 1.0) * l.ln() - (p + 1.0).ln() + log_sum_exp(&vals, &w)
}

/// Number of eigenvalues below `x` of the zero-diagonal symmetric tridiagonal
/// matrix with off-diagonal `off`.
pub fn sturm_count(off: &[f64], x: f64) -> usize {
    let tiny = f64::MIN_POSITIVE.sqrt();
    let mut d = -x;
    let mut count = usize::from(d < 0.0);
    for e in off {
        if d.abs() < tiny {
            d = -tiny;
        }
        d = -x - e * e / d;
        count += usize::from(d < 0.0);
    }
    count
}

fn chain_positive_eigenvalues(off: &[f64], max: f64) -> Vec<f64> {
    let bound = off
        .iter()
        .zip(off.iter().skip(1).chain(std::iter::once(&0.0)))
        .map(|(a, b)| a.abs() + b.abs())
        .fold(off.first().map_or(0.0, |a| a.abs()), f64::max);
    let delta = 1e-10 * bound.max(1.0);
    let top = max.min(bound * (1.0 + 1e-12) + delta);
    let base = sturm_count(off, delta);
    let total = sturm_count(off, top);
    (base..total)
        .map(|k| {
            let (mut lo, mut hi) = (delta, top);
            while hi - lo > 4.0 * f64::EPSILON * hi {
                let mid = 0.5 * (lo + hi);
                if sturm_count(off, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

/// Grid size and convergence tolerance for the sector solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub n: usize,
    pub tolerance: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self { n: 4000, tolerance: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorEigenvalue {
    pub value: f64,
    pub error: f64,
    pub coarse: f64,
    pub fine: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSpectrum {
    pub q: i64,
    pub kernel_dim: usize,
    pub eigenvalues: Vec<SectorEigenvalue>,
    /// Some eigenvalue moved by more than the tolerance between the grids.
    pub flagged: bool,
}

/// Positive spectrum of sector `q` below `max`, Richardson-extrapolated from
/// grids `n` and `2n`.
pub fn solve_sector(config: &S2FieldConfig, q: i64, max: f64, params: SolverParams) -> Result<SectorSpectrum> {
    let coarse = RadialSector::build(config, q, params.n)?;
    let fine = RadialSector::build(config, q, 2 * params.n)?;
    let reach = max * 1.05 + 0.5;
    let ec = coarse.positive_eigenvalues(reach);
    let ef = fine.positive_eigenvalues(reach);
    let mut flagged = false;
    let mut eigenvalues = Vec::new();
    for (c, f) in ec.iter().zip(&ef) {
        let value = f + (f - c) / 3.0;
        let error = (f - c).abs() / 3.0;
        if value > max {
            break;
        }
        if error > params.tolerance {
            flagged = true;
        }
        eigenvalues.push(SectorEigenvalue {
            value,
            error,
            coarse: *c,
            fine: *f,
        });
    }
    if flagged {
        log::warn!("sector q = {q}: grids {} and {} disagree beyond {}", params.n, 2 * params.n, params.tolerance);
    }
    Ok(SectorSpectrum {
        q,
        kernel_dim: coarse.kernel_dim(),
        eigenvalues,
        flagged,
    })
}

/// Observed convergence order per eigenvalue from grids `n`, `2n`, `4n`.
pub fn observed_order(config: &S2FieldConfig, q: i64, n: usize, max: f64) -> Result<Vec<f64>> {
    let e: Vec<Vec<f64>> = [n, 2 * n, 4 * n]
        .iter()
        .map(|&k| RadialSector::build(config, q, k).map(|s| s.positive_eigenvalues(max)))
        .collect::<Result<_>>()?;
    Ok(e[0]
        .iter()
        .zip(&e[1])
        .zip(&e[2])
        .map(|((a, b), c)| ((a - b) / (b - c)).abs().log2())
        .collect())
}

/// Rigorous lower bound for positive eigenvalues in sector `q`, from
/// `E²/4 ≥ max(inf(W² + W'), inf(W² − W'))`. Returns 0 when no bound applies.
pub fn sector_lower_bound(config: &S2FieldConfig, q: i64) -> f64 {
    let sp = config.sector(q);
    let (p, b) = (sp.p, sp.b);
    let mut best: f64 = 0.0;
    if p * p + b * b + b - (2.0 * p * b + p).abs() >= 0.0 {
        best = best.max(p * p + b - (2.0 * p * b + p).abs());
    }
    if p * p + b * b - b - (2.0 * p * b - p).abs() >= 0.0 {
        best = best.max(p * p - b - (2.0 * p * b - p).abs());
    }
    2.0 * best.max(0.0).sqrt()
}

/// Sectors that may carry a zero mode.
fn kernel_sector_range(config: &S2FieldConfig) -> (i64, i64) {
    let an = config.pole_flux(Pole::North);
    let as_ = config.pole_flux(Pole::South);
    let ch = config.chern as f64;
    let ends = [0.5 - an, -0.5 - ch + as_];
    let lo = ends[0].min(ends[1]).floor() as i64 - 2;
    let hi = ends[0].max(ends[1]).ceil() as i64 + 2;
    (lo, hi)
}

/// Smallest sector range outside which every eigenvalue provably exceeds `window`.
pub fn required_q_range(config: &S2FieldConfig, window: f64) -> (i64, i64) {
    let b = config.b().abs();
    let w = (window / 2.0).max(0.0);
    let root = ((2.0 * b + 1.0) + ((2.0 * b + 1.0).powi(2) + 4.0 * (b + w * w)).sqrt()) / 2.0;
    let pmax = root.max(2.0 * b + 2.0);
    let shift = config.pole_flux(Pole::North) + config.b() + 0.5;
    let lo = (-pmax - shift).ceil() as i64;
    let hi = (pmax - shift).floor() as i64;
    let (klo, khi) = kernel_sector_range(config);
    (lo.min(klo), hi.max(khi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2Eigenvalue {
    pub value: f64,
    pub multiplicity: usize,
    pub error: f64,
    pub sectors: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct S2Spectrum {
    pub eigenvalues: Vec<S2Eigenvalue>,
    pub kernel_dim: usize,
    pub window: f64,
    pub q_range: (i64, i64),
    pub n: usize,
    pub flagged: bool,
}

impl S2Spectrum {
    /// Values repeated by multiplicity.
    pub fn values(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .flat_map(|e| std::iter::repeat(e.value).take(e.multiplicity))
            .collect()
    }
}

/// Positive spectrum below `window` with the sector range chosen automatically.
pub fn assemble_s2_spectrum(config: &S2FieldConfig, window: f64, params: SolverParams) -> Result<S2Spectrum> {
    assemble_s2_spectrum_in(config, required_q_range(config, window), window, params)
}

/// As [`assemble_s2_spectrum`] over an explicit sector range, which must
/// cover [`required_q_range`].
pub fn assemble_s2_spectrum_in(
    config: &S2FieldConfig,
    q_range: (i64, i64),
    window: f64,
    params: SolverParams,
) -> Result<S2Spectrum> {
    if !(window > 0.0) {
        return Err(Error::InvalidInput(format!("window {window} must be positive")));
    }
    let need = required_q_range(config, window);
    if q_range.0 > need.0 || q_range.1 < need.1 {
        return Err(domain(
            "assemble_s2_spectrum",
            format!("sectors {q_range:?} do not cover {need:?} required for window {window}"),
        ));
    }
    let sectors: Vec<SectorSpectrum> = (q_range.0..=q_range.1)
        .into_par_iter()
        .map(|q| solve_sector(config, q, window, params))
        .collect::<Result<_>>()?;
    let kernel_dim = sectors.iter().map(|s| s.kernel_dim).sum();
    let flagged = sectors.iter().any(|s| s.flagged);
    let mut all: Vec<(f64, f64, i64)> = sectors
        .iter()
        .flat_map(|s| s.eigenvalues.iter().map(move |e| (e.value, e.error, s.q)))
        .collect();
    all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.2.cmp(&b.2)));
    let mut eigenvalues: Vec<S2Eigenvalue> = Vec::new();
    let mut group: Vec<(f64, f64, i64)> = Vec::new();
    let flush = |group: &mut Vec<(f64, f64, i64)>, out: &mut Vec<S2Eigenvalue>| {
        if group.is_empty() {
            return;
        }
        let k = group.len() as f64;
        let value = group.iter().map(|g| g.0).sum::<f64>() / k;
        let spread = group.iter().map(|g| (g.0 - value).abs()).fold(0.0, f64::max);
        let error = group.iter().map(|g| g.1).fold(spread, f64::max);
        out.push(S2Eigenvalue {
            value,
            multiplicity: group.len(),
            error,
            sectors: group.iter().map(|g| g.2).collect(),
        });
        group.clear();
    };
    for item in all {
        let joins = group
            .last()
            .is_some_and(|last| (item.0 - last.0).abs() <= 3.0 * (item.1 + last.1) + 1e-9);
        if !joins {
            flush(&mut group, &mut eigenvalues);
        }
        group.push(item);
    }
    flush(&mut group, &mut eigenvalues);
    Ok(S2Spectrum {
        eigenvalues,
        kernel_dim,
        window,
        q_range,
        n: params.n,
        flagged,
    })
}

/// Zero modes summed over all sectors; independent of the grid.
pub fn kernel_dim(config: &S2FieldConfig) -> Result<usize> {
    let (lo, hi) = kernel_sector_range(config);
    Ok((lo..=hi).map(|q| sector_kernel_dim(config, q)).sum())
}

fn sector_kernel_dim(config: &S2FieldConfig, q: i64) -> usize {
    let sp = config.sector(q);
    let (north, south) = pole_components(sp.nu_north, sp.nu_south, config.extension);
    usize::from(north == south)
}
