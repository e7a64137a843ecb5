//! Spectra of the Dirac operator `D^(−)` for magnetic Hopf links.
//!
//! With `Σα_k = c + m`, `c ∈ (−½, ½]`, the spectrum is the union over `k ∈ Z`
//! of the explicit sets `Z_k` and the branches `±√(λ² + (k+c)²) − ½` with
//! `λ` running through the positive spectrum of an S² problem.

use crate::error::{domain, Error, Result};
use crate::link_geometry::hopf::s2_from_angles;
use crate::link_geometry::{Flux, FluxVector, S2Point};
use crate::s2_dirac::{assemble_s2_spectrum, build_beta, PointFlux, Pole, S2FieldConfig, S2Spectrum, SolverParams};
use num_rational::Ratio;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Where a fiber sits on S².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HopfPoint {
    North,
    South,
    Angles { colatitude: f64, longitude: f64 },
}

impl HopfPoint {
    pub fn to_s2(self) -> S2Point {
        match self {
            HopfPoint::North => S2Point::new(0.0, 0.0, 1.0),
            HopfPoint::South => S2Point::new(0.0, 0.0, -1.0),
            HopfPoint::Angles { colatitude, longitude } => s2_from_angles(colatitude, longitude),
        }
    }

    fn pole(self) -> Option<Pole> {
        match self {
            HopfPoint::North => Some(Pole::North),
            HopfPoint::South => Some(Pole::South),
            HopfPoint::Angles { .. } => None,
        }
    }
}

/// Split `Σα = c + m` with `c ∈ (−½, ½]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxSplit {
    pub c: Flux,
    pub m: i64,
}

impl FluxSplit {
    pub fn c_f64(&self) -> f64 {
        self.c.to_f64()
    }

    /// `c = ½`, exactly for rational inputs.
    pub fn is_half(&self) -> bool {
        match self.c {
            Flux::Exact(r) => r == Ratio::new(1, 2),
            Flux::Float(x) => x == 0.5,
        }
    }
}

pub fn derive_cm(fluxes: &FluxVector) -> FluxSplit {
    if let Some(sum) = fluxes.exact_sum() {
        let m = (sum - Ratio::new(1, 2)).ceil();
        return FluxSplit {
            c: Flux::Exact(sum - m),
            m: m.to_integer(),
        };
    }
    let sum: f64 = fluxes.to_f64().iter().sum();
    let m = (sum - 0.5).ceil();
    let mut c = sum - m;
    if (c - 0.5).abs() < 1e-12 && c != 0.5 {
        log::warn!("flux sum {sum} is within 1e-12 of a half integer; treating c as 1/2");
        c = 0.5;
    }
    if (c + 0.5).abs() < 1e-12 {
        log::warn!("flux sum {sum} is within 1e-12 of a half integer; treating c as 1/2");
        return FluxSplit {
            c: Flux::Float(0.5),
            m: m as i64 - 1,
        };
    }
    FluxSplit {
        c: Flux::Float(c),
        m: m as i64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    #[serde(rename = "Zk")]
    Z,
    Continuous,
}

/// One contribution to the spectrum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow {
    pub value: f64,
    pub multiplicity: usize,
    pub branch: Branch,
    pub k: i64,
    pub lambda: Option<f64>,
    pub error_estimate: Option<f64>,
    /// `sgn(m − k)` for `Z_k` rows.
    pub spin: Option<i8>,
}

/// The set `Z_k` as a single row, or `None` when `m = k`.
pub fn z_branch(k: i64, c: f64, m: i64) -> Option<SpectrumRow> {
    let kf = k as f64;
    let value = match m.cmp(&k) {
        std::cmp::Ordering::Greater => kf + c - 0.5,
        std::cmp::Ordering::Equal => return None,
        std::cmp::Ordering::Less => -kf - c - 0.5,
    };
    Some(SpectrumRow {
        value,
        multiplicity: m.abs_diff(k) as usize,
        branch: Branch::Z,
        k,
        lambda: None,
        error_estimate: None,
        spin: Some((m - k).signum() as i8),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopfConfig {
    pub fluxes: FluxVector,
    pub points: Vec<HopfPoint>,
}

impl HopfConfig {
    pub fn new(fluxes: FluxVector, points: Vec<HopfPoint>) -> Result<Self> {
        if fluxes.is_empty() {
            return Err(Error::InvalidInput("a Hopf link needs at least one fiber".into()));
        }
        if fluxes.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: fluxes.len(),
                got: points.len(),
            });
        }
        for (i, a) in fluxes.as_slice().iter().enumerate() {
            let zero = match a {
                Flux::Exact(r) => r.is_zero(),
                Flux::Float(x) => *x == 0.0,
            };
            if zero {
                return Err(domain("HopfConfig::new", format!("flux {i} must lie in (0, 1)")));
            }
        }
        for (i, p) in points.iter().enumerate() {
            for q in &points[..i] {
                if (p.to_s2() - q.to_s2()).norm() < 1e-12 {
                    return Err(domain("HopfConfig::new", format!("fiber {i} repeats an earlier point")));
                }
            }
        }
        Ok(Self { fluxes, points })
    }

    /// A single Hopf fiber over the north pole.
    pub fn circle(alpha: Flux) -> Result<Self> {
        Self::new(FluxVector::new(vec![alpha])?, vec![HopfPoint::North])
    }

    pub fn k(&self) -> usize {
        self.fluxes.len()
    }

    pub fn split(&self) -> FluxSplit {
        derive_cm(&self.fluxes)
    }

    /// The S² problem for index `k`; needs every point at a pole.
    pub fn s2_config(&self, k: i64) -> Result<S2FieldConfig> {
        let pts = self
            .points
            .iter()
            .zip(self.fluxes.to_f64())
            .map(|(p, alpha)| {
                p.pole()
                    .map(|pole| PointFlux { pole, alpha })
                    .ok_or_else(|| domain("HopfConfig::s2_config", "numerical S² spectra need fibers over the poles"))
            })
            .collect::<Result<Vec<_>>>()?;
        build_beta(&pts, self.split().c_f64(), k)
    }
}

/// Source of positive S² spectra.
pub trait S2Provider: Sync {
    fn spectrum(&self, config: &S2FieldConfig, window: f64) -> Result<S2Spectrum>;
}

/// The staggered-grid solver from [`crate::s2_dirac`].
#[derive(Debug, Clone, Copy, Default)]
pub struct NumericalProvider {
    pub params: SolverParams,
}

impl S2Provider for NumericalProvider {
    fn spectrum(&self, config: &S2FieldConfig, window: f64) -> Result<S2Spectrum> {
        assemble_s2_spectrum(config, window, self.params)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub c: f64,
    pub m: i64,
    pub window: (f64, f64),
    pub rows: Vec<SpectrumRow>,
    /// Some S² eigenvalue failed its convergence check.
    pub flagged: bool,
}

impl SpectrumTable {
    /// Sort by value, then `k`.
    pub fn sort(&mut self) {
        self.rows
            .sort_by(|a, b| a.value.total_cmp(&b.value).then(a.k.cmp(&b.k)).then((a.branch as u8).cmp(&(b.branch as u8))));
    }

    pub fn total_multiplicity(&self) -> usize {
        self.rows.iter().map(|r| r.multiplicity).sum()
    }

    /// Rows with values within `tol` of each other merged into `(value, multiplicity)`.
    pub fn merged(&self, tol: f64) -> Vec<(f64, usize)> {
        let mut rows: Vec<(f64, usize)> = self.rows.iter().map(|r| (r.value, r.multiplicity)).collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, usize, f64)> = Vec::new();
        for (v, k) in rows {
            match out.last_mut() {
                Some(last) if (v - last.2).abs() <= tol => {
                    last.0 += v * k as f64;
                    last.1 += k;
                    last.2 = v;
                }
                _ => out.push((v * k as f64, k, v)),
            }
        }
        out.into_iter().map(|(s, k, _)| (s / k as f64, k)).collect()
    }
}

/// Indices `k` whose branches can reach `[−bound, bound]`.
pub fn k_range(c: f64, bound: f64) -> std::ops::RangeInclusive<i64> {
    let lo = (-bound - 0.5 - c).ceil() as i64;
    let hi = (bound + 0.5 - c).floor() as i64;
    lo..=hi
}

/// All spectral values of `D^(−)` in `window`.
pub fn assemble_spectrum(config: &HopfConfig, window: (f64, f64), provider: &dyn S2Provider) -> Result<SpectrumTable> {
    let (a, b) = window;
    if !(a <= b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidInput(format!("bad window [{a}, {b}]")));
    }
    let split = config.split();
    let (c, m) = (split.c_f64(), split.m);
    let bound = a.abs().max(b.abs());
    let ks: Vec<i64> = k_range(c, bound).collect();
    let results: Vec<(i64, Result<Vec<SpectrumRow>>, bool)> = ks
        .par_iter()
        .map(|&k| {
            let mut flagged = false;
            let rows = continuous_rows(config, k, c, window, provider, &mut flagged);
            (k, rows, flagged)
        })
        .collect();
    let mut rows: Vec<SpectrumRow> = ks
        .iter()
        .filter_map(|&k| z_branch(k, c, m))
        .filter(|r| r.value >= a && r.value <= b)
        .collect();
    let mut missing = Vec::new();
    let mut flagged = false;
    for (k, res, f) in results {
        flagged |= f;
        match res {
            Ok(r) => rows.extend(r),
            Err(e) => missing.push(format!("k = {k}: {e}")),
        }
    }
    if !missing.is_empty() {
        return Err(Error::Numerical(format!("S² spectra unavailable for {}", missing.join("; "))));
    }
    let mut table = SpectrumTable {
        c,
        m,
        window,
        rows,
        flagged,
    };
    table.sort();
    Ok(table)
}

fn continuous_rows(
    config: &HopfConfig,
    k: i64,
    c: f64,
    (a, b): (f64, f64),
    provider: &dyn S2Provider,
    flagged: &mut bool,
) -> Result<Vec<SpectrumRow>> {
    let shift = k as f64 + c;
    let reach = a.abs().max(b.abs()) + 0.5;
    let lmax2 = reach * reach - shift * shift;
    if lmax2 <= 0.0 {
        return Ok(Vec::new());
    }
    let s2 = provider.spectrum(&config.s2_config(k)?, lmax2.sqrt() + 1e-6)?;
    *flagged |= s2.flagged;
    let mut rows = Vec::new();
    for e in &s2.eigenvalues {
        let r = e.value.hypot(shift);
        let err = e.error * e.value / r;
        for value in [r - 0.5, -r - 0.5] {
            if value >= a && value <= b {
                rows.push(SpectrumRow {
                    value,
                    multiplicity: e.multiplicity,
                    branch: Branch::Continuous,
                    k,
                    lambda: Some(e.value),
                    error_estimate: Some(err),
                    spin: None,
                });
            }
        }
    }
    Ok(rows)
}

/// Kernel dimension with a flag telling whether the count is certain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KernelCount {
    pub count: usize,
    pub confident: bool,
    /// Obtained from the exact `c = ½` rule.
    pub exact: bool,
}

/// `dim ker D^(−)`; exact when `c = ½`, otherwise from the S² spectra.
pub fn kernel_dimension(config: &HopfConfig, provider: &dyn S2Provider, tol: f64) -> Result<KernelCount> {
    let split = config.split();
    if split.is_half() {
        return Ok(KernelCount {
            count: split.m.max(0) as usize,
            confident: true,
            exact: true,
        });
    }
    let c = split.c_f64();
    let m = split.m;
    let mut count: usize = k_range(c, tol)
        .filter_map(|k| z_branch(k, c, m))
        .filter(|r| r.value.abs() <= tol)
        .map(|r| r.multiplicity)
        .sum();
    let mut confident = true;
    for k in admissible_k(c) {
        let crit = (0.25 - (k as f64 + c).powi(2)).max(0.0).sqrt();
        let s2 = provider.spectrum(&config.s2_config(k)?, crit + 1.0)?;
        for e in &s2.eigenvalues {
            let d = (e.value - crit).abs();
            if d <= tol {
                count += e.multiplicity;
                if e.error > tol {
                    confident = false;
                }
            } else if d <= tol + e.error {
                confident = false;
            }
        }
    }
    Ok(KernelCount {
        count,
        confident,
        exact: false,
    })
}

/// `k` with `|k + c| ≤ ½`, where a continuous branch can reach zero.
fn admissible_k(c: f64) -> Vec<i64> {
    if c == 0.5 {
        vec![-1, 0]
    } else {
        vec![0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanStatus {
    Pass,
    Inconclusive,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub c: f64,
    pub m: i64,
    /// Some `Z_k` contains zero.
    pub z_zero: bool,
    /// `min |λ − √(¼ − (k+c)²)|` over admissible `k`, capped at 2 when no
    /// eigenvalue lies within 2 of the critical value.
    pub gap: f64,
    pub error_estimate: f64,
    pub status: ScanStatus,
}

/// Zero-mode scan for a single fiber. A row passes when
/// `gap − error_estimate > margin`.
pub fn circle_zero_mode_scan(alphas: &[f64], params: SolverParams, margin: f64) -> Result<Vec<ScanRow>> {
    let provider = NumericalProvider { params };
    alphas
        .par_iter()
        .map(|&alpha| {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(domain("circle_zero_mode_scan", format!("alpha {alpha} outside (0, 1)")));
            }
            let cfg = HopfConfig::circle(Flux::Float(alpha))?;
            let split = cfg.split();
            let (c, m) = (split.c_f64(), split.m);
            let z_zero = (-2..=2).filter_map(|k| z_branch(k, c, m)).any(|r| r.value == 0.0);
            let mut gap = f64::INFINITY;
            let mut error_estimate = 0.0;
            let mut flagged = false;
            for k in admissible_k(c) {
                let crit = (0.25 - (k as f64 + c).powi(2)).max(0.0).sqrt();
                let window = crit + 2.0;
                let s2 = provider.spectrum(&cfg.s2_config(k)?, window)?;
                flagged |= s2.flagged;
                if window - crit < gap {
                    gap = window - crit;
                    error_estimate = 0.0;
                }
                for e in &s2.eigenvalues {
                    let d = (e.value - crit).abs();
                    if d < gap {
                        gap = d;
                        error_estimate = e.error;
                    }
                }
            }
            let status = if z_zero {
                ScanStatus::Fail
            } else if gap - error_estimate > margin && !flagged {
                ScanStatus::Pass
            } else {
                ScanStatus::Inconclusive
            };
            Ok(ScanRow {
                alpha,
                c,
                m,
                z_zero,
                gap,
                error_estimate,
                status,
            })
        })
        .collect()
}

/// Free Dirac spectrum on the unit 3-sphere: `(value, multiplicity)` for
/// `±(3/2 + n)`, `n < count`.
pub fn free_s3_spectrum(count: usize) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = (0..count)
        .flat_map(|n| {
            let mult = (n + 1) * (n + 2);
            let x = 1.5 + n as f64;
            [(-x, mult), (x, mult)]
        })
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}
