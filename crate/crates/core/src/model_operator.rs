//! The flat model operator on `T_ℓ × R²` with an Aharonov–Bohm flux `2πα`
//! along the axis.
//!
//! Spinors are expanded as
//! `(2πℓ)^{-1/2} Σ φ_{m,n,σ}(r) e^{ijs} e^{inθ}` with `j = 2πm/ℓ`, so norms reduce
//! to `Σ ∫ |φ|² r dr`. In the radial gauge `A = α dθ` the operator acts on a
//! single Fourier mode `e^{ijs}` as
//!
//! ```text
//! D = −j σ₃ − i ( 0                         e^{−iθ}(∂_r − (i/r)∂_θ + α/r) )
//!               ( e^{iθ}(∂_r + (i/r)∂_θ − α/r)  0                        )
//! ```
//!
//! With this sign of the longitudinal term the deficiency spinors carry the
//! factor `(±1 − ij)/⟨j⟩` on their lower component.

use crate::error::{domain, Error, Result};
use crate::special_functions::{bessel_ik_unchecked, c_alpha};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `⟨j⟩ = √(1 + j²)`.
pub fn bracket(j: f64) -> f64 {
    (1.0 + j * j).sqrt()
}

/// Torus length and flux of the model problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelTube {
    ell: f64,
    alpha: f64,
}

impl ModelTube {
    pub fn new(ell: f64, alpha: f64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(domain("ModelTube::new", format!("torus length {ell} must be positive")));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(
                "ModelTube::new",
                format!("alpha {alpha} must lie in (0, 1); at integer flux there is no deficiency"),
            ));
        }
        Ok(Self { ell, alpha })
    }

    pub fn ell(&self) -> f64 {
        self.ell
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Dual lattice point `j = 2πm/ℓ`.
    pub fn j(&self, m: i64) -> f64 {
        2.0 * PI * m as f64 / self.ell
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Up,
    Down,
}

/// Fourier label of one spinor component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeKey {
    /// `j = 2πm/ℓ`.
    pub m: i64,
    /// Angular mode `e^{inθ}`.
    pub n: i64,
    pub spin: Spin,
}

/// Radial building blocks with exact derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialTerm {
    /// `coeff · K_ν(q r)`.
    BesselK { coeff: Complex64, order: f64, scale: f64 },
    /// `coeff · exp(−1/((r − r₁)(r₂ − r)))` on `(r₁, r₂)`, zero elsewhere.
    Bump { coeff: Complex64, r1: f64, r2: f64 },
}

impl RadialTerm {
    /// Value and radial derivative at `r > 0`.
    pub fn eval(&self, r: f64) -> (Complex64, Complex64) {
        match *self {
            RadialTerm::BesselK { coeff, order, scale } => {
                let b = bessel_ik_unchecked(order, scale * r);
                (coeff * b.k, coeff * (scale * b.k_prime))
            }
            RadialTerm::Bump { coeff, r1, r2 } => {
                if r <= r1 || r >= r2 {
                    return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                }
                let u = (r - r1) * (r2 - r);
                let v = (-1.0 / u).exp();
                let du = (r2 - r) - (r - r1);
                (coeff * v, coeff * (v * du / (u * u)))
            }
        }
    }
}

/// A finite sum of separated modes with analytic radial profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeFunction {
    tube: ModelTube,
    terms: BTreeMap<ModeKey, Vec<RadialTerm>>,
}

impl ModeFunction {
    pub fn zero(tube: ModelTube) -> Self {
        Self {
            tube,
            terms: BTreeMap::new(),
        }
    }

    pub fn tube(&self) -> ModelTube {
        self.tube
    }

    pub fn push(&mut self, key: ModeKey, term: RadialTerm) {
        self.terms.entry(key).or_default().push(term);
    }

    pub fn terms(&self) -> &BTreeMap<ModeKey, Vec<RadialTerm>> {
        &self.terms
    }

    pub fn add(&mut self, other: &ModeFunction) -> Result<()> {
        if other.tube != self.tube {
            return Err(Error::InvalidInput("mode functions live on different tubes".into()));
        }
        for (k, ts) in &other.terms {
            self.terms.entry(*k).or_default().extend(ts.iter().copied());
        }
        Ok(())
    }

    fn radial(&self, key: &ModeKey, r: f64) -> (Complex64, Complex64) {
        self.terms.get(key).map_or((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |ts| {
            ts.iter().fold((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)), |acc, t| {
                let (v, d) = t.eval(r);
                (acc.0 + v, acc.1 + d)
            })
        })
    }

    /// The spinor `(f₊, f₋)` at `(s, r, θ)`.
    pub fn eval(&self, s: f64, r: f64, theta: f64) -> [Complex64; 2] {
        let norm = 1.0 / (2.0 * PI * self.tube.ell).sqrt();
        let mut out = [Complex64::new(0.0, 0.0); 2];
        for key in self.terms.keys() {
            let phase = Complex64::from_polar(norm, self.tube.j(key.m) * s + key.n as f64 * theta);
            let idx = match key.spin {
                Spin::Up => 0,
                Spin::Down => 1,
            };
            out[idx] += phase * self.radial(key, r).0;
        }
        out
    }

    /// Radial profiles on a grid.
    pub fn sample(&self, grid: &RadialGrid) -> GridField {
        let mut comps = BTreeMap::new();
        for key in self.terms.keys() {
            comps.insert(*key, grid.r.iter().map(|&r| self.radial(key, r).0).collect());
        }
        GridField { comps }
    }

    /// The Fourier modes `∂_s f`, i.e. profiles multiplied by `ij`.
    pub fn d_s(&self, grid: &RadialGrid) -> GridField {
        let mut f = self.sample(grid);
        for (k, v) in f.comps.iter_mut() {
            let j = self.tube.j(k.m);
            v.iter_mut().for_each(|x| *x *= I * j);
        }
        f
    }

    /// The transverse part `σ̃(−i∇_u + A_u) f`, applied with exact radial derivatives.
    pub fn transverse(&self, grid: &RadialGrid) -> GridField {
        let alpha = self.tube.alpha;
        let mut comps: BTreeMap<ModeKey, Vec<Complex64>> = BTreeMap::new();
        for key in self.terms.keys() {
            let n = key.n as f64;
            let (target, shift) = match key.spin {
                // e^{−iθ}(∂_r − (i/r)∂_θ + α/r) on e^{inθ}
                Spin::Down => (ModeKey { n: key.n - 1, spin: Spin::Up, ..*key }, n + alpha),
                // e^{iθ}(∂_r + (i/r)∂_θ − α/r) on e^{inθ}
                Spin::Up => (ModeKey { n: key.n + 1, spin: Spin::Down, ..*key }, -(n + alpha)),
            };
            let out = comps.entry(target).or_insert_with(|| vec![Complex64::new(0.0, 0.0); grid.len()]);
            for (o, &r) in out.iter_mut().zip(&grid.r) {
                let (v, d) = self.radial(key, r);
                *o += -I * (d + v * (shift / r));
            }
        }
        GridField { comps }
    }

    /// The longitudinal part `−jσ₃ f`.
    pub fn longitudinal(&self, grid: &RadialGrid) -> GridField {
        let mut f = self.sample(grid);
        for (k, v) in f.comps.iter_mut() {
            let j = self.tube.j(k.m);
            let sign = match k.spin {
                Spin::Up => -1.0,
                Spin::Down => 1.0,
            };
            v.iter_mut().for_each(|x| *x *= sign * j);
        }
        f
    }

    /// `D f` on the grid.
    pub fn apply_dirac(&self, grid: &RadialGrid) -> GridField {
        let mut out = self.longitudinal(grid);
        out.add_assign(&self.transverse(grid));
        out
    }
}

/// Radial profiles sampled on a grid, keyed by mode.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GridField {
    pub comps: BTreeMap<ModeKey, Vec<Complex64>>,
}

impl GridField {
    pub fn add_assign(&mut self, other: &GridField) {
        for (k, v) in &other.comps {
            let e = self.comps.entry(*k).or_insert_with(|| vec![Complex64::new(0.0, 0.0); v.len()]);
            e.iter_mut().zip(v).for_each(|(a, b)| *a += b);
        }
    }

    pub fn scaled(&self, c: Complex64) -> GridField {
        GridField {
            comps: self
                .comps
                .iter()
                .map(|(k, v)| (*k, v.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }

    pub fn sub(&self, other: &GridField) -> GridField {
        let mut out = self.clone();
        out.add_assign(&other.scaled(Complex64::new(-1.0, 0.0)));
        out
    }

    /// `Σ ∫ |φ|² r dr`, with the part below the grid modelled per component.
    pub fn norm_sq(&self, grid: &RadialGrid) -> Result<f64> {
        let mut total = 0.0;
        for v in self.comps.values() {
            let density: Vec<f64> = v.iter().map(|x| x.norm_sqr()).collect();
            total += grid.integrate_density(&density)?;
        }
        Ok(total)
    }

    /// `Σ ∫ |φ|² r dr` over the grid only, for residuals whose profile near the
    /// axis is rounding noise.
    pub fn norm_sq_on_grid(&self, grid: &RadialGrid) -> Result<f64> {
        let mut density = vec![0.0; grid.len()];
        for v in self.comps.values() {
            density.iter_mut().zip(v).for_each(|(d, x)| *d += x.norm_sqr());
        }
        grid.integrate_signed(&density)
    }

    /// `Σ ∫ Re(φ̄ ψ) r dr`.
    pub fn real_inner(&self, other: &GridField, grid: &RadialGrid) -> Result<f64> {
        let mut density = vec![0.0; grid.len()];
        for (k, v) in &self.comps {
            if let Some(w) = other.comps.get(k) {
                density.iter_mut().zip(v.iter().zip(w)).for_each(|(d, (a, b))| *d += (a.conj() * b).re);
            }
        }
        grid.integrate_signed(&density)
    }
}

/// Log-spaced radial grid with trapezoid quadrature in `ln r`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    r: Vec<f64>,
    step: f64,
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, n: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min) || n < 8 {
            return Err(Error::InvalidInput(format!("bad radial grid [{r_min}, {r_max}] with {n} points")));
        }
        let step = (r_max / r_min).ln() / (n - 1) as f64;
        let r = (0..n).map(|i| r_min * (step * i as f64).exp()).collect();
        Ok(Self { r, step })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    fn trapezoid(&self, g: &[f64]) -> f64 {
        let n = g.len();
        self.step * (g.iter().sum::<f64>() - 0.5 * (g[0] + g[n - 1]))
    }

    /// `∫₀^∞ w r dr` for a non-negative density `w`.
    ///
    /// Below `r_min` the integrand `w r²` is modelled as `A r^a + B r²`, the
    /// leading behaviour of a squared Bessel profile `K_ν(qr)²r²`.
    pub fn integrate_density(&self, w: &[f64]) -> Result<f64> {
        let g: Vec<f64> = w.iter().zip(&self.r).map(|(w, r)| w * r * r).collect();
        let body = self.trapezoid(&g);
        let peak = g.iter().cloned().fold(0.0, f64::max);
        if g[0] <= 1e-14 * peak || g[0] == 0.0 {
            return Ok(body);
        }
        let stride = 8;
        let h = stride as f64 * self.step;
        let r0 = self.r[0];
        let y: Vec<f64> = (0..3).map(|i| g[i * stride] / (self.r[i * stride] * self.r[i * stride])).collect();
        let (d0, d1) = (y[1] - y[0], y[2] - y[1]);
        let ratio = d1 / d0;
        let tail = if d0 == 0.0 || (ratio - 1.0).abs() < 1e-9 {
            g[0] / 2.0
        } else {
            let a = 2.0 + ratio.ln() / h;
            if ratio > 0.0 && a > 0.0 {
                let amp = d0 / (ratio - 1.0);
                let b = y[0] - amp;
                amp * r0 * r0 / a + b * r0 * r0 / 2.0
            } else if g[0] > g[stride] && g[stride] > g[2 * stride] {
                return Err(Error::Numerical(format!(
                    "density is not integrable at the axis (fitted exponent {a:.3})"
                )));
            } else {
                // no clean power law, e.g. rounding noise in a residual
                g[0]
            }
        };
        Ok(body + tail)
    }

    /// Trapezoid rule only, for signed integrands that vanish at the ends.
    pub fn integrate_signed(&self, w: &[f64]) -> Result<f64> {
        let g: Vec<f64> = w.iter().zip(&self.r).map(|(w, r)| w * r * r).collect();
        Ok(self.trapezoid(&g))
    }
}

impl Default for RadialGrid {
    /// `[10⁻⁴, 40]` with 4096 points.
    fn default() -> Self {
        Self::new(1e-4, 40.0, 4096).expect("static grid")
    }
}

/// Sign of the deficiency space `ker(D_max ∓ i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeficiencySign {
    PlusI,
    MinusI,
}

impl DeficiencySign {
    pub fn value(self) -> f64 {
        match self {
            DeficiencySign::PlusI => 1.0,
            DeficiencySign::MinusI => -1.0,
        }
    }
}

fn check_finite_support(seq: &BTreeMap<i64, Complex64>) -> Result<()> {
    if seq.values().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite coefficient".into()));
    }
    Ok(())
}

/// `f_{±i}(c)`: spin-up `c_j K_{1−α}(r⟨j⟩)e^{−iθ}`, spin-down
/// `((±1 − ij)/⟨j⟩) c_j K_α(r⟨j⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeficiencyElement {
    pub tube: ModelTube,
    pub c: BTreeMap<i64, Complex64>,
    pub sign: DeficiencySign,
}

pub fn deficiency_element(
    tube: ModelTube,
    c: BTreeMap<i64, Complex64>,
    sign: DeficiencySign,
) -> Result<DeficiencyElement> {
    check_finite_support(&c)?;
    Ok(DeficiencyElement { tube, c, sign })
}

impl DeficiencyElement {
    /// Lower-component factor `(±1 − ij)/⟨j⟩`.
    pub fn lower_factor(&self, m: i64) -> Complex64 {
        let j = self.tube.j(m);
        Complex64::new(self.sign.value(), -j) / bracket(j)
    }

    pub fn to_function(&self) -> ModeFunction {
        let alpha = self.tube.alpha;
        let mut f = ModeFunction::zero(self.tube);
        for (&m, &c) in &self.c {
            let q = bracket(self.tube.j(m));
            f.push(
                ModeKey { m, n: -1, spin: Spin::Up },
                RadialTerm::BesselK { coeff: c, order: 1.0 - alpha, scale: q },
            );
            f.push(
                ModeKey { m, n: 0, spin: Spin::Down },
                RadialTerm::BesselK { coeff: c * self.lower_factor(m), order: alpha, scale: q },
            );
        }
        f
    }

    /// `‖(D ∓ i) f‖ / ‖f‖` on the grid.
    pub fn relative_residual(&self, grid: &RadialGrid) -> Result<f64> {
        let f = self.to_function();
        let lhs = f.apply_dirac(grid);
        let rhs = f.sample(grid).scaled(I * self.sign.value());
        let num = lhs.sub(&rhs).norm_sq_on_grid(grid)?;
        let den = f.sample(grid).norm_sq(grid)?;
        if den == 0.0 {
            return Ok(0.0);
        }
        Ok((num / den).sqrt())
    }
}

/// The two distinguished self-adjoint extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// Singular part `(K_{1−α} e^{−iθ}, 0)`.
    Plus,
    /// Singular part `(0, K_α)`.
    Minus,
}

/// `f_sing(λ) = (2πℓ)^{-1/2} Σ λ_j e^{ijs} v_j` in the domain of `D^(±)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularMode {
    pub tube: ModelTube,
    pub lambda: BTreeMap<i64, Complex64>,
    pub extension: Extension,
}

impl SingularMode {
    pub fn new(tube: ModelTube, lambda: BTreeMap<i64, Complex64>, extension: Extension) -> Result<Self> {
        check_finite_support(&lambda)?;
        Ok(Self { tube, lambda, extension })
    }

    pub fn l2_sq(&self) -> f64 {
        self.lambda.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn to_function(&self) -> ModeFunction {
        let alpha = self.tube.alpha;
        let mut f = ModeFunction::zero(self.tube);
        for (&m, &l) in &self.lambda {
            let q = bracket(self.tube.j(m));
            match self.extension {
                Extension::Plus => f.push(
                    ModeKey { m, n: -1, spin: Spin::Up },
                    RadialTerm::BesselK { coeff: l, order: 1.0 - alpha, scale: q },
                ),
                Extension::Minus => f.push(
                    ModeKey { m, n: 0, spin: Spin::Down },
                    RadialTerm::BesselK { coeff: l, order: alpha, scale: q },
                ),
            }
        }
        f
    }
}

/// Exact image of a singular mode:
/// `D^(+) λ(K_{1−α}e^{−iθ}, 0) = λ(−j K_{1−α}e^{−iθ}, i⟨j⟩K_α)` and
/// `D^(−) λ(0, K_α) = λ(i⟨j⟩K_{1−α}e^{−iθ}, j K_α)`.
pub fn apply_extension_action(mode: &SingularMode) -> ModeFunction {
    let alpha = mode.tube.alpha;
    let mut f = ModeFunction::zero(mode.tube);
    for (&m, &l) in &mode.lambda {
        let j = mode.tube.j(m);
        let q = bracket(j);
        let (up, down) = match mode.extension {
            Extension::Plus => (l * -j, l * I * q),
            Extension::Minus => (l * I * q, l * j),
        };
        f.push(
            ModeKey { m, n: -1, spin: Spin::Up },
            RadialTerm::BesselK { coeff: up, order: 1.0 - alpha, scale: q },
        );
        f.push(
            ModeKey { m, n: 0, spin: Spin::Down },
            RadialTerm::BesselK { coeff: down, order: alpha, scale: q },
        );
    }
    f
}

/// `∫|f_sing(λ)|² = C · Σ |λ_j|²/(1 + j²)` with `C = C_α` for `D^(−)` and
/// `C = C_{1−α}` for `D^(+)`.
pub fn singular_l2_norm(mode: &SingularMode) -> Result<f64> {
    let a = match mode.extension {
        Extension::Minus => mode.tube.alpha,
        Extension::Plus => 1.0 - mode.tube.alpha,
    };
    let c = c_alpha(a)?.value;
    Ok(c * mode
        .lambda
        .iter()
        .map(|(&m, l)| {
            let j = mode.tube.j(m);
            l.norm_sqr() / (1.0 + j * j)
        })
        .sum::<f64>())
}

/// `C_α + C_{1−α}`, the constant in `‖f‖²_graph ≥ (C_α + C_{1−α}) ‖λ‖²`.
pub fn graph_norm_lower_bound(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain("graph_norm_lower_bound", format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(c_alpha(alpha)?.value + c_alpha(1.0 - alpha)?.value)
}

/// `‖f‖² + ‖Df‖²` on the grid.
pub fn graph_norm_sq(f: &ModeFunction, grid: &RadialGrid) -> Result<f64> {
    Ok(f.sample(grid).norm_sq(grid)? + f.apply_dirac(grid).norm_sq(grid)?)
}

/// Both sides of `∫|Df|² = ∫|∂_s f|² + ∫|σ̃(−i∇_u + A_u) f|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyDecoupling {
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / max(lhs, rhs)`, or 0 when both vanish.
    pub residual: f64,
}

pub fn energy_decoupling_check(f: &ModeFunction, grid: &RadialGrid) -> Result<EnergyDecoupling> {
    let lhs = f.apply_dirac(grid).norm_sq(grid)?;
    let rhs = f.d_s(grid).norm_sq(grid)? + f.transverse(grid).norm_sq(grid)?;
    let scale = lhs.max(rhs);
    let residual = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
    Ok(EnergyDecoupling { lhs, rhs, residual })
}

/// Boundary form `−i ρ ∫∫ [e^{iθ} f̄₋ g₊ + e^{−iθ} f̄₊ g₋] ds dθ` at radius `ρ`.
pub fn boundary_pairing(f: &ModeFunction, g: &ModeFunction, rho: f64) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for key in f.terms.keys() {
        let partner = match key.spin {
            Spin::Down => ModeKey { n: key.n - 1, spin: Spin::Up, ..*key },
            Spin::Up => ModeKey { n: key.n + 1, spin: Spin::Down, ..*key },
        };
        if g.terms.contains_key(&partner) {
            sum += f.radial(key, rho).0.conj() * g.radial(&partner, rho).0;
        }
    }
    -I * rho * sum
}
